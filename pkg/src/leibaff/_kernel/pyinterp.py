"""Pure-Python reference interpreter for bracket programs.

Evaluates with exact field arithmetic (Fraction over Q, canonical residues
over GF).  The compiled core must agree with this interpreter point for
point; the parity tests and the benchmark both lean on that.
"""

from __future__ import annotations

from typing import Optional

from .programs import OP_AFF, OP_BIL, OP_LIN, OP_MATV, Program


def first_failure(program: Program) -> Optional[int]:
    """Flat index of the first grid point where the check register is
    nonzero, or None when the program vanishes on the whole grid."""
    F = program.field
    n = program.n
    add, mul = F.add, F.mul
    zero = F.zero

    sizes = program.grid_sizes()
    points = [[F.grid_point(i) for i in range(size)] for size in sizes]
    ndigits = program.nvars * n
    digit_points = []
    for v in range(program.nvars):
        digit_points.extend([points[v]] * n)
    digit_sizes = [len(pts) for pts in digit_points]

    regs = [[zero] * n for _ in range(program.nregs)]
    instrs = program.instrs
    lin_specs = tuple(
        (tuple((F.coerce(c), r) for c, r in terms), const_idx)
        for terms, const_idx in program.lin_specs
    )
    data = program.data
    mats = program.mats
    consts = program.consts
    check = program.check

    digits = [0] * ndigits
    for v in range(program.nvars):
        base = v * n
        vec = regs[v]
        for c in range(n):
            vec[c] = digit_points[base + c][0]

    flat = 0
    total = program.point_count()
    while True:
        for op, dst, x, y, idx in instrs:
            out = regs[dst]
            if op == OP_AFF or op == OP_BIL:
                payload = data[idx]
                B = payload.B
                xs = regs[x]
                ys = regs[y]
                for k in range(n):
                    out[k] = zero
                for i in range(n):
                    xi = xs[i]
                    if xi == 0:
                        continue
                    Bi = B[i]
                    for j in range(n):
                        yj = ys[j]
                        if yj == 0:
                            continue
                        w = mul(xi, yj)
                        row = Bi[j]
                        for k in range(n):
                            if row[k] != 0:
                                out[k] = add(out[k], mul(w, row[k]))
                if op == OP_AFF:
                    lam, mu, s = payload.lam, payload.mu, payload.s
                    for k in range(n):
                        acc = out[k]
                        lrow, mrow = lam[k], mu[k]
                        for j in range(n):
                            if lrow[j] != 0:
                                acc = add(acc, mul(lrow[j], xs[j]))
                            if mrow[j] != 0:
                                acc = add(acc, mul(mrow[j], ys[j]))
                        out[k] = add(acc, s[k])
            elif op == OP_MATV:
                m = mats[idx]
                xs = regs[x]
                for k in range(n):
                    acc = zero
                    row = m[k]
                    for j in range(n):
                        if row[j] != 0:
                            acc = add(acc, mul(row[j], xs[j]))
                    out[k] = acc
            else:  # OP_LIN
                terms, const_idx = lin_specs[idx]
                for k in range(n):
                    acc = zero if const_idx < 0 else consts[const_idx][k]
                    for coeff, reg in terms:
                        v = regs[reg][k]
                        if v != 0:
                            acc = add(acc, mul(coeff, v))
                    out[k] = acc

        if any(v != 0 for v in regs[check]):
            return flat

        flat += 1
        if flat >= total:
            return None
        # odometer step, rightmost digit fastest
        pos = ndigits - 1
        while True:
            digits[pos] += 1
            if digits[pos] < digit_sizes[pos]:
                regs[pos // n][pos % n] = digit_points[pos][digits[pos]]
                break
            digits[pos] = 0
            regs[pos // n][pos % n] = digit_points[pos][0]
            pos -= 1
