"""Backend selection and marshalling for bracket-program grid sweeps.

``first_failure(program)`` runs a program over its grid and returns the
flat index of the first failing point (or None).  Three execution paths
give identical answers:

* compiled mod-p sweep (GF fields with a small modulus),
* compiled integer sweep (rational data with denominators cleared and an
  int64 magnitude bound certified ahead of time),
* the pure interpreter (always available; the reference semantics).

Set ``LEIBAFF_PURE=1`` to force the interpreter, e.g. for benchmarking.
"""

from __future__ import annotations

import os
from array import array
from fractions import Fraction
from math import lcm
from typing import Optional

from . import pyinterp
from .programs import OP_AFF, OP_BIL, OP_LIN, OP_MATV, Program, ProgramBuilder

try:  # pragma: no cover - absence is exercised via LEIBAFF_PURE
    from . import _gridcore
except ImportError:
    _gridcore = None

__all__ = [
    "Program",
    "ProgramBuilder",
    "backend_name",
    "compiled_available",
    "first_failure",
    "pure_first_failure",
    "vanishes",
]

_INT64_BOUND = 1 << 62


def compiled_available() -> bool:
    return _gridcore is not None and os.environ.get("LEIBAFF_PURE") != "1"


def backend_name() -> str:
    return "compiled" if compiled_available() else "pure-python"


def pure_first_failure(program: Program) -> Optional[int]:
    return pyinterp.first_failure(program)


def first_failure(program: Program) -> Optional[int]:
    if compiled_available():
        if program.field.kind == "GF":
            p = program.field.p
            if program.n ** 2 * p**3 < _INT64_BOUND:
                return _run_compiled(program, _marshal_modp(program, p), p)
        else:
            marshalled = _marshal_int(program)
            if marshalled is not None:
                return _run_compiled(program, marshalled, 0)
    return pyinterp.first_failure(program)


def vanishes(program: Program) -> bool:
    return first_failure(program) is None


# ---------------------------------------------------------------------------
# marshalling
# ---------------------------------------------------------------------------


def _marshal_modp(program: Program, p: int):
    def red(v) -> int:
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, p) % p
        return int(v) % p

    bt = [red(v) for d in program.data for plane in d.B for row in plane for v in row]
    lam = [red(v) for d in program.data for row in d.lam for v in row]
    mu = [red(v) for d in program.data for row in d.mu for v in row]
    sv = [red(v) for d in program.data for v in d.s]
    mats = [red(v) for m in program.mats for row in m for v in row]
    consts = [red(v) for c in program.consts for v in c]
    aff_mults = [1] * (3 * len(program.instrs))

    ptr = [0]
    coeffs: list[int] = []
    regs: list[int] = []
    cidx = []
    cmult = []
    for terms, const_idx in program.lin_specs:
        for c, r in terms:
            coeffs.append(int(c) % p)
            regs.append(r)
        ptr.append(len(coeffs))
        cidx.append(const_idx)
        cmult.append(1)
    return (aff_mults, ptr, coeffs, regs, cidx, cmult, bt, lam, mu, sv, mats, consts)


def _max_row_sum(flat, n):
    if not flat:
        return 0
    return max(sum(abs(v) for v in flat[start : start + n]) for start in range(0, len(flat), n))


def _tensor_out_sums(flat, n):
    """Per output coordinate k: sum over (i, j) of |B[i][j][k]|; maximum."""
    if not flat:
        return 0
    sums = [0] * n
    for pos, v in enumerate(flat):
        sums[pos % n] += abs(v)
    return max(sums)


def _marshal_int(program: Program):
    """Denominator-cleared int64 tables, or None when the magnitude bound
    certificate fails."""
    n = program.n
    dens = [1]
    for d in program.data:
        dens.extend(v.denominator for plane in d.B for row in plane for v in row)
        dens.extend(v.denominator for row in d.lam for v in row)
        dens.extend(v.denominator for row in d.mu for v in row)
        dens.extend(v.denominator for v in d.s)
    for m in program.mats:
        dens.extend(v.denominator for row in m for v in row)
    for c in program.consts:
        dens.extend(v.denominator for v in c)
    L = lcm(*dens)

    bt_rows = [
        [int(v * L) for plane in d.B for row in plane for v in row] for d in program.data
    ]
    lam_rows = [[int(v * L) for row in d.lam for v in row] for d in program.data]
    mu_rows = [[int(v * L) for row in d.mu for v in row] for d in program.data]
    sv_rows = [[int(v * L) for v in d.s] for d in program.data]
    mat_rows = [[int(v * L) for row in m for v in row] for m in program.mats]
    const_rows = [[int(v * L) for v in c] for c in program.consts]

    all_tables = bt_rows + lam_rows + mu_rows + sv_rows + mat_rows + const_rows
    if any(abs(v) >= _INT64_BOUND for row in all_tables for v in row):
        return None

    Sb = [_tensor_out_sums(b, n) for b in bt_rows]
    Slam = [_max_row_sum(m, n) for m in lam_rows]
    Smu = [_max_row_sum(m, n) for m in mu_rows]
    Ss = [max((abs(v) for v in s), default=0) for s in sv_rows]
    Smat = [_max_row_sum(m, n) for m in mat_rows]
    Sconst = [max((abs(v) for v in c), default=0) for c in const_rows]

    # Static scale exponents (value stored = L^scale * true value) and
    # worst-case magnitudes, walked through the instruction stream.
    max_coord = max(s - 1 for s in program.grid_sizes())
    scale = [0] * program.nregs
    bound = [0] * program.nregs
    for v in range(program.nvars):
        bound[v] = max_coord

    aff_mults: list[int] = []
    lin_coeffs: dict[int, list[int]] = {}
    const_mults = [1] * len(program.lin_specs)
    for op, dst, x, y, idx in program.instrs:
        if op in (OP_AFF, OP_BIL):
            sx, sy = scale[x], scale[y]
            ml, mm, ms = L**sy, L**sx, L ** (sx + sy)
            if ms >= _INT64_BOUND:
                return None
            aff_mults.extend([ml, mm, ms])
            b = Sb[idx] * bound[x] * bound[y]
            if op == OP_AFF:
                b += Slam[idx] * ml * bound[x] + Smu[idx] * mm * bound[y] + Ss[idx] * ms
            scale[dst] = 1 + sx + sy
            bound[dst] = b
        elif op == OP_MATV:
            aff_mults.extend([1, 1, 1])
            scale[dst] = 1 + scale[x]
            bound[dst] = Smat[idx] * bound[x]
        else:  # OP_LIN
            aff_mults.extend([1, 1, 1])
            terms, cidx = program.lin_specs[idx]
            out_scale = max([scale[r] for _, r in terms] + ([1] if cidx >= 0 else []) + [0])
            b = 0
            mults = []
            for c, r in terms:
                m = L ** (out_scale - scale[r])
                if abs(c) * m >= _INT64_BOUND:
                    return None
                mults.append(int(c) * m)
                b += abs(c) * m * bound[r]
            if cidx >= 0:
                if L ** (out_scale - 1) >= _INT64_BOUND:
                    return None
                const_mults[idx] = L ** (out_scale - 1)
                b += Sconst[cidx] * const_mults[idx]
            lin_coeffs[idx] = mults
            scale[dst] = out_scale
            bound[dst] = b
        if bound[dst] >= _INT64_BOUND:
            return None

    ptr = [0]
    coeffs: list[int] = []
    regs: list[int] = []
    cidx_list = []
    for li, (terms, cidx) in enumerate(program.lin_specs):
        coeffs.extend(lin_coeffs[li])
        regs.extend(r for _, r in terms)
        ptr.append(len(coeffs))
        cidx_list.append(cidx)

    flat = lambda rows: [v for row in rows for v in row]
    return (
        aff_mults,
        ptr,
        coeffs,
        regs,
        cidx_list,
        const_mults,
        flat(bt_rows),
        flat(lam_rows),
        flat(mu_rows),
        flat(sv_rows),
        flat(mat_rows),
        flat(const_rows),
    )


def _run_compiled(program: Program, marshalled, p: int) -> Optional[int]:
    (aff_mults, ptr, coeffs, regs, cidx, cmult, bt, lam, mu, sv, mats, consts) = marshalled
    n = program.n
    instr_flat = array("q")
    for instr in program.instrs:
        instr_flat.extend(instr)

    digit_sizes = array("q")
    for size in program.grid_sizes():
        digit_sizes.extend([size] * n)

    q = lambda xs: array("q", xs)
    result = _gridcore.run(
        instr_flat,
        q(aff_mults),
        q(ptr),
        q(coeffs),
        q(regs),
        q(cidx),
        q(cmult),
        q(bt),
        q(lam),
        q(mu),
        q(sv),
        q(mats),
        q(consts),
        digit_sizes,
        n,
        program.nvars,
        program.nregs,
        program.check,
        p,
    )
    return None if result < 0 else int(result)
