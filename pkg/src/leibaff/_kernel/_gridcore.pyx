# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid sweep for bracket programs.

Two exact arithmetic modes share one loop:

* ``p > 0``: arithmetic mod p on int64 residues; the caller only selects
  this mode when ``n^2 * p^3`` fits comfortably in int64, so accumulations
  between reductions cannot overflow.
* ``p == 0``: plain int64 integer arithmetic.  The caller clears rational
  denominators, rescales per-instruction multipliers accordingly, and
  certifies an upper bound below 2^62 for every intermediate value, so
  results are exact; anything larger never reaches this module.

All tables arrive flattened; strides are derived from the register
dimension ``n``.  Returns the flat index of the first failing grid point
(rightmost odometer digit fastest, matching ``itertools.product``), or -1
when the check register vanishes everywhere.
"""

from libc.stdlib cimport free, malloc


def run(
    long long[::1] instrs,          # ninstr * 5: op, dst, x, y, idx
    long long[::1] aff_mults,       # ninstr * 3: lam, mu, s multipliers
    long long[::1] lin_ptr,
    long long[::1] lin_coeff,
    long long[::1] lin_reg,
    long long[::1] lin_const_idx,
    long long[::1] lin_const_mult,
    long long[::1] bt,              # ndata * n^3
    long long[::1] lam,             # ndata * n^2
    long long[::1] mu,              # ndata * n^2
    long long[::1] sv,              # ndata * n
    long long[::1] mats,            # nmats * n^2
    long long[::1] consts,          # nconsts * n
    long long[::1] digit_sizes,     # nvars * n
    long long n_,
    long long nvars_,
    long long nregs_,
    long long check_,
    long long p_,
):
    cdef Py_ssize_t n = n_, nvars = nvars_, nregs = nregs_, check = check_
    cdef long long p = p_
    cdef Py_ssize_t ninstr = instrs.shape[0] // 5
    cdef Py_ssize_t ndigits = nvars * n
    cdef Py_ssize_t n2 = n * n, n3 = n * n * n
    cdef Py_ssize_t i, j, k, pos, t, ii
    cdef long long op, dst, x, y, idx, cbase
    cdef long long acc, wl, wm, xi, yj
    cdef long long flat = 0
    cdef long long total = 1
    cdef bint failed

    for pos in range(ndigits):
        total *= digit_sizes[pos]

    cdef long long* regs = <long long*> malloc(nregs * n * sizeof(long long))
    cdef long long* digits = <long long*> malloc(ndigits * sizeof(long long))
    if regs == NULL or digits == NULL:
        if regs != NULL:
            free(regs)
        if digits != NULL:
            free(digits)
        raise MemoryError()

    for pos in range(nregs * n):
        regs[pos] = 0
    for pos in range(ndigits):
        digits[pos] = 0

    try:
        while True:
            for ii in range(ninstr):
                op = instrs[5 * ii]
                dst = instrs[5 * ii + 1]
                x = instrs[5 * ii + 2]
                y = instrs[5 * ii + 3]
                idx = instrs[5 * ii + 4]
                if op == 0 or op == 1:  # AFF / BIL
                    for k in range(n):
                        acc = 0
                        for i in range(n):
                            xi = regs[x * n + i]
                            if xi == 0:
                                continue
                            for j in range(n):
                                yj = regs[y * n + j]
                                if yj != 0:
                                    acc += bt[idx * n3 + (i * n + j) * n + k] * xi * yj
                            if p:
                                acc %= p
                        if op == 0:
                            wl = 0
                            wm = 0
                            for j in range(n):
                                wl += lam[idx * n2 + k * n + j] * regs[x * n + j]
                                wm += mu[idx * n2 + k * n + j] * regs[y * n + j]
                            if p:
                                acc = (acc + wl % p * aff_mults[3 * ii]
                                       + wm % p * aff_mults[3 * ii + 1]
                                       + sv[idx * n + k] * aff_mults[3 * ii + 2]) % p
                            else:
                                acc = (acc + wl * aff_mults[3 * ii]
                                       + wm * aff_mults[3 * ii + 1]
                                       + sv[idx * n + k] * aff_mults[3 * ii + 2])
                        regs[dst * n + k] = acc
                elif op == 2:  # MATV
                    for k in range(n):
                        acc = 0
                        for j in range(n):
                            acc += mats[idx * n2 + k * n + j] * regs[x * n + j]
                        regs[dst * n + k] = acc % p if p else acc
                else:  # LIN
                    cbase = lin_const_idx[idx]
                    for k in range(n):
                        if cbase >= 0:
                            acc = consts[cbase * n + k] * lin_const_mult[idx]
                        else:
                            acc = 0
                        for t in range(lin_ptr[idx], lin_ptr[idx + 1]):
                            acc += lin_coeff[t] * regs[lin_reg[t] * n + k]
                        regs[dst * n + k] = acc % p if p else acc

            failed = False
            for k in range(n):
                if regs[check * n + k] != 0:
                    failed = True
                    break
            if failed:
                return flat

            flat += 1
            if flat >= total:
                return -1
            pos = ndigits - 1
            while True:
                digits[pos] += 1
                if digits[pos] < digit_sizes[pos]:
                    regs[pos] = digits[pos]
                    break
                digits[pos] = 0
                regs[pos] = 0
                pos -= 1
    finally:
        free(regs)
        free(digits)
