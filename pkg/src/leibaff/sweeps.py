"""Exhaustive classification sweeps over prime fields.

The homogeneous and Lie-type condition systems are solved by linear
algebra instead of raw enumeration: the constraints that are linear in one
block of unknowns are solved first (`solve_linear` on the stacked
coefficient matrix), and only the resulting affine solution spaces are
enumerated.  Every candidate that survives is re-verified against the full
condition system, so the output is the exact solution set.

Data travel through this module as flat residue tuples
``(lam_flat, mu_flat, s)`` (row-major) to keep the enumeration loops
cheap; conversion to :class:`BiAffineBracket` happens only at the edges.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator, Optional

from .affgebra import (
    BiAffineBracket,
    conditions_homogeneous,
    conditions_lie_type,
    is_derivative,
)
from .exactmath import (
    FieldSpec,
    LinearSolution,
    Mat,
    Subspace,
    Vec,
    kernel_of,
    solve_linear,
)
from .leibalg import LeibnizAlgebra
from .morphism import is_leibniz_morphism

__all__ = [
    "RawDatum",
    "automorphism_group",
    "datum_to_bracket",
    "enumerate_affine_space",
    "general_data",
    "homogeneous_data",
    "lie_type_data",
    "orbit_partition",
    "transform_datum",
]

RawDatum = tuple  # (lam_flat, mu_flat, s_tuple)


def datum_to_bracket(L: LeibnizAlgebra, datum: RawDatum) -> BiAffineBracket:
    lam_flat, mu_flat, s = datum
    n = L.dim
    to_rows = lambda flat: tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))
    return BiAffineBracket(
        L.field, n, L.c, Mat(L.field, to_rows(lam_flat)), Mat(L.field, to_rows(mu_flat)), Vec(L.field, tuple(s))
    )


def bracket_to_datum(K: BiAffineBracket) -> RawDatum:
    lam = tuple(v for row in K.lam.rows for v in row)
    mu = tuple(v for row in K.mu.rows for v in row)
    return (lam, mu, tuple(K.s.entries))


def enumerate_affine_space(
    field: FieldSpec, particular: Vec, kernel: Subspace
) -> Iterator[tuple]:
    """All points of particular + span(kernel) over GF(p), as tuples.

    Walks a p-ary odometer over the kernel coefficients, updating the
    current point incrementally (rolling a digit from p-1 to 0 adds the
    basis vector once more, since (p-1)v = -v)."""
    p = field.p
    n = particular.dim
    current = list(particular.entries)
    yield tuple(current)
    k = kernel.dim
    if k == 0:
        return
    basis = [list(b.entries) for b in kernel.basis]
    # delta[j] = v_j + sum_{i<j} v_i (mod p): the net update when digit j
    # increments after digits below it roll over.
    deltas = []
    acc = [0] * n
    for j in range(k):
        delta = [(basis[j][t] + acc[t]) % p for t in range(n)]
        deltas.append(delta)
        acc = [(acc[t] + basis[j][t]) % p for t in range(n)]
    digits = [0] * k
    total = p**k
    for _ in range(total - 1):
        pos = k - 1
        while digits[pos] == p - 1:
            digits[pos] = 0
            pos -= 1
        digits[pos] += 1
        delta = deltas[k - 1 - pos]
        for t in range(n):
            current[t] = (current[t] + delta[t]) % p
        yield tuple(current)


def _grid_vectors(field: FieldSpec, n: int, degree: int) -> list[tuple]:
    size = degree + 1
    if field.kind == "GF" and field.p <= degree:
        size = field.p
    pts = list(range(size))
    return [tuple(c) for c in itertools.product(pts, repeat=n)]


# ---------------------------------------------------------------------------
# homogeneous sweeps
# ---------------------------------------------------------------------------


def _mu_kernel(L: LeibnizAlgebra) -> Subspace:
    """Solutions of [mu(a), b] - [mu(b), a] = mu([a, b]) (linear in mu)."""
    F, n, c = L.field, L.dim, L.c
    rows = []
    for i in range(n):
        for j in range(n):
            for out in range(n):
                coeff = [F.zero] * (n * n)
                for m in range(n):
                    coeff[m * n + i] = F.add(coeff[m * n + i], c[m][j][out])
                    coeff[m * n + j] = F.sub(coeff[m * n + j], c[m][i][out])
                    coeff[out * n + m] = F.sub(coeff[out * n + m], c[i][j][m])
                rows.append(tuple(coeff))
    return kernel_of(Mat(F, tuple(rows)))


def _lam_s_solution(L: LeibnizAlgebra, mu_flat: tuple) -> Optional[LinearSolution]:
    """For fixed mu: the affine space of (lam, s) satisfying the first and
    third homogeneous conditions (both linear once mu is pinned)."""
    F, n, c = L.field, L.dim, L.c
    N = n * n + n
    rows = []
    rhs = []
    # [lam(e_i), e_j] - [e_i, mu(e_j)] = lam([e_i, e_j])
    for i in range(n):
        for j in range(n):
            for out in range(n):
                coeff = [F.zero] * N
                const = F.zero
                for m in range(n):
                    coeff[m * n + i] = F.add(coeff[m * n + i], c[m][j][out])
                    coeff[out * n + m] = F.sub(coeff[out * n + m], c[i][j][m])
                    const = F.add(const, F.mul(mu_flat[m * n + j], c[i][m][out]))
                rows.append(tuple(coeff))
                rhs.append(const)
    # [s, e_i] + mu(e_i) = mu^2(e_i) + lam(mu(e_i))
    mu_sq = [
        [
            sum(mu_flat[k * n + m] * mu_flat[m * n + i] for m in range(n)) % F.p
            for i in range(n)
        ]
        for k in range(n)
    ]
    for i in range(n):
        for out in range(n):
            coeff = [F.zero] * N
            const = F.sub(F.coerce(mu_sq[out][i]), mu_flat[out * n + i])
            for m in range(n):
                coeff[n * n + m] = F.add(coeff[n * n + m], c[m][i][out])
                coeff[out * n + m] = F.sub(coeff[out * n + m], mu_flat[m * n + i])
            rows.append(tuple(coeff))
            rhs.append(const)
    return solve_linear(Mat(F, tuple(rows)), Vec(F, tuple(rhs)))


def homogeneous_data(L: LeibnizAlgebra, shard: tuple = (0, 1)) -> Iterator[RawDatum]:
    """Every (lam, mu, s) making the fibre a homogeneous datum, exactly.

    Enumerates the linear solution space of the mu-condition, then for each
    mu the linear (lam, s) space; the conditions are equivalent to the
    homogeneous identity, so no further filtering is required (the
    acceptance suite cross-checks against the grid classifier anyway).

    ``shard=(k, m)`` keeps every m-th mu point starting at k, partitioning
    the sweep across workers without overlap."""
    if L.field.kind != "GF":
        raise ValueError("exhaustive sweeps need a finite field")
    F, n = L.field, L.dim
    which, nshards = shard
    mu_kernel = _mu_kernel(L)
    for i, mu_flat in enumerate(enumerate_affine_space(F, Vec.zero(F, n * n), mu_kernel)):
        if i % nshards != which:
            continue
        sol = _lam_s_solution(L, mu_flat)
        if sol is None:
            continue
        for point in enumerate_affine_space(F, sol.particular, sol.kernel):
            yield (tuple(point[: n * n]), mu_flat, tuple(point[n * n :]))


# ---------------------------------------------------------------------------
# Lie-type sweeps
# ---------------------------------------------------------------------------


def _lam_mu_space(L: LeibnizAlgebra) -> Optional[LinearSolution]:
    """The (lam, mu) constraints of the Lie-type system that are linear:
    the mixed condition on (a, c) and the quadratic-in-a condition,
    evaluated over a spanning grid."""
    F, n, c = L.field, L.dim, L.c
    N = 2 * n * n
    rows = []
    rhs = []

    def bracket(x, y):
        out = [F.zero] * n
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if y[j] == 0:
                    continue
                w = F.mul(x[i], y[j])
                for k in range(n):
                    if c[i][j][k] != 0:
                        out[k] = F.add(out[k], F.mul(w, c[i][j][k]))
        return out

    # lam([e_i,e_j]) + [e_i, mu(e_j)] - [lam(e_i), e_j] = 0
    for i in range(n):
        for j in range(n):
            for out in range(n):
                coeff = [F.zero] * N
                for m in range(n):
                    coeff[out * n + m] = F.add(coeff[out * n + m], c[i][j][m])
                    coeff[n * n + m * n + j] = F.add(coeff[n * n + m * n + j], c[i][m][out])
                    coeff[m * n + i] = F.sub(coeff[m * n + i], c[m][j][out])
                rows.append(tuple(coeff))
                rhs.append(F.zero)
    # [[a,a],b] + [mu(a),b] - [a,lam(b)] + lam([a,b]) = 0, a over a
    # degree-2 grid, b over the basis
    for a in _grid_vectors(F, n, 2):
        av = [F.coerce(x) for x in a]
        aa = bracket(av, av)
        for j in range(n):
            ej = [F.one if t == j else F.zero for t in range(n)]
            aej = bracket(av, ej)
            for out in range(n):
                coeff = [F.zero] * N
                const = F.zero
                # [[a,a],b]
                for m in range(n):
                    const = F.add(const, F.mul(aa[m], c[m][j][out]))
                # [mu(a), b]: mu[m][t] a_t c[m][j][out]
                for m in range(n):
                    for t in range(n):
                        coeff[n * n + m * n + t] = F.add(
                            coeff[n * n + m * n + t], F.mul(av[t], c[m][j][out])
                        )
                # -[a, lam(b)]: lam[m][j] [a, e_m]
                for m in range(n):
                    em = [F.one if t == m else F.zero for t in range(n)]
                    a_em = bracket(av, em)
                    coeff[m * n + j] = F.sub(coeff[m * n + j], a_em[out])
                # lam([a,b])
                for m in range(n):
                    coeff[out * n + m] = F.add(coeff[out * n + m], aej[m])
                rows.append(tuple(coeff))
                rhs.append(F.neg(const))
    return solve_linear(Mat(F, tuple(rows)), Vec(F, tuple(rhs)))


def _s_space_lie(L: LeibnizAlgebra, lam_flat: tuple, mu_flat: tuple) -> Optional[LinearSolution]:
    """For fixed (lam, mu): the linear-in-s part of the Lie-type system.

    Works on raw residue tuples; the s-coefficient of every condition is a
    pair of brackets against a basis vector, so rows come cheap, and the
    s-free parts of the single-variable conditions are checked before the
    expensive mixed condition is expanded."""
    F, n = L.field, L.dim
    p = F.p
    c = L.c

    def br(x, y):
        out = [0] * n
        for i in range(n):
            xi = x[i]
            if xi:
                ci = c[i]
                for j in range(n):
                    yj = y[j]
                    if yj:
                        w = xi * yj
                        row = ci[j]
                        for k in range(n):
                            if row[k]:
                                out[k] = (out[k] + w * row[k]) % p
        return out

    def mv(mflat, x):
        return [sum(mflat[k * n + j] * x[j] for j in range(n)) % p for k in range(n)]

    def addv(*vs):
        return [sum(v[k] for v in vs) % p for k in range(n)]

    def subv(a, b):
        return [(a[k] - b[k]) % p for k in range(n)]

    units = [tuple(1 if t == k else 0 for t in range(n)) for k in range(n)]
    rows: list = []
    rhs: list = []

    def add_rows(base, scols):
        # base + sum_k s_k scols[k] = 0
        for out in range(n):
            rows.append(tuple(col[out] for col in scols))
            rhs.append((-base[out]) % p)

    grid3 = _grid_vectors(F, n, 3)
    grid2 = _grid_vectors(F, n, 2)

    for a in grid3:
        la, ma, aa = mv(lam_flat, a), mv(mu_flat, a), br(a, a)
        base = subv(aa, addv(br(aa, a), br(la, a), br(ma, a)))
        add_rows(base, [subv([0] * n, addv(br(u, a), br(a, u))) for u in units])

        lb, bb = la, aa  # same point doubles as the second condition's b
        base_c = subv(addv(br(lb, lb)), addv(br(bb, a), br(lb, a), br(ma, a), mv(lam_flat, bb)))
        add_rows(base_c, [addv(br(lb, u), br(u, lb)) for u in units])

        mc = ma
        base_d = subv(br(mc, mc), addv(br(bb, a), br(la, a), br(mc, a)))
        add_rows(base_d, [addv(br(mc, u), br(u, mc)) for u in units])

    partial = solve_linear(
        Mat(F, tuple(rows)), Vec(F, tuple(rhs))
    )
    if partial is None:
        return None

    for b in grid2:
        lb, mb = mv(lam_flat, b), mv(mu_flat, b)
        for cpt in grid2:
            bc = br(b, cpt)
            mc, lc = mv(mu_flat, cpt), mv(lam_flat, cpt)
            base = addv(
                br(bc, bc),
                br(lb, bc),
                br(mc, bc),
                br(bc, lb),
                br(bc, mc),
                br(lb, mc),
                br(mc, lb),
                mv(lam_flat, bc),
                br(br(cpt, cpt), b),
                br(lc, b),
                br(mb, cpt),
            )
            add_rows(base, [addv(br(u, bc), br(bc, u)) for u in units])
    return solve_linear(Mat(F, tuple(rows)), Vec(F, tuple(rhs)))


def lie_type_data(L: LeibnizAlgebra, shard: tuple = (0, 1)) -> list[RawDatum]:
    """Every (lam, mu, s) satisfying all seven Lie-type conditions.

    Pruned enumeration: the linear subsystem cuts the (lam, mu) space, the
    linear-in-s subsystem cuts s, the quadratic [s,s] = 0 filters, and the
    survivors are confirmed against the full condition system.  ``shard``
    partitions the (lam, mu) candidates as in :func:`homogeneous_data`."""
    if L.field.kind != "GF":
        raise ValueError("exhaustive sweeps need a finite field")
    F, n = L.field, L.dim
    which, nshards = shard
    lam_mu = _lam_mu_space(L)
    if lam_mu is None:
        return []
    out = []
    for i, lm in enumerate(enumerate_affine_space(F, lam_mu.particular, lam_mu.kernel)):
        if i % nshards != which:
            continue
        lam_flat, mu_flat = tuple(lm[: n * n]), tuple(lm[n * n :])
        s_space = _s_space_lie(L, lam_flat, mu_flat)
        if s_space is None:
            continue
        for s in enumerate_affine_space(F, s_space.particular, s_space.kernel):
            sv = Vec(F, tuple(s))
            if not L.bracket(sv, sv).is_zero():
                continue
            datum = (lam_flat, mu_flat, tuple(s))
            K = datum_to_bracket(L, datum)
            if all(conditions_lie_type(K).values()):
                out.append(datum)
    return out


# ---------------------------------------------------------------------------
# generic sweeps and orbits
# ---------------------------------------------------------------------------


def general_data(
    L: LeibnizAlgebra, max_candidates: int = 10**7, shard: tuple = (0, 1)
) -> Iterator[RawDatum]:
    """Every (lam, mu, s): by the decomposition theorem each one is an
    affgebra datum over a Leibniz fibre, so there is nothing to solve."""
    if L.field.kind != "GF":
        raise ValueError("exhaustive sweeps need a finite field")
    F, n = L.field, L.dim
    which, nshards = shard
    total = F.p ** (2 * n * n + n)
    if total > max_candidates:
        raise ValueError(f"sweep of {total} candidates exceeds the cap {max_candidates}")
    space = itertools.product(range(F.p), repeat=2 * n * n + n)
    for i, flat in enumerate(space):
        if i % nshards != which:
            continue
        yield (flat[: n * n], flat[n * n : 2 * n * n], flat[2 * n * n :])


def derivative_data(L: LeibnizAlgebra) -> Iterator[RawDatum]:
    """Derivative data are homogeneous, so filter the homogeneous sweep."""
    for datum in homogeneous_data(L):
        if is_derivative(datum_to_bracket(L, datum)):
            yield datum


def automorphism_group(L: LeibnizAlgebra, max_candidates: int = 10**6) -> list[Mat]:
    """All Leibniz-algebra automorphisms over a finite field, by exhaustive
    GL filter (row-major lexicographic order)."""
    F, n = L.field, L.dim
    if F.kind != "GF":
        raise ValueError("enumeration needs a finite field")
    if F.p ** (n * n) > max_candidates:
        raise ValueError("automorphism enumeration exceeds the cap")
    out = []
    for flat in itertools.product(range(F.p), repeat=n * n):
        psi = Mat(F, tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n)))
        if psi.is_invertible() and is_leibniz_morphism(L, L, psi):
            out.append(psi)
    return out


def transform_datum(L: LeibnizAlgebra, datum: RawDatum, psi: Mat, psi_inv: Mat, q: Vec) -> RawDatum:
    """The datum isomorphic to the given one through (psi, q); with psi an
    automorphism of the fibre this is the full isomorphism group action."""
    F, n = L.field, L.dim
    lam_flat, mu_flat, s = datum
    rows = lambda flat: tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))
    lam = Mat(F, rows(lam_flat))
    mu = Mat(F, rows(mu_flat))
    sv = Vec(F, tuple(s))
    lam2 = psi @ (lam - L.ad_right(q)) @ psi_inv
    mu2 = psi @ (mu - L.ad_left(q)) @ psi_inv
    s2 = psi @ (sv - (lam + mu) @ q + L.bracket(q, q) + q)
    return (
        tuple(v for row in lam2.rows for v in row),
        tuple(v for row in mu2.rows for v in row),
        tuple(s2.entries),
    )


def orbit_partition(
    L: LeibnizAlgebra, data: list[RawDatum], max_candidates: int = 10**6
) -> list[list[RawDatum]]:
    """Partition of the data into isomorphism orbits under the action of
    Aut(fibre) x translations.  Deterministic: orbits are listed by their
    lexicographically smallest member, members sorted."""
    F, n = L.field, L.dim
    auts = automorphism_group(L, max_candidates=max_candidates)
    transforms = [(psi, psi.inverse()) for psi in auts]
    qs = [Vec(F, flat) for flat in itertools.product(range(F.p), repeat=n)]
    index = {datum: i for i, datum in enumerate(data)}
    seen = [False] * len(data)
    orbits = []
    for start in sorted(index):
        if seen[index[start]]:
            continue
        orbit = []
        stack = [start]
        seen[index[start]] = True
        while stack:
            cur = stack.pop()
            orbit.append(cur)
            for psi, psi_inv in transforms:
                for q in qs:
                    img = transform_datum(L, cur, psi, psi_inv, q)
                    pos = index.get(img)
                    if pos is not None and not seen[pos]:
                        seen[pos] = True
                        stack.append(img)
        orbits.append(sorted(orbit))
    orbits.sort(key=lambda orb: orb[0])
    return orbits
