"""Homomorphisms, isomorphisms and subobjects of affgebra data.

An affine map ``phi(a) = psi(a) + q'`` carries one datum to another exactly
when its linear part ``psi`` preserves the fibre brackets and the
(sign-heavy) compatibility conditions on ``(lam, mu, s)`` hold.  Those
condition systems are primary here, but every verification also runs the
direct bracket-preservation check on a grid; a disagreement raises
immediately instead of returning a guess.

The finite-field search enumerates matrices in row-major digit order and
offsets afterwards, so the witness it reports is the lexicographic minimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from . import _kernel
from ._kernel import ProgramBuilder
from .affine import AffineMapData
from .exactmath import (
    DimensionMismatchError,
    FieldMismatchError,
    FieldSpec,
    Mat,
    Subspace,
    Vec,
)
from .affgebra import BiAffineBracket, check_general_conditions, is_affine_leibniz
from .leibalg import LeibnizAlgebra

__all__ = [
    "OracleDisagreement",
    "SearchReport",
    "automorphism_family",
    "induced_subaffgebra",
    "is_affgebra_hom",
    "is_affgebra_iso",
    "is_leibniz_morphism",
    "is_subaffgebra",
    "iso_image",
    "search_iso",
]


class OracleDisagreement(AssertionError):
    """Condition system and direct grid check returned different verdicts."""


def is_leibniz_morphism(L: LeibnizAlgebra, M: LeibnizAlgebra, psi: Mat) -> bool:
    """psi([a,b]) = [psi(a), psi(b)] on basis pairs."""
    if L.field != M.field:
        raise FieldMismatchError("algebras over different fields")
    if psi.ncols != L.dim or psi.nrows != M.dim:
        raise DimensionMismatchError("morphism matrix has the wrong shape")
    for ei in L.basis():
        for ej in L.basis():
            if psi @ L.bracket(ei, ej) != M.bracket(psi @ ei, psi @ ej):
                return False
    return True


def _hom_conditions(K: BiAffineBracket, K2: BiAffineBracket, psi: Mat, q2: Vec) -> bool:
    """psi(s) = s' + (lam'+mu')(q') + [q',q']' - q';
    psi mu = [q',-]' psi + mu' psi;  psi lam = ([-,q']' + lam') psi."""
    L2 = K2.fibre_algebra()
    cond_a = psi @ K.s == K2.s + (K2.lam + K2.mu) @ q2 + L2.bracket(q2, q2) - q2
    cond_b = psi @ K.mu == (L2.ad_left(q2) + K2.mu) @ psi
    cond_c = psi @ K.lam == (L2.ad_right(q2) + K2.lam) @ psi
    return cond_a and cond_b and cond_c


def _preserves_bracket_on_grid(K: BiAffineBracket, K2: BiAffineBracket, phi: AffineMapData) -> bool:
    """phi({a,b}) = {phi(a), phi(b)}' on a degree-1 grid (same dimension)."""
    bld = ProgramBuilder(K.field, K.dim, (1, 1))
    d0 = bld.add_datum(K.B, K.lam, K.mu, K.s)
    d1 = bld.add_datum(K2.B, K2.lam, K2.mu, K2.s)
    m = bld.add_mat(phi.matrix)
    off = bld.add_const(phi.offset)
    a, b = 0, 1
    fa = bld.lin([(1, bld.matv(m, a))], const=off)
    fb = bld.lin([(1, bld.matv(m, b))], const=off)
    lhs = bld.lin([(1, bld.matv(m, bld.aff(a, b, d0)))], const=off)
    return _kernel.vanishes(bld.finish(bld.sub(lhs, bld.aff(fa, fb, d1))))


def is_affgebra_hom(K: BiAffineBracket, K2: BiAffineBracket, phi: AffineMapData) -> bool:
    """Whether ``phi`` carries K to K2 as affgebra data.

    Decided through the condition system on ``(psi, q') = (linear part,
    phi(0))`` and cross-checked against direct bracket preservation when
    the dimensions admit the grid check.
    """
    if K.field != K2.field or phi.field != K.field:
        raise FieldMismatchError("mixed fields")
    if phi.source_dim != K.dim or phi.target_dim != K2.dim:
        raise DimensionMismatchError("map shape does not match the data")
    psi, q2 = phi.matrix, phi.offset
    verdict = is_leibniz_morphism(K.fibre_algebra(), K2.fibre_algebra(), psi) and _hom_conditions(
        K, K2, psi, q2
    )
    if K.dim == K2.dim:
        direct = _preserves_bracket_on_grid(K, K2, phi)
        if direct != verdict:
            raise OracleDisagreement(
                f"morphism conditions say {verdict} but the grid check says {direct}"
            )
    return verdict


def _iso_conditions(K: BiAffineBracket, K2: BiAffineBracket, psi: Mat, q: Vec) -> bool:
    """s' = psi(s - (lam+mu)(q) + [q,q] + q);  mu' = psi(mu - [q,-])psi^-1;
    lam' = psi(lam - [-,q])psi^-1."""
    L = K.fibre_algebra()
    psi_inv = psi.inverse()
    cond_a = K2.s == psi @ (K.s - (K.lam + K.mu) @ q + L.bracket(q, q) + q)
    cond_b = K2.mu == psi @ (K.mu - L.ad_left(q)) @ psi_inv
    cond_c = K2.lam == psi @ (K.lam - L.ad_right(q)) @ psi_inv
    return cond_a and cond_b and cond_c


def is_affgebra_iso(K: BiAffineBracket, K2: BiAffineBracket, psi: Mat, q: Vec) -> bool:
    """Whether ``a -> psi(a) + psi(q)`` is an isomorphism of the data."""
    if K.dim != K2.dim:
        raise DimensionMismatchError("isomorphic data must share a dimension")
    if not psi.is_invertible():
        raise ValueError("psi must be invertible")
    verdict = is_leibniz_morphism(K.fibre_algebra(), K2.fibre_algebra(), psi) and _iso_conditions(
        K, K2, psi, q
    )
    direct = _preserves_bracket_on_grid(K, K2, AffineMapData(psi, psi @ q))
    if direct != verdict:
        raise OracleDisagreement(
            f"isomorphism conditions say {verdict} but the grid check says {direct}"
        )
    return verdict


def iso_image(K: BiAffineBracket, psi: Mat, q: Vec) -> BiAffineBracket:
    """The datum isomorphic to K through (psi, q): bilinear part conjugated
    by psi, affine parts transported by the isomorphism formulas."""
    L = K.fibre_algebra()
    F, n = K.field, K.dim
    psi_inv = psi.inverse()
    units = [Vec.unit(F, n, i) for i in range(n)]
    cols = [[(psi @ L.bracket(psi_inv @ ei, psi_inv @ ej)) for ej in units] for ei in units]
    B2 = tuple(tuple(tuple(cols[i][j].entries) for j in range(n)) for i in range(n))
    lam2 = psi @ (K.lam - L.ad_right(q)) @ psi_inv
    mu2 = psi @ (K.mu - L.ad_left(q)) @ psi_inv
    s2 = psi @ (K.s - (K.lam + K.mu) @ q + L.bracket(q, q) + q)
    return BiAffineBracket(F, n, B2, lam2, mu2, s2)


# ---------------------------------------------------------------------------
# exhaustive search over finite fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchReport:
    found: bool
    psi: Optional[Mat]
    q: Optional[Vec]
    checked: int

    def to_json(self) -> dict:
        out = {"found": self.found, "checked": self.checked}
        out["witness"] = (
            {"psi": self.psi.to_json(), "q": self.q.to_json()} if self.found else None
        )
        return out


def _matrices_lex(field: FieldSpec, n: int) -> Iterator[Mat]:
    for flat in itertools.product(range(field.p), repeat=n * n):
        yield Mat(field, tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n)))


def _vectors_lex(field: FieldSpec, n: int) -> Iterator[Vec]:
    for flat in itertools.product(range(field.p), repeat=n):
        yield Vec(field, flat)


def _fibre_invariants(L: LeibnizAlgebra) -> tuple:
    return (L.dim, L.leib_ideal().dim, L.left_center().dim, L.right_center().dim)


def search_iso(
    K: BiAffineBracket, K2: BiAffineBracket, max_candidates: int = 10**7
) -> SearchReport:
    """Exhaustive isomorphism search over a prime field.

    Enumerates invertible psi (row-major digit order) and offsets q; the
    first witness found is the lexicographic minimum.  An absent witness
    means the data are not isomorphic, by completeness of the enumeration.
    Raises over the rationals, where no exhaustive search exists.
    """
    if K.field.kind != "GF":
        raise ValueError("exhaustive search needs a finite field; use is_affgebra_iso to verify")
    if K.field != K2.field:
        raise FieldMismatchError("mixed fields")
    if K.dim != K2.dim:
        return SearchReport(False, None, None, 0)

    L, L2 = K.fibre_algebra(), K2.fibre_algebra()
    checked = 0
    # Non-isomorphic fibres cannot carry an isomorphism of the data; these
    # invariants are cheap to compare and prune most mismatched pairs.
    if _fibre_invariants(L) != _fibre_invariants(L2):
        return SearchReport(False, None, None, 0)

    n, p = K.dim, K.field.p
    total = p ** (n * n + n)
    if total > max_candidates:
        raise ValueError(
            f"search space of {total} candidates exceeds the cap {max_candidates}"
        )
    for psi in _matrices_lex(K.field, n):
        if not psi.is_invertible():
            checked += p**n
            continue
        if not is_leibniz_morphism(L, L2, psi):
            checked += p**n
            continue
        for q in _vectors_lex(K.field, n):
            checked += 1
            if _iso_conditions(K, K2, psi, q):
                return SearchReport(True, psi, q, checked)
    return SearchReport(False, None, None, checked)


# ---------------------------------------------------------------------------
# subaffgebras
# ---------------------------------------------------------------------------


def _bracket_closed(L: LeibnizAlgebra, H: Subspace) -> bool:
    return all(H.contains(L.bracket(u, v)) for u in H.basis for v in H.basis)


def _subaffgebra_conditions(K: BiAffineBracket, a: Vec, H: Subspace) -> bool:
    L = K.fibre_algebra()
    const = L.bracket(a, a) - a + (K.lam + K.mu) @ a + K.s
    if not H.contains(const):
        return False
    for h in H.basis:
        if not H.contains(K.lam @ h + L.bracket(h, a)):
            return False
        if not H.contains(K.mu @ h + L.bracket(a, h)):
            return False
    return True


def _closure_on_grid(K: BiAffineBracket, a: Vec, H: Subspace) -> bool:
    """{a+u, a+v} - a stays in H for u, v on a degree-1 grid of H."""
    F = K.field
    pts = [F.grid_point(0), F.grid_point(1)]
    combos = list(itertools.product(pts, repeat=H.dim))
    vecs = []
    for coeffs in combos:
        v = Vec.zero(F, K.dim)
        for cf, h in zip(coeffs, H.basis):
            v = v + h.scaled(cf)
        vecs.append(v)
    return all(H.contains(K.eval(a + u, a + v) - a) for u in vecs for v in vecs)


def is_subaffgebra(K: BiAffineBracket, a: Vec, H: Subspace) -> bool:
    """Whether the affine subspace a + H is closed under the bracket.

    Primary check: H is a subalgebra of the fibre and the three
    compatibility conditions hold; cross-checked against direct closure of
    {a+H, a+H} inside a+H on a grid.
    """
    if not is_affine_leibniz(K):
        raise ValueError("subaffgebra test expects an affine-Leibniz bracket")
    L = K.fibre_algebra()
    verdict = _bracket_closed(L, H) and _subaffgebra_conditions(K, a, H)
    direct = _closure_on_grid(K, a, H)
    if direct != verdict:
        raise OracleDisagreement(
            f"subaffgebra conditions say {verdict} but direct closure says {direct}"
        )
    return verdict


def induced_subaffgebra(K: BiAffineBracket, a: Vec, H: Subspace) -> BiAffineBracket:
    """The datum induced on H-coordinates:
    (lam + [-,a], mu + [a,-], [a,a] - a + (lam+mu)(a) + s), restricted."""
    if not is_subaffgebra(K, a, H):
        raise ValueError("(a, H) is not a subaffgebra of the bracket")
    L = K.fibre_algebra()
    F, m = K.field, H.dim

    def coords(v: Vec) -> Vec:
        c = H.coordinates(v)
        if c is None:
            raise AssertionError("restriction left the subspace")
        return c

    B = tuple(
        tuple(tuple(coords(L.bracket(hi, hj)).entries) for hj in H.basis) for hi in H.basis
    )
    lam_cols = [coords(K.lam @ h + L.bracket(h, a)) for h in H.basis]
    mu_cols = [coords(K.mu @ h + L.bracket(a, h)) for h in H.basis]
    lam = Mat(F, tuple(zip(*(v.entries for v in lam_cols)))) if m else Mat.zero(F, 0, 0)
    mu = Mat(F, tuple(zip(*(v.entries for v in mu_cols)))) if m else Mat.zero(F, 0, 0)
    s = coords(L.bracket(a, a) - a + (K.lam + K.mu) @ a + K.s)
    return BiAffineBracket(F, m, B, lam, mu, s)


# ---------------------------------------------------------------------------
# automorphism families of the catalog fibres
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AutomorphismFamily:
    """A parametrized matrix template covering the automorphism group of a
    catalog fibre; ``build`` instantiates one member."""

    name: str
    fibre: str
    params: tuple
    constraints: str

    def build(self, field: FieldSpec, **bindings) -> Mat:
        vals = {k: field.coerce(v) for k, v in bindings.items()}
        missing = [pname for pname in self.params if pname not in vals]
        if missing:
            raise ValueError(f"unbound parameters: {missing}")
        theta = vals.get("theta", field.one)
        delta = vals.get("delta", field.zero)
        if field.is_zero(theta):
            raise ValueError("theta must be nonzero")
        zero, one = field.zero, field.one
        if self.fibre == "L2":
            return Mat(field, ((theta, delta), (zero, one)))
        if self.fibre == "L3":
            return Mat(field, ((theta, zero), (zero, one)))
        if self.fibre == "L4":
            return Mat(field, ((field.mul(theta, theta), delta), (zero, theta)))
        raise ValueError(f"no template for fibre {self.fibre}")

    def members(self, field: FieldSpec) -> Iterator[Mat]:
        """All members over a finite field."""
        if field.kind != "GF":
            raise ValueError("enumeration needs a finite field")
        thetas = [t for t in range(1, field.p)]
        deltas = list(range(field.p)) if "delta" in self.params else [0]
        for theta in thetas:
            for delta in deltas:
                yield self.build(field, theta=theta, delta=delta)


_AUTOMORPHISM_FAMILIES = {
    "L2": AutomorphismFamily("aut_L2", "L2", ("theta", "delta"), "theta != 0"),
    "L3": AutomorphismFamily("aut_L3", "L3", ("theta",), "theta != 0"),
    "L4": AutomorphismFamily("aut_L4", "L4", ("theta", "delta"), "theta != 0"),
}


def automorphism_family(fibre: str) -> AutomorphismFamily:
    try:
        return _AUTOMORPHISM_FAMILIES[fibre]
    except KeyError:
        raise ValueError(f"no automorphism template recorded for {fibre!r}") from None
