"""Bi-affine brackets on F^n, their Leibnizians, the seven general
decomposition conditions, and the typed classifiers (derivative,
homogeneous, Lie-type) together with the Lie-affgebra axioms and the
vector-valued-bracket correspondence.

A :class:`BiAffineBracket` is ``{a,b} = B(a,b) + lam(a) + mu(b) + s`` with
``B`` bilinear.  When ``B`` additionally satisfies the Leibniz rule the
bracket is an *affgebra datum*: the linearization at every point is a
Leibniz algebra with structure constants ``B``.

All typed classifiers are decided by evaluating the defining identity on a
finite grid with per-variable degree bounds (1 for the general and
derivative forms, 2 for homogeneous and affine antisymmetry, 3 for
Lie-type and the affine Jacobi identity); the named condition systems are
implemented separately, and the test suite asserts the equivalences rather
than assuming them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import _kernel
from ._kernel import ProgramBuilder
from .affine import AffineMapData
from .exactmath import (
    DimensionMismatchError,
    FieldMismatchError,
    FieldSpec,
    Mat,
    Vec,
    grid_scalars,
)
from .leibalg import LeibnizAlgebra, NotLeibnizError, _tensor_bracket, is_leibniz

__all__ = [
    "AssociativeAffgebra",
    "BiAffineBracket",
    "FibreDecomposition",
    "VectorValuedBracket",
    "check_general_conditions",
    "condition_report",
    "conditions_derivative",
    "conditions_homogeneous",
    "conditions_lie_type",
    "derivative_from_associative",
    "from_vector_valued",
    "generalized_derivation_holds",
    "is_affine_antisymmetric",
    "is_affine_leibniz",
    "is_derivative",
    "is_homogeneous",
    "is_lie_affgebra",
    "is_lie_type",
    "satisfies_affine_jacobi",
    "to_vector_valued",
]


def _coerce_tensor(field: FieldSpec, B):
    return tuple(tuple(tuple(field.coerce(v) for v in row) for row in plane) for plane in B)


@dataclass(frozen=True)
class BiAffineBracket:
    """{a,b} = B(a,b) + lam(a) + mu(b) + s over one field."""

    field: FieldSpec
    dim: int
    B: tuple
    lam: Mat
    mu: Mat
    s: Vec

    def __post_init__(self):
        n = self.dim
        if len(self.B) != n or any(len(p) != n or any(len(r) != n for r in p) for p in self.B):
            raise DimensionMismatchError("bilinear tensor must be dim x dim x dim")
        for m in (self.lam, self.mu):
            if m.nrows != n or m.ncols != n:
                raise DimensionMismatchError("lam and mu must be dim x dim")
        if self.s.dim != n:
            raise DimensionMismatchError("s must have length dim")
        if self.lam.field != self.field or self.mu.field != self.field or self.s.field != self.field:
            raise FieldMismatchError("components over different fields")

    @staticmethod
    def make(field: FieldSpec, B, lam, mu, s) -> "BiAffineBracket":
        return BiAffineBracket(
            field,
            len(B),
            _coerce_tensor(field, B),
            lam if isinstance(lam, Mat) else Mat.make(field, lam),
            mu if isinstance(mu, Mat) else Mat.make(field, mu),
            s if isinstance(s, Vec) else Vec.make(field, s),
        )

    @staticmethod
    def affgebra_datum(L: LeibnizAlgebra, lam, mu, s) -> "BiAffineBracket":
        """Datum with a validated Leibniz bilinear part (the fibre ``L``)."""
        return BiAffineBracket.make(L.field, L.c, lam, mu, s)

    @staticmethod
    def zero(field: FieldSpec, dim: int) -> "BiAffineBracket":
        z = field.zero
        B = tuple(tuple((z,) * dim for _ in range(dim)) for _ in range(dim))
        return BiAffineBracket(
            field, dim, B, Mat.zero(field, dim, dim), Mat.zero(field, dim, dim), Vec.zero(field, dim)
        )

    # -- evaluation --------------------------------------------------------------

    def bilinear(self, a: Vec, b: Vec) -> Vec:
        return _tensor_bracket(self.field, self.B, a, b)

    def eval(self, a: Vec, b: Vec) -> Vec:
        if a.dim != self.dim or b.dim != self.dim:
            raise DimensionMismatchError("bracket arguments of wrong length")
        return self.bilinear(a, b) + (self.lam @ a) + (self.mu @ b) + self.s

    def leibnizian(self, a: Vec, b: Vec, c: Vec) -> Vec:
        """{{a,c},b} - {{a,b},c} + {a,{b,c}} (tri-affine in a, b, c)."""
        e = self.eval
        return e(e(a, c), b) - e(e(a, b), c) + e(a, e(b, c))

    def shifted(self, o: Vec) -> "BiAffineBracket":
        """The bracket rewritten in coordinates centred at ``o``:
        {x,y}_o = {x+o, y+o} - o.  Same bilinear part; the affine parts pick
        up the multiplications by ``o``."""
        F, n = self.field, self.dim
        right = Mat(F, tuple(zip(*(self.bilinear(e, o).entries for e in _units(F, n)))))
        left = Mat(F, tuple(zip(*(self.bilinear(o, e).entries for e in _units(F, n)))))
        s = self.eval(o, o) - o
        return BiAffineBracket(F, n, self.B, self.lam + right, self.mu + left, s)

    def linearized_leibnizian(self, o: Vec, a: Vec, b: Vec, c: Vec) -> Vec:
        """The eight-term alternating combination of Leibnizian values,
        rebased at ``o``; returns a point, which equals ``o`` exactly when
        the linearization vanishes there."""
        K0 = self.shifted(o)
        lam0 = K0.leibnizian
        z = Vec.zero(self.field, self.dim)
        a0, b0, c0 = a - o, b - o, c - o
        total = (
            lam0(a0, b0, c0)
            - lam0(a0, b0, z)
            - lam0(a0, z, c0)
            - lam0(z, b0, c0)
            + lam0(a0, z, z)
            + lam0(z, b0, z)
            + lam0(z, z, c0)
            - lam0(z, z, z)
        )
        return total + o

    # -- fibres --------------------------------------------------------------------

    def fibre_algebra(self) -> LeibnizAlgebra:
        return LeibnizAlgebra(self.field, self.dim, self.B)

    def fibre_at(self, o: Vec) -> "FibreDecomposition":
        if not is_affine_leibniz(self):
            raise NotLeibnizError("bracket is not affine-Leibniz; fibres are undefined")
        K0 = self.shifted(o)
        return FibreDecomposition(K0.fibre_algebra(), K0.lam, K0.mu, K0.s)

    # -- serialization ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "field": self.field.spec_to_json(),
            "dim": self.dim,
            "B": [
                [[self.field.to_json(v) for v in row] for row in plane] for plane in self.B
            ],
            "lambda": self.lam.to_json(),
            "mu": self.mu.to_json(),
            "s": self.s.to_json(),
        }

    @staticmethod
    def from_json(obj) -> "BiAffineBracket":
        field = FieldSpec.spec_from_json(obj["field"])
        B = tuple(
            tuple(tuple(field.parse(v) for v in row) for row in plane) for plane in obj["B"]
        )
        K = BiAffineBracket(
            field,
            int(obj["dim"]),
            B,
            Mat.from_json(field, obj["lambda"]),
            Mat.from_json(field, obj["mu"]),
            Vec.from_json(field, obj["s"]),
        )
        return K


def _units(field: FieldSpec, n: int):
    return [Vec.unit(field, n, i) for i in range(n)]


@dataclass(frozen=True)
class FibreDecomposition:
    """Linearization data at a base point: the fibre Leibniz algebra and
    the (lam, mu, s) that rebuild the bracket in fibre coordinates."""

    algebra: LeibnizAlgebra
    lam: Mat
    mu: Mat
    s: Vec

    def rebuild(self) -> BiAffineBracket:
        return BiAffineBracket(
            self.algebra.field, self.algebra.dim, self.algebra.c, self.lam, self.mu, self.s
        )


# ---------------------------------------------------------------------------
# identity programs
# ---------------------------------------------------------------------------


def _builder(K: BiAffineBracket, degrees) -> tuple[ProgramBuilder, int]:
    bld = ProgramBuilder(K.field, K.dim, degrees)
    d = bld.add_datum(K.B, K.lam, K.mu, K.s)
    return bld, d


def _leibnizian_reg(bld: ProgramBuilder, a: int, b: int, c: int, d: int = 0) -> int:
    t1 = bld.aff(bld.aff(a, c, d), b, d)
    t2 = bld.aff(bld.aff(a, b, d), c, d)
    t3 = bld.aff(a, bld.aff(b, c, d), d)
    return bld.combine((1, t1), (-1, t2), (1, t3))


def _prog_lambda_tilde(K: BiAffineBracket):
    bld, d = _builder(K, (1, 1, 1))
    a, b, c = 0, 1, 2
    z = bld.zero()
    terms = [
        (1, _leibnizian_reg(bld, a, b, c, d)),
        (-1, _leibnizian_reg(bld, a, b, z, d)),
        (-1, _leibnizian_reg(bld, a, z, c, d)),
        (-1, _leibnizian_reg(bld, z, b, c, d)),
        (1, _leibnizian_reg(bld, a, z, z, d)),
        (1, _leibnizian_reg(bld, z, b, z, d)),
        (1, _leibnizian_reg(bld, z, z, c, d)),
        (-1, _leibnizian_reg(bld, z, z, z, d)),
    ]
    return bld.finish(bld.combine(*terms))


def _prog_derivative(K: BiAffineBracket):
    bld, d = _builder(K, (1, 1, 1))
    a, b, c = 0, 1, 2
    return bld.finish(bld.sub(_leibnizian_reg(bld, a, b, c, d), bld.aff(a, b, d)))


def _prog_homogeneous(K: BiAffineBracket):
    bld, d = _builder(K, (1, 2, 1))
    a, b, c = 0, 1, 2
    rhs = bld.aff(a, bld.aff(b, b, d), d)
    return bld.finish(bld.sub(_leibnizian_reg(bld, a, b, c, d), rhs))


def _prog_lie_type(K: BiAffineBracket):
    bld, d = _builder(K, (3, 3, 3))
    a, b, c = 0, 1, 2
    aa = bld.aff(a, a, d)
    bb = bld.aff(b, b, d)
    cc = bld.aff(c, c, d)
    bc = bld.aff(b, c, d)
    rhs = bld.combine(
        (1, aa),
        (-1, bld.aff(cc, c, d)),
        (1, bld.aff(bc, bc, d)),
        (-1, bld.aff(aa, a, d)),
        (1, bld.aff(cc, b, d)),
        (-1, bld.aff(bb, b, d)),
        (1, bld.aff(aa, b, d)),
    )
    return bld.finish(bld.sub(_leibnizian_reg(bld, a, b, c, d), rhs))


def _prog_antisymmetry(K: BiAffineBracket):
    bld, d = _builder(K, (2, 2))
    a, b = 0, 1
    return bld.finish(
        bld.combine(
            (1, bld.aff(a, b, d)),
            (-1, bld.aff(a, a, d)),
            (1, bld.aff(b, a, d)),
            (-1, bld.aff(b, b, d)),
        )
    )


def _prog_jacobi(K: BiAffineBracket):
    bld, d = _builder(K, (3, 3, 3))
    a, b, c = 0, 1, 2
    return bld.finish(
        bld.combine(
            (1, bld.aff(bld.aff(a, b, d), c, d)),
            (-1, bld.aff(bld.aff(a, a, d), a, d)),
            (1, bld.aff(bld.aff(b, c, d), a, d)),
            (-1, bld.aff(bld.aff(b, b, d), b, d)),
            (1, bld.aff(bld.aff(c, a, d), b, d)),
            (-1, bld.aff(bld.aff(c, c, d), c, d)),
        )
    )


def _prog_general_cross(K: BiAffineBracket, which: str):
    """The bilinear-cross conditions with the spectator variable ranging
    over the grid, so a trilinear defect of the bilinear part cannot hide."""
    bld, d = _builder(K, (1, 1, 1))
    a, b, c = 0, 1, 2
    z = bld.zero()
    lam = bld.add_mat(K.lam)
    mu = bld.add_mat(K.mu)
    L = lambda x, y, w: _leibnizian_reg(bld, x, y, w, d)
    if which == "e":
        lhs = bld.combine((1, L(a, b, c)), (-1, L(a, z, c)), (-1, L(z, b, c)), (1, L(z, z, c)))
        rhs = bld.combine(
            (1, bld.bil(bld.matv(lam, a), b, d)),
            (1, bld.bil(a, bld.matv(lam, b), d)),
            (-1, bld.matv(lam, bld.bil(a, b, d))),
        )
    elif which == "f":
        lhs = bld.combine((1, L(a, b, c)), (-1, L(a, b, z)), (-1, L(z, b, c)), (1, L(z, b, z)))
        rhs = bld.combine(
            (1, bld.matv(lam, bld.bil(a, c, d))),
            (1, bld.bil(a, bld.matv(mu, c), d)),
            (-1, bld.bil(bld.matv(lam, a), c, d)),
        )
    else:  # "g"
        lhs = bld.combine((1, L(a, b, c)), (-1, L(a, b, z)), (-1, L(a, z, c)), (1, L(a, z, z)))
        rhs = bld.combine(
            (1, bld.matv(mu, bld.bil(b, c, d))),
            (1, bld.bil(bld.matv(mu, c), b, d)),
            (-1, bld.bil(bld.matv(mu, b), c, d)),
        )
    return bld.finish(bld.sub(lhs, rhs))


def _prog_general_linear(K: BiAffineBracket, which: str):
    """Single-variable slices: the value of the Leibnizian along one axis
    against its stated closed form."""
    bld, d = _builder(K, (1,))
    x = 0
    z = bld.zero()
    sreg = bld.lin([], const=bld.add_const(K.s))
    L = lambda u, v, w: _leibnizian_reg(bld, u, v, w, d)
    base = L(z, z, z)
    if which == "b":
        lhs = bld.sub(L(x, z, z), base)
        rhs = bld.add(bld.bil(x, sreg, d), bld.matv(bld.add_mat(K.lam), x))
    elif which == "c":
        lhs = bld.sub(L(z, x, z), base)
        comm = bld.add_mat(K.mu @ K.lam - K.lam @ K.mu)
        rhs = bld.combine(
            (1, bld.matv(comm, x)),
            (1, bld.matv(bld.add_mat(K.mu), x)),
            (1, bld.bil(sreg, x, d)),
        )
    else:  # "d"
        lhs = bld.sub(L(z, z, x), base)
        m = bld.add_mat(K.mu @ K.mu - K.mu + K.lam @ K.mu)
        rhs = bld.sub(bld.matv(m, x), bld.bil(sreg, x, d))
    return bld.finish(bld.sub(lhs, rhs))


def _vanishes(program) -> bool:
    return _kernel.vanishes(program)


# ---------------------------------------------------------------------------
# classifiers
# ---------------------------------------------------------------------------


def is_affine_leibniz(K: BiAffineBracket) -> bool:
    """Whether every linearization is a Leibniz bracket; equivalent to the
    bilinear part satisfying the Leibniz rule (the grid-level vanishing of
    the rebased Leibnizian combination is kept as a test oracle)."""
    return is_leibniz(K.field, K.B)


def linearized_leibnizian_vanishes(K: BiAffineBracket) -> bool:
    """Grid-level oracle: the eight-term combination at the origin is zero
    on a degree-1 grid per variable."""
    return _vanishes(_prog_lambda_tilde(K))


def is_derivative(K: BiAffineBracket) -> bool:
    """Leibnizian equals {a,b} everywhere."""
    return _vanishes(_prog_derivative(K))


def is_homogeneous(K: BiAffineBracket) -> bool:
    """Leibnizian equals {a,{b,b}} everywhere."""
    return _vanishes(_prog_homogeneous(K))


def is_lie_type(K: BiAffineBracket) -> bool:
    """Leibnizian equals the seven-term antisymmetry-compatible form."""
    return _vanishes(_prog_lie_type(K))


def is_affine_antisymmetric(K: BiAffineBracket) -> bool:
    """<{a,b},{a,a},{b,a}> = {b,b} everywhere."""
    return _vanishes(_prog_antisymmetry(K))


def satisfies_affine_jacobi(K: BiAffineBracket) -> bool:
    return _vanishes(_prog_jacobi(K))


def is_lie_affgebra(K: BiAffineBracket) -> bool:
    return is_affine_antisymmetric(K) and satisfies_affine_jacobi(K)


def check_general_conditions(K: BiAffineBracket) -> dict:
    """The seven decomposition conditions of the general Leibnizian,
    reported separately (labels 3.5a..3.5g).

    The constant and single-variable slices (a-d) hold for every bi-affine
    bracket; the three cross conditions are checked with the spectator
    variable ranging over the grid, so the report is all-true exactly when
    the bilinear part is a Leibniz bracket.
    """
    z = Vec.zero(K.field, K.dim)
    lam000 = K.leibnizian(z, z, z)
    report = {"3.5a": lam000 == (K.mu @ K.s) + K.s}
    for label, which in (("3.5b", "b"), ("3.5c", "c"), ("3.5d", "d")):
        report[label] = _vanishes(_prog_general_linear(K, which))
    for label, which in (("3.5e", "e"), ("3.5f", "f"), ("3.5g", "g")):
        report[label] = _vanishes(_prog_general_cross(K, which))
    return report


# ---------------------------------------------------------------------------
# condition systems for the typed classifiers
# ---------------------------------------------------------------------------


def _basis_pairs(field, n):
    units = _units(field, n)
    return [(ei, ej) for ei in units for ej in units]


def conditions_derivative(K: BiAffineBracket) -> dict:
    """The seven derivative-type constraints, grouped as three labelled
    lines (4.4a: constant/linear block, 4.4b: quadratic block and the
    cross identity, 4.4c: the two mixed identities)."""
    F, n = K.field, K.dim
    br = K.bilinear
    lam, mu, s = K.lam, K.mu, K.s
    units = _units(F, n)
    zero = Vec.zero(F, n)

    mu_s = (mu @ s).is_zero()
    a_s = all(br(e, s).is_zero() for e in units)
    comm = mu @ lam - lam @ mu
    comm_s = all((comm @ e + br(s, e)).is_zero() for e in units)

    m = mu @ mu - mu + lam @ mu
    quad = all((m @ e - br(s, e)).is_zero() for e in units)
    cross = all(
        br(a, b) == br(lam @ a, b) + br(a, lam @ b) - lam @ br(a, b)
        for a, b in _basis_pairs(F, n)
    )

    mixed1 = all(
        (lam @ br(a, c) + br(a, mu @ c) - br(lam @ a, c)).is_zero()
        for a, c in _basis_pairs(F, n)
    )
    mixed2 = all(
        (mu @ br(b, c) + br(mu @ c, b) - br(mu @ b, c)).is_zero()
        for b, c in _basis_pairs(F, n)
    )

    return {"4.4a": mu_s and a_s and comm_s, "4.4b": quad and cross, "4.4c": mixed1 and mixed2}


def conditions_homogeneous(K: BiAffineBracket) -> dict:
    """[lam(a),b] - [a,mu(b)] = lam([a,b]);  [mu(a),b] - [mu(b),a] =
    mu([a,b]);  [s,a] + mu(a) = mu^2(a) + lam mu(a)."""
    F, n = K.field, K.dim
    br = K.bilinear
    lam, mu, s = K.lam, K.mu, K.s
    one = all(
        br(lam @ a, b) - br(a, mu @ b) == lam @ br(a, b) for a, b in _basis_pairs(F, n)
    )
    two = all(
        br(mu @ a, b) - br(mu @ b, a) == mu @ br(a, b) for a, b in _basis_pairs(F, n)
    )
    m = mu @ mu + lam @ mu - mu
    three = all(br(s, a) == m @ a for a in _units(F, n))
    return {"imp_Leib.1": one, "imp_Leib.2": two, "imp_Leib.3": three}


def _axis_grid(field, n, degree):
    size = degree + 1
    if field.kind == "GF" and field.p <= degree:
        size = field.p
    pts = grid_scalars(field, size)
    for coords in itertools.product(pts, repeat=n):
        yield Vec(field, coords)


def conditions_lie_type(K: BiAffineBracket) -> dict:
    """The seven Lie-type constraints (labels 5.2a..5.2g), evaluated on
    grids wide enough for their per-variable degrees."""
    F, n = K.field, K.dim
    br = K.bilinear
    lam, mu, s = K.lam, K.mu, K.s
    out = {}

    out["5.2a"] = br(s, s).is_zero()

    out["5.2b"] = all(
        (
            br(a, a)
            - br(br(a, a), a)
            - br(lam @ a, a)
            - br(mu @ a, a)
            - br(s, a)
            - br(a, s)
        ).is_zero()
        for a in _axis_grid(F, n, 3)
    )

    out["5.2c"] = all(
        (
            br(lam @ b, lam @ b)
            + br(lam @ b, s)
            + br(s, lam @ b)
            - br(br(b, b), b)
            - br(lam @ b, b)
            - br(mu @ b, b)
            - lam @ br(b, b)
        ).is_zero()
        for b in _axis_grid(F, n, 3)
    )

    out["5.2d"] = all(
        (
            -br(br(c, c), c)
            - br(lam @ c, c)
            - br(mu @ c, c)
            + br(mu @ c, mu @ c)
            + br(mu @ c, s)
            + br(s, mu @ c)
        ).is_zero()
        for c in _axis_grid(F, n, 3)
    )

    out["5.2e"] = all(
        (br(br(a, a), b) + br(mu @ a, b) - br(a, lam @ b) + lam @ br(a, b)).is_zero()
        for a in _axis_grid(F, n, 2)
        for b in _units(F, n)
    )

    out["5.2f"] = all(
        (lam @ br(a, c) + br(a, mu @ c) - br(lam @ a, c)).is_zero()
        for a, c in _basis_pairs(F, n)
    )

    def g_term(b, c):
        bc = br(b, c)
        return (
            br(bc, bc)
            + br(lam @ b, bc)
            + br(mu @ c, bc)
            + br(s, bc)
            + br(bc, lam @ b)
            + br(bc, mu @ c)
            + br(bc, s)
            + br(lam @ b, mu @ c)
            + br(mu @ c, lam @ b)
            + lam @ bc
            + br(br(c, c), b)
            + br(lam @ c, b)
            + br(mu @ b, c)
        )

    out["5.2g"] = all(
        g_term(b, c).is_zero() for b in _axis_grid(F, n, 2) for c in _axis_grid(F, n, 2)
    )
    return out


def generalized_derivation_holds(L: LeibnizAlgebra, lam: Mat, mu: Mat) -> bool:
    """lam([a,b]) = [lam(a),b] - [a,mu(b)]: the pair (lam, -mu, lam) acts
    as a generalized derivation of the fibre."""
    return all(
        lam @ L.bracket(a, b) == L.bracket(lam @ a, b) - L.bracket(a, mu @ b)
        for a, b in _basis_pairs(L.field, L.dim)
    )


def condition_report(K: BiAffineBracket) -> dict:
    """Every condition system plus the Lie-affgebra axioms, in one dict."""
    report = dict(check_general_conditions(K))
    report.update(conditions_derivative(K))
    report.update(conditions_homogeneous(K))
    report.update(conditions_lie_type(K))
    report["2.8a"] = is_affine_antisymmetric(K)
    report["2.8b"] = satisfies_affine_jacobi(K)
    return report


# ---------------------------------------------------------------------------
# vector-valued brackets
# ---------------------------------------------------------------------------


def _prog_eq46(V: "VectorValuedBracket"):
    bld = ProgramBuilder(V.field, V.dim, (1, 1, 1))
    d = bld.add_datum(V.B, V.lam, V.mu, V.s)
    lam = bld.add_mat(V.lam)
    mu = bld.add_mat(V.mu)
    a, b, c = 0, 1, 2
    u = bld.aff(a, b, d)
    v = bld.aff(a, c, d)
    w = bld.aff(b, c, d)
    lhs = bld.add(bld.bil(u, c, d), bld.matv(lam, u))
    rhs = bld.combine(
        (1, bld.bil(v, b, d)),
        (1, bld.matv(lam, v)),
        (1, bld.bil(a, w, d)),
        (1, bld.matv(mu, w)),
    )
    return bld.finish(bld.sub(lhs, rhs))


def _prog_eq47(V: "VectorValuedBracket"):
    bld = ProgramBuilder(V.field, V.dim, (1, 2))
    d = bld.add_datum(V.B, V.lam, V.mu, V.s)
    mu = bld.add_mat(V.mu)
    a, b = 0, 1
    w = bld.aff(b, b, d)
    return bld.finish(bld.add(bld.bil(a, w, d), bld.matv(mu, w)))


@dataclass(frozen=True)
class VectorValuedBracket:
    """A bi-affine map into the tangent space, [a,b]_v = B(a,b) + lam(a) +
    mu(b) + s, satisfying the linearized Leibniz rule
    [[a,b]_v, c>]_v = [[a,c]_v, b>]_v + [a>, [b,c]_v]_v
    (where x> denotes the linear part in that slot)."""

    field: FieldSpec
    dim: int
    B: tuple
    lam: Mat
    mu: Mat
    s: Vec

    def __post_init__(self):
        if not _kernel.vanishes(_prog_eq46(self)):
            raise ValueError("map does not satisfy the vector-valued Leibniz rule")

    def eval(self, a: Vec, b: Vec) -> Vec:
        return _tensor_bracket(self.field, self.B, a, b) + (self.lam @ a) + (self.mu @ b) + self.s

    def squares_annihilate(self) -> bool:
        """[a>, [b,b]_v]_v = 0 for all a, b (consequence of the rule)."""
        return _kernel.vanishes(_prog_eq47(self))


def to_vector_valued(K: BiAffineBracket) -> VectorValuedBracket:
    """[a,b]_v := {a,b} - a; requires a derivative bracket."""
    if not is_derivative(K):
        raise ValueError("only derivative brackets correspond to vector-valued ones")
    I = Mat.identity(K.field, K.dim)
    return VectorValuedBracket(K.field, K.dim, K.B, K.lam - I, K.mu, K.s)


def from_vector_valued(V: VectorValuedBracket) -> BiAffineBracket:
    """{a,b} := [a,b]_v + a."""
    I = Mat.identity(V.field, V.dim)
    return BiAffineBracket(V.field, V.dim, V.B, V.lam + I, V.mu, V.s)


# ---------------------------------------------------------------------------
# associative affgebras and the affine-derivation construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssociativeAffgebra:
    """Bi-affine product a*b = M(a,b) + lin_left(a) + lin_right(b) + t with
    (a*b)*c = a*(b*c) (validated on a degree-1 grid)."""

    field: FieldSpec
    dim: int
    M: tuple
    lin_left: Mat
    lin_right: Mat
    t: Vec

    def __post_init__(self):
        bld = ProgramBuilder(self.field, self.dim, (1, 1, 1))
        d = bld.add_datum(self.M, self.lin_left, self.lin_right, self.t)
        a, b, c = 0, 1, 2
        defect = bld.sub(bld.aff(bld.aff(a, b, d), c, d), bld.aff(a, bld.aff(b, c, d), d))
        if not _kernel.vanishes(bld.finish(defect)):
            raise ValueError("product is not associative")

    @staticmethod
    def make(field: FieldSpec, M, lin_left=None, lin_right=None, t=None) -> "AssociativeAffgebra":
        n = len(M)
        return AssociativeAffgebra(
            field,
            n,
            _coerce_tensor(field, M),
            lin_left if lin_left is not None else Mat.zero(field, n, n),
            lin_right if lin_right is not None else Mat.zero(field, n, n),
            t if t is not None else Vec.zero(field, n),
        )

    def product(self, a: Vec, b: Vec) -> Vec:
        return (
            _tensor_bracket(self.field, self.M, a, b)
            + (self.lin_left @ a)
            + (self.lin_right @ b)
            + self.t
        )


def _compat_defects(A: AssociativeAffgebra, D: AffineMapData) -> list:
    """Which halves of D(D(a)b) = D(a)D(b) = D(aD(b)) fail on the grid."""
    failures = []
    for name, left_first in (("D(D(a)b) = D(a)D(b)", True), ("D(aD(b)) = D(a)D(b)", False)):
        bld = ProgramBuilder(A.field, A.dim, (1, 1))
        d = bld.add_datum(A.M, A.lin_left, A.lin_right, A.t)
        P = bld.add_mat(D.matrix)
        off = bld.add_const(D.offset)
        a, b = 0, 1
        Da = bld.lin([(1, bld.matv(P, a))], const=off)
        Db = bld.lin([(1, bld.matv(P, b))], const=off)
        rhs = bld.aff(Da, Db, d)
        if left_first:
            inner = bld.aff(Da, b, d)
        else:
            inner = bld.aff(a, Db, d)
        lhs = bld.lin([(1, bld.matv(P, inner))], const=off)
        if not _kernel.vanishes(bld.finish(bld.sub(lhs, rhs))):
            failures.append(name)
    return failures


def derivative_from_associative(A: AssociativeAffgebra, D: AffineMapData) -> BiAffineBracket:
    """The bracket {a,b} = <a D(b), D(b) a, a> of an associative product
    and a compatible affine map, expanded into (B, lam, mu, s) form."""
    if D.source_dim != A.dim or D.target_dim != A.dim:
        raise DimensionMismatchError("D must be a self-map of the affgebra")
    failures = _compat_defects(A, D)
    if failures:
        raise ValueError("incompatible affine map: " + "; ".join(failures))

    F, n = A.field, A.dim
    P, d0 = D.matrix, D.offset
    units = _units(F, n)
    Mt = lambda x, y: _tensor_bracket(F, A.M, x, y)

    # a*D(b) - D(b)*a + a with D(b) = P b + d0, collected by multi-degree
    B_cols = [[Mt(ei, P @ ej) - Mt(P @ ej, ei) for ej in units] for ei in units]
    B = tuple(
        tuple(tuple(B_cols[i][j].entries) for j in range(n)) for i in range(n)
    )
    lam_cols = [
        Mt(ei, d0) - Mt(d0, ei) + (A.lin_left @ ei) - (A.lin_right @ ei) + ei for ei in units
    ]
    lam = Mat(F, tuple(zip(*(v.entries for v in lam_cols))))
    mu_cols = [(A.lin_right @ (P @ ej)) - (A.lin_left @ (P @ ej)) for ej in units]
    mu = Mat(F, tuple(zip(*(v.entries for v in mu_cols))))
    s = (A.lin_right @ d0) - (A.lin_left @ d0)

    K = BiAffineBracket(F, n, B, lam, mu, s)
    if not is_derivative(K):
        raise AssertionError("expansion lost the derivative property")
    return K
