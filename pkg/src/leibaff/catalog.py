"""Built-in algebras and the parametric families of brackets over them.

Algebras: L1(n) (abelian), L2 (the 2-dim Borel algebra), L3, L4(xi) (the
square-class family, xi normalizable to 1), L7 (3-dim non-Lie), sl2.  The
classically complex examples (sl2, L7) have integral structure constants
and are realized here over Q or GF(p); reductions that classically lean on
algebraic closure (the scalar-centroid step for sl2) are verified per
instance instead of assumed.

Families are data: matrix/vector templates over a small polynomial
expression type, parameter lists, and named constraints.  ``instantiate``
validates bindings and returns the bracket; ``normal_form`` reduces a
family member to its canonical representative and returns the validated
isomorphism witness.

Square-class representatives (used by the L4 normal forms): over Q the
squarefree integer with matching sign; over GF(p) one of 0, 1, or the
least quadratic non-residue.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .affgebra import BiAffineBracket, is_homogeneous
from .exactmath import (
    FieldSpec,
    Mat,
    Vec,
    exact_sqrt,
    square_class_rep,
)
from .leibalg import LeibnizAlgebra
from .morphism import is_affgebra_iso

__all__ = [
    "ConstraintViolation",
    "Expr",
    "FamilyDescriptor",
    "NormalFormResult",
    "P",
    "algebra",
    "algebra_names",
    "count_valid_bindings",
    "family",
    "family_bindings",
    "family_names",
    "instantiate",
    "normal_form",
]


class ConstraintViolation(ValueError):
    """A family constraint fails for the given bindings; carries the name
    of the violated relation."""

    def __init__(self, label: str, detail: str = ""):
        self.label = label
        super().__init__(f"{label}" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# tiny polynomial expressions over named parameters
# ---------------------------------------------------------------------------


class Expr:
    """Polynomial with integer coefficients in named parameters."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})  # tuple(sorted names, with repeats) -> int

    @staticmethod
    def const(k: int) -> "Expr":
        return Expr({(): k} if k else {})

    @staticmethod
    def param(name: str) -> "Expr":
        return Expr({(name,): 1})

    def _as_expr(self, other):
        if isinstance(other, Expr):
            return other
        if isinstance(other, int):
            return Expr.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
            if out[mono] == 0:
                del out[mono]
        return Expr(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._as_expr(other)
        return self + (-other)

    def __rsub__(self, other):
        return self._as_expr(other) + (-self)

    def __mul__(self, other):
        other = self._as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
                if out[m] == 0:
                    del out[m]
        return Expr(out)

    __rmul__ = __mul__

    def params(self) -> set:
        return {name for mono in self.terms for name in mono}

    def eval(self, field: FieldSpec, bindings: dict):
        total = field.zero
        for mono, c in self.terms.items():
            v = field.coerce(c)
            for name in mono:
                v = field.mul(v, bindings[name])
            total = field.add(total, v)
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            factors = "*".join(mono)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(factors)
            elif c == -1:
                parts.append(f"-{factors}")
            else:
                parts.append(f"{c}*{factors}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Expr({self})"


def P(name: str) -> Expr:
    return Expr.param(name)


def _expr_matrix(rows) -> tuple:
    conv = lambda e: e if isinstance(e, Expr) else Expr.const(e)
    return tuple(tuple(conv(e) for e in row) for row in rows)


def _expr_vector(entries) -> tuple:
    conv = lambda e: e if isinstance(e, Expr) else Expr.const(e)
    return tuple(conv(e) for e in entries)


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------


def algebra_names() -> list[str]:
    return ["L1(1)", "L1(2)", "L2", "L3", "L4", "L7", "sl2"]


def algebra(name: str, field: FieldSpec, xi=None) -> LeibnizAlgebra:
    """A catalog algebra over the requested field.

    ``L1(n)`` is abelian of dimension n; ``L4`` takes an optional nonzero
    square-class parameter ``xi`` (default 1).
    """
    name = name.strip()
    if name.startswith("L1"):
        dim = 2
        if "(" in name:
            dim = int(name[name.index("(") + 1 : name.index(")")])
        return LeibnizAlgebra.abelian(field, dim)
    if name == "L2":
        return LeibnizAlgebra.from_table(field, 2, {(0, 1): {0: 1}, (1, 0): {0: -1}})
    if name == "L3":
        return LeibnizAlgebra.from_table(field, 2, {(0, 1): {0: 1}})
    if name.startswith("L4"):
        if "(" in name:
            xi = field.parse(name[name.index("(") + 1 : name.index(")")])
        xi = field.one if xi is None else field.coerce(xi)
        if field.is_zero(xi):
            raise ValueError("L4 needs a nonzero parameter")
        return LeibnizAlgebra.from_table(field, 2, {(1, 1): {0: xi}})
    if name == "L7":
        return LeibnizAlgebra.from_table(
            field, 3, {(0, 1): {0: 1}, (0, 2): {0: 1}, (2, 1): {0: 1}, (2, 2): {0: 1}}
        )
    if name == "sl2":
        # basis (e, f, h): [e,f] = h, [h,e] = 2e, [h,f] = -2f
        return LeibnizAlgebra.from_table(
            field,
            3,
            {
                (0, 1): {2: 1},
                (1, 0): {2: -1},
                (2, 0): {0: 2},
                (0, 2): {0: -2},
                (2, 1): {1: -2},
                (1, 2): {1: 2},
            },
        )
    raise ValueError(f"unknown algebra {name!r}")


# ---------------------------------------------------------------------------
# family descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyDescriptor:
    """A parametrized family of brackets over a fixed fibre.

    ``free_params`` are bound by the caller; ``derived`` entries are
    computed from them (and checked, with the stated label, when the
    caller binds them explicitly).  ``nonzeros`` are side conditions that
    must not vanish; they only mention free parameters.
    """

    name: str
    fibre: str
    predicate: str  # "general" | "homogeneous" | "lie-type"
    free_params: tuple
    derived: tuple  # (param, Expr, label)
    lam: tuple  # rows of Expr
    mu: tuple
    s: tuple  # Expr entries
    equations: tuple = ()  # (label, Expr) that must vanish
    nonzeros: tuple = ()  # (label, Expr) that must not vanish
    s_in_left_center: bool = False
    notes: str = ""

    @property
    def dim(self) -> int:
        return len(self.s)


def _onedim_families() -> list[FamilyDescriptor]:
    lam1, mu1, s1 = P("lambda1"), P("mu1"), P("s1")
    general = FamilyDescriptor(
        name="onedim_general",
        fibre="L1(1)",
        predicate="general",
        free_params=("lambda1", "mu1", "s1"),
        derived=(),
        lam=_expr_matrix([[lam1]]),
        mu=_expr_matrix([[mu1]]),
        s=_expr_vector([s1]),
        notes="every one-dimensional bracket qualifies; all are Lie affgebras too",
    )
    classes = [
        FamilyDescriptor(
            name="onedim_homogeneous_class1",
            fibre="L1(1)",
            predicate="homogeneous",
            free_params=("lambda1",),
            derived=(),
            lam=_expr_matrix([[lam1]]),
            mu=_expr_matrix([[0]]),
            s=_expr_vector([0]),
        ),
        FamilyDescriptor(
            name="onedim_homogeneous_class2",
            fibre="L1(1)",
            predicate="homogeneous",
            free_params=("lambda1",),
            derived=(),
            lam=_expr_matrix([[lam1]]),
            mu=_expr_matrix([[1 - lam1]]),
            s=_expr_vector([0]),
        ),
        FamilyDescriptor(
            name="onedim_homogeneous_class3",
            fibre="L1(1)",
            predicate="homogeneous",
            free_params=("lambda1",),
            derived=(),
            lam=_expr_matrix([[lam1]]),
            mu=_expr_matrix([[1 - lam1]]),
            s=_expr_vector([1]),
        ),
    ]
    return [general] + classes


def _abelian_family(dim: int) -> FamilyDescriptor:
    lam = [[P(f"lambda{i * dim + j + 1}") for j in range(dim)] for i in range(dim)]
    mu = [[P(f"mu{i * dim + j + 1}") for j in range(dim)] for i in range(dim)]
    s = [P(f"s{i + 1}") for i in range(dim)]
    # (lam + mu - id) mu = 0, entrywise
    eqs = []
    for i in range(dim):
        for j in range(dim):
            total = Expr.const(0)
            for m in range(dim):
                total = total + (lam[i][m] + mu[i][m] - (1 if i == m else 0)) * mu[m][j]
            eqs.append((f"((lambda + mu - id) mu)[{i + 1}][{j + 1}] = 0", total))
    params = tuple(
        [f"lambda{k + 1}" for k in range(dim * dim)]
        + [f"mu{k + 1}" for k in range(dim * dim)]
        + [f"s{k + 1}" for k in range(dim)]
    )
    return FamilyDescriptor(
        name="abelian_fibre_homogeneous",
        fibre=f"L1({dim})",
        predicate="homogeneous",
        free_params=params,
        derived=(),
        lam=_expr_matrix(lam),
        mu=_expr_matrix(mu),
        s=_expr_vector(s),
        equations=tuple(eqs),
        notes="on an abelian fibre the only constraint is (lambda + mu - id) mu = 0",
    )


def _homogeneous_self(dim: int) -> FamilyDescriptor:
    return FamilyDescriptor(
        name="homogeneous_self",
        fibre="any",
        predicate="homogeneous",
        free_params=tuple(f"s{i + 1}" for i in range(dim)),
        derived=(),
        lam=_expr_matrix([[1 if i == j else 0 for j in range(dim)] for i in range(dim)]),
        mu=_expr_matrix([[0] * dim for _ in range(dim)]),
        s=_expr_vector([P(f"s{i + 1}") for i in range(dim)]),
        s_in_left_center=True,
        notes="{a,b} = [a,b] + a + s with s in the left center of the fibre",
    )


def _two_dim_families() -> list[FamilyDescriptor]:
    alpha, mu1, mu2 = P("alpha"), P("mu1"), P("mu2")
    lam1, lam2, lam4, s1, s2 = P("lambda1"), P("lambda2"), P("lambda4"), P("s1"), P("s2")
    return [
        FamilyDescriptor(
            name="L2_homogeneous",
            fibre="L2",
            predicate="homogeneous",
            free_params=("alpha", "mu1", "mu2"),
            derived=(
                ("s1", (alpha - 1) * mu2, "s1 = (alpha - 1)*mu2"),
                ("s2", (1 - alpha) * mu1, "s2 = (1 - alpha)*mu1"),
            ),
            lam=_expr_matrix([[alpha - mu1, -mu2], [0, alpha]]),
            mu=_expr_matrix([[mu1, mu2], [0, 0]]),
            s=_expr_vector([(alpha - 1) * mu2, (1 - alpha) * mu1]),
            notes="every homogeneous bracket over L2: lam = alpha*id - mu",
        ),
        FamilyDescriptor(
            name="L3_homogeneous",
            fibre="L3",
            predicate="homogeneous",
            free_params=("lambda1", "lambda4", "mu2", "s2"),
            derived=(("s1", mu2 * (lam1 - 1), "s1 = mu2*(lambda1 - 1)"),),
            lam=_expr_matrix([[lam1, 0], [0, lam4]]),
            mu=_expr_matrix([[0, mu2], [0, 0]]),
            s=_expr_vector([mu2 * (lam1 - 1), s2]),
        ),
        FamilyDescriptor(
            name="L4_homogeneous",
            fibre="L4",
            predicate="homogeneous",
            free_params=("lambda1", "lambda2", "mu2", "s1"),
            derived=(("s2", mu2 * (lam1 - 1), "s2 = mu2*(lambda1 - 1)"),),
            lam=_expr_matrix([[lam1, lam2], [0, lam1]]),
            mu=_expr_matrix([[0, mu2], [0, 0]]),
            s=_expr_vector([s1, mu2 * (lam1 - 1)]),
        ),
    ]


def _sl2_family() -> FamilyDescriptor:
    alpha = P("alpha")
    return FamilyDescriptor(
        name="sl2_homogeneous_normal",
        fibre="sl2",
        predicate="homogeneous",
        free_params=("alpha",),
        derived=(),
        lam=_expr_matrix(
            [[alpha, 0, 0], [0, alpha, 0], [0, 0, alpha]]
        ),
        mu=_expr_matrix([[0] * 3 for _ in range(3)]),
        s=_expr_vector([0, 0, 0]),
        notes="normal form of every homogeneous bracket over sl2; the scalar"
        " centroid step is verified per instance over Q",
    )


def _l7_families() -> list[FamilyDescriptor]:
    l2, l3, l5, l6, l9 = P("lambda2"), P("lambda3"), P("lambda5"), P("lambda6"), P("lambda9")
    m2, m3, m5, m6 = P("mu2"), P("mu3"), P("mu5"), P("mu6")
    s1, s2 = P("s1"), P("s2")
    c01 = "c01: mu2 - mu5 = mu3 - mu6"

    def lam_general(l11, l99, l66=l6):
        return _expr_matrix([[l11, l2, l3], [0, l5, l66], [0, -l2, l99]])

    f1 = FamilyDescriptor(
        name="L7_F1",
        fibre="L7",
        predicate="homogeneous",
        free_params=("lambda2", "lambda3", "lambda5", "lambda6", "lambda9", "mu2", "s1", "s2"),
        derived=(
            ("mu3", m2 + 0, c01),
            ("s3", m2 * (l3 + l9 - 1) - s1, "s1 + s3 = mu2*(lambda3 + lambda9 - 1)"),
        ),
        lam=lam_general(l3 + l9, l9),
        mu=_expr_matrix([[0, m2, m2], [0, 0, 0], [0, 0, 0]]),
        s=_expr_vector([s1, s2, m2 * (l3 + l9 - 1) - s1]),
        notes="mu5 = mu6 = 0",
    )
    f2 = FamilyDescriptor(
        name="L7_F2",
        fibre="L7",
        predicate="homogeneous",
        free_params=("lambda2", "lambda3", "lambda5", "lambda9", "mu2", "s1", "s2"),
        derived=(
            ("lambda6", l5 - l2 - l9, "lambda2 - lambda5 + lambda6 + lambda9 = 0"),
            ("mu3", m2 + l2 + l9 - 1, "mu3 - mu2 = lambda2 + lambda9 - 1"),
            ("mu6", l2 + l9 - 1, c01),
            ("s3", m2 * (l3 + l9 - 1) - s1, "s1 + s3 = mu2*(lambda3 + lambda9 - 1)"),
        ),
        lam=lam_general(l3 + l9, l9, l5 - l2 - l9),
        mu=_expr_matrix(
            [[0, m2, m2 + l2 + l9 - 1], [0, 0, l2 + l9 - 1], [0, 0, 1 - l2 - l9]]
        ),
        s=_expr_vector([s1, s2, m2 * (l3 + l9 - 1) - s1]),
        nonzeros=(("mu6", l2 + l9 - 1),),
        notes="mu5 = 0, mu6 != 0",
    )
    f3 = FamilyDescriptor(
        name="L7_F3",
        fibre="L7",
        predicate="homogeneous",
        free_params=("lambda2", "lambda3", "lambda5", "lambda9", "mu2", "s1", "s2"),
        derived=(
            ("lambda6", l5 - l2 - l9, "lambda2 - lambda5 + lambda6 + lambda9 = 0"),
            ("mu3", m2 - 1 + l2 + l9, "mu2 - mu3 = 1 - lambda2 - lambda9"),
            ("mu5", 1 - l2 - l9, c01),
            (
                "s3",
                (m2 - 1 + l2 + l9) * (l3 + l9 - 1) - s1,
                "s1 + s3 = mu3*(lambda3 + lambda9 - 1)",
            ),
        ),
        lam=lam_general(l3 + l9, l9, l5 - l2 - l9),
        mu=_expr_matrix(
            [[0, m2, m2 - 1 + l2 + l9], [0, 1 - l2 - l9, 0], [0, l2 + l9 - 1, 0]]
        ),
        s=_expr_vector([s1, s2, (m2 - 1 + l2 + l9) * (l3 + l9 - 1) - s1]),
        nonzeros=(("mu5", 1 - l2 - l9),),
        notes="mu5 != 0, mu6 = 0",
    )
    f4 = FamilyDescriptor(
        name="L7_F4",
        fibre="L7",
        predicate="homogeneous",
        free_params=("lambda2", "lambda3", "lambda5", "mu2", "mu5", "s1", "s2"),
        derived=(
            ("lambda6", l5 - 1, "lambda6 = lambda5 - 1"),
            ("lambda9", 1 - l2, "lambda9 = 1 - lambda2"),
            ("mu3", m2 + 0, c01),
            ("mu6", m5 + 0, c01),
            (
                "s3",
                (l3 - l2) * (m2 - m5) - s1,
                "s1 + s3 = (lambda3 - lambda2)*(mu2 - mu5)",
            ),
        ),
        lam=_expr_matrix([[l3 - l2 + 1, l2, l3], [0, l5, l5 - 1], [0, -l2, 1 - l2]]),
        mu=_expr_matrix([[0, m2, m2], [0, m5, m5], [0, -m5, -m5]]),
        s=_expr_vector([s1, s2, (l3 - l2) * (m2 - m5) - s1]),
        nonzeros=(("mu5", m5 + 0),),
        notes="mu5 = mu6 != 0, mu2 = mu3",
    )
    t = 1 - l5 + l6  # the common difference mu2 - mu3 = mu5 - mu6
    f5 = FamilyDescriptor(
        name="L7_F5",
        fibre="L7",
        predicate="homogeneous",
        free_params=("lambda2", "lambda3", "lambda5", "lambda6", "mu2", "mu5", "s1", "s2"),
        derived=(
            ("lambda9", l5 - l2 - l6, "lambda9 = lambda5 - lambda2 - lambda6"),
            ("mu3", m2 - t, "mu2 - mu3 = 1 - lambda5 + lambda6"),
            ("mu6", m5 - t, "mu5 - mu6 = 1 - lambda5 + lambda6"),
            (
                "s3",
                (m2 - m5) * (l3 + l5 - l2 - l6 - 1) - s1,
                "s1 + s3 = (mu2 - mu5)*(lambda1 - 1)",
            ),
        ),
        lam=_expr_matrix(
            [[l3 + l5 - l2 - l6, l2, l3], [0, l5, l6], [0, -l2, l5 - l2 - l6]]
        ),
        mu=_expr_matrix([[0, m2, m2 - t], [0, m5, m5 - t], [0, -m5, t - m5]]),
        s=_expr_vector([s1, s2, (m2 - m5) * (l3 + l5 - l2 - l6 - 1) - s1]),
        nonzeros=(
            ("mu5", m5 + 0),
            ("mu6", m5 - t),
            ("mu2 - mu3", t + 0),
        ),
        notes="mu5, mu6 != 0, mu2 != mu3",
    )
    return [f1, f2, f3, f4, f5]


def _l4_lietype_families() -> list[FamilyDescriptor]:
    l2, m1, m2, s1 = P("lambda2"), P("mu1"), P("mu2"), P("s1")
    shared = dict(
        fibre="L4",
        predicate="lie-type",
        free_params=("lambda2", "mu1", "mu2", "s1"),
        derived=(),
        s=_expr_vector([s1, 0]),
    )
    return [
        FamilyDescriptor(
            name="L4_lietype_F1",
            lam=_expr_matrix([[-1, l2], [0, 0]]),
            mu=_expr_matrix([[m1, m2], [0, 1]]),
            **shared,
        ),
        FamilyDescriptor(
            name="L4_lietype_F2",
            lam=_expr_matrix([[3, l2], [0, 2]]),
            mu=_expr_matrix([[m1, m2], [0, -1]]),
            **shared,
        ),
    ]


def _build_registry() -> dict:
    families = (
        _onedim_families()
        + [_abelian_family(2), _homogeneous_self(2)]
        + _two_dim_families()
        + [_sl2_family()]
        + _l7_families()
        + _l4_lietype_families()
    )
    return {f.name: f for f in families}


_REGISTRY = _build_registry()


def family_names() -> list[str]:
    return sorted(_REGISTRY)


def family(name: str, dim: Optional[int] = None) -> FamilyDescriptor:
    """Look up a family; ``abelian_fibre_homogeneous`` and
    ``homogeneous_self`` accept an explicit dimension."""
    if name == "abelian_fibre_homogeneous" and dim is not None:
        return _abelian_family(dim)
    if name == "homogeneous_self" and dim is not None:
        return _homogeneous_self(dim)
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}") from None


# ---------------------------------------------------------------------------
# instantiation
# ---------------------------------------------------------------------------


def _resolve_fibre(fam: FamilyDescriptor, field: FieldSpec, fibre) -> LeibnizAlgebra:
    if fam.fibre == "any":
        if fibre is None:
            raise ValueError(f"family {fam.name} needs an explicit fibre algebra")
        return fibre
    if fibre is not None:
        return fibre
    return algebra(fam.fibre, field)


def instantiate(
    fam: FamilyDescriptor, field: FieldSpec, bindings: dict, fibre: Optional[LeibnizAlgebra] = None
) -> BiAffineBracket:
    """Validate bindings against the family's constraints and build the
    bracket.  Derived parameters may be bound explicitly, in which case the
    given value must match; the error names the violated relation."""
    if fam.fibre == "any" and fibre is not None and fibre.dim != fam.dim:
        fam = _homogeneous_self(fibre.dim)
    L = _resolve_fibre(fam, field, fibre)
    values = {}
    known = set(fam.free_params) | {name for name, _, _ in fam.derived}
    for key in bindings:
        if key not in known:
            raise ValueError(f"unknown parameter {key!r} for family {fam.name}")
    missing = [name for name in fam.free_params if name not in bindings]
    if missing:
        raise ValueError(f"unbound parameters for {fam.name}: {missing}")
    for name in fam.free_params:
        values[name] = field.coerce(bindings[name])
    for name, expr, label in fam.derived:
        derived_value = expr.eval(field, values)
        if name in bindings and field.coerce(bindings[name]) != derived_value:
            raise ConstraintViolation(label, f"binding {name} contradicts the relation")
        values[name] = derived_value
    for label, expr in fam.equations:
        if not field.is_zero(expr.eval(field, values)):
            raise ConstraintViolation(label)
    for label, expr in fam.nonzeros:
        if field.is_zero(expr.eval(field, values)):
            raise ConstraintViolation(f"{label} != 0")
    lam = Mat(field, tuple(tuple(e.eval(field, values) for e in row) for row in fam.lam))
    mu = Mat(field, tuple(tuple(e.eval(field, values) for e in row) for row in fam.mu))
    s = Vec(field, tuple(e.eval(field, values) for e in fam.s))
    if fam.s_in_left_center and not L.left_center().contains(s):
        raise ConstraintViolation("s in LZ(fibre)", "s must lie in the left center")
    return BiAffineBracket(field, L.dim, L.c, lam, mu, s)


def family_bindings(fam: FamilyDescriptor, field: FieldSpec) -> Iterator[dict]:
    """All bindings of the free parameters over a finite field that pass
    the nonzero side conditions."""
    if field.kind != "GF":
        raise ValueError("enumeration needs a finite field")
    names = fam.free_params
    for combo in itertools.product(range(field.p), repeat=len(names)):
        values = dict(zip(names, combo))
        if any(field.is_zero(expr.eval(field, values)) for _, expr in fam.nonzeros):
            continue
        yield values


def count_valid_bindings(fam: FamilyDescriptor, field: FieldSpec) -> int:
    """Number of free-parameter bindings passing the nonzero conditions.

    Only the parameters that appear in some nonzero condition are
    enumerated; the rest contribute a clean power of p."""
    if field.kind != "GF":
        raise ValueError("counting needs a finite field")
    involved = sorted(set().union(*(e.params() for _, e in fam.nonzeros)) if fam.nonzeros else set())
    rest = len(fam.free_params) - len(involved)
    if not involved:
        return field.p ** len(fam.free_params)
    passing = 0
    for combo in itertools.product(range(field.p), repeat=len(involved)):
        values = dict(zip(involved, combo))
        if all(not field.is_zero(e.eval(field, values)) for _, e in fam.nonzeros):
            passing += 1
    return passing * field.p**rest


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalFormResult:
    datum: BiAffineBracket
    psi: Mat
    q: Vec


class FamilyMembershipError(ValueError):
    """The datum does not belong to the named family."""


def _require_member(fam: FamilyDescriptor, K: BiAffineBracket, bindings: dict) -> None:
    rebuilt = instantiate(fam, K.field, bindings)
    if rebuilt != K:
        raise FamilyMembershipError(f"datum is not a member of {fam.name}")


def _validated(K: BiAffineBracket, target: BiAffineBracket, psi: Mat, q: Vec) -> NormalFormResult:
    if not is_affgebra_iso(K, target, psi, q):
        raise AssertionError("normal-form witness failed validation")
    return NormalFormResult(target, psi, q)


def _nf_L2_homogeneous(K: BiAffineBracket) -> NormalFormResult:
    F = K.field
    mu1, mu2 = K.mu.rows[0]
    alpha = K.lam.rows[1][1]
    _require_member(family("L2_homogeneous"), K, {"alpha": alpha, "mu1": mu1, "mu2": mu2})
    target = BiAffineBracket(
        F, 2, K.B, Mat.scalar(F, 2, alpha), Mat.zero(F, 2, 2), Vec.zero(F, 2)
    )
    q = Vec(F, (mu2, F.neg(mu1)))
    return _validated(K, target, Mat.identity(F, 2), q)


def _nf_L3_homogeneous(K: BiAffineBracket) -> NormalFormResult:
    F = K.field
    lam1, lam4 = K.lam.rows[0][0], K.lam.rows[1][1]
    mu2 = K.mu.rows[0][1]
    s2 = K.s.entries[1]
    _require_member(
        family("L3_homogeneous"), K, {"lambda1": lam1, "lambda4": lam4, "mu2": mu2, "s2": s2}
    )
    s2_new = F.add(s2, F.mul(lam1, F.sub(F.one, lam4)))
    target = BiAffineBracket(
        F,
        2,
        K.B,
        Mat(F, ((F.zero, F.zero), (F.zero, lam4))),
        Mat.zero(F, 2, 2),
        Vec(F, (F.zero, s2_new)),
    )
    q = Vec(F, (mu2, lam1))
    return _validated(K, target, Mat.identity(F, 2), q)


def _canonical_square_theta(F: FieldSpec, x):
    """theta with theta^2 * x equal to the canonical square-class
    representative of x (theta = 1 when x = 0)."""
    if F.is_zero(x):
        return F.one, F.zero
    rep = square_class_rep(F, x)
    theta = exact_sqrt(F, F.div(rep, x))
    if theta is None:
        raise AssertionError("square-class representative not reachable")
    return theta, rep


def _nf_L4_homogeneous(K: BiAffineBracket) -> NormalFormResult:
    F = K.field
    lam1, lam2 = K.lam.rows[0]
    mu2 = K.mu.rows[0][1]
    s1 = K.s.entries[0]
    _require_member(
        family("L4_homogeneous"), K, {"lambda1": lam1, "lambda2": lam2, "mu2": mu2, "s1": s1}
    )
    if lam2 == mu2:
        x = F.sub(s1, F.mul(lam2, lam2))
        theta, rep = _canonical_square_theta(F, x)
        psi = Mat(F, ((F.mul(theta, theta), F.zero), (F.zero, theta)))
        target = BiAffineBracket(
            F, 2, K.B, Mat.scalar(F, 2, lam1), Mat.zero(F, 2, 2), Vec(F, (rep, F.zero))
        )
    else:
        theta = F.inv(F.sub(lam2, mu2))
        psi = Mat(F, ((F.mul(theta, theta), F.zero), (F.zero, theta)))
        omega = F.div(
            F.sub(s1, F.mul(lam2, mu2)),
            F.mul(F.sub(mu2, lam2), F.sub(mu2, lam2)),
        )
        lam_new = Mat(F, ((lam1, F.one), (F.zero, lam1)))
        target = BiAffineBracket(F, 2, K.B, lam_new, Mat.zero(F, 2, 2), Vec(F, (omega, F.zero)))
    q = Vec(F, (F.zero, mu2))
    return _validated(K, target, psi, q)


def _nf_L4_lietype(K: BiAffineBracket, which: str) -> NormalFormResult:
    F = K.field
    if F.kind == "GF" and F.p == 2:
        raise ValueError("the Lie-type reductions need characteristic != 2")
    lam2 = K.lam.rows[0][1]
    mu1, mu2 = K.mu.rows[0]
    s1 = K.s.entries[0]
    fam = family(f"L4_lietype_{which}")
    _require_member(fam, K, {"lambda2": lam2, "mu1": mu1, "mu2": mu2, "s1": s1})
    lam11 = K.lam.rows[0][0]
    lam22 = K.lam.rows[1][1]
    mu22 = K.mu.rows[1][1]
    sign = F.sub(lam22, lam11)  # the 12-entry of psi M psi^-1 picks up delta*(m22 - m11)
    crit = F.sub(F.one, lam11)  # q1 enters s' with coefficient (1 - lam11 - mu1)

    # choose delta (possibly theta-dependent) and q2 so the 12-entries of
    # lam' and mu' vanish; mu' then stays diagonal except one special case
    special_mu = None
    if lam2 == mu2:
        delta_of = lambda theta: F.zero
        q2 = lam2
    elif F.is_zero(mu1):
        theta0 = F.inv(F.sub(mu2, lam2))
        delta_of = None  # theta forced
        q2 = lam2
        special_mu = Mat(F, ((F.zero, F.one), (F.zero, mu22)))
    else:
        delta_of = lambda theta: F.div(F.mul(F.mul(theta, theta), F.sub(mu2, lam2)), mu1)
        q2 = F.add(lam2, F.mul(sign, F.div(F.sub(mu2, lam2), mu1)))

    # s' transport: first coordinate of psi(s - (lam+mu)q + [q,q] + q) is
    # theta^2 * (s1 + (1 - lam11 - mu1) q1 - (lam2+mu2) q2 + q2^2)
    base = F.add(
        F.sub(s1, F.mul(F.add(lam2, mu2), q2)),
        F.mul(q2, q2),
    )
    coeff = F.sub(crit, mu1)
    if not F.is_zero(coeff):
        theta = F.one
        q1 = F.neg(F.div(base, coeff))
        s_new = Vec.zero(F, 2)
    else:
        q1 = F.zero
        theta, rep = _canonical_square_theta(F, base)
        s_new = Vec(F, (rep, F.zero))
    if delta_of is None:
        if F.is_zero(coeff):  # unreachable: mu1 = 0 and the coefficient is 1 - lam11
            raise AssertionError("inconsistent reduction case")
        theta = theta0
        q1 = F.neg(F.div(base, coeff))
        s_new = Vec.zero(F, 2)
        delta = F.zero
    else:
        delta = delta_of(theta)

    psi = Mat(F, ((F.mul(theta, theta), delta), (F.zero, theta)))
    mu_new = special_mu if special_mu is not None else Mat(F, ((mu1, F.zero), (F.zero, mu22)))
    lam_new = Mat(F, ((lam11, F.zero), (F.zero, lam22)))
    target = BiAffineBracket(F, 2, K.B, lam_new, mu_new, s_new)
    q = Vec(F, (q1, q2))
    return _validated(K, target, psi, q)


def _nf_sl2(K: BiAffineBracket) -> NormalFormResult:
    from .exactmath import solve_linear

    F = K.field
    L = K.fibre_algebra()
    if not is_homogeneous(K):
        raise FamilyMembershipError("datum is not homogeneous over sl2")
    # mu must be inner: solve ad_right(z) = mu for z
    n = K.dim
    rows = []
    rhs = []
    units = [Vec.unit(F, n, i) for i in range(n)]
    for i in range(n):
        for out in range(n):
            # [e_i, z]_out as a linear function of z
            rows.append(tuple(L.bracket(units[i], units[m]).entries[out] for m in range(n)))
            rhs.append(K.mu.rows[out][i])
    sol = solve_linear(Mat(F, tuple(rows)), Vec(F, tuple(rhs)))
    if sol is None:
        raise FamilyMembershipError("mu is not an inner multiplication; no reduction")
    z = sol.particular
    kappa = K.lam + K.mu
    if not L.in_centroid(kappa):
        raise FamilyMembershipError("lam + mu is not centroidal")
    alpha = kappa.rows[0][0]
    if kappa != Mat.scalar(F, n, alpha):
        raise FamilyMembershipError("lam + mu is not scalar; no scalar normal form")
    target = BiAffineBracket(
        F, n, K.B, Mat.scalar(F, n, alpha), Mat.zero(F, n, n), Vec.zero(F, n)
    )
    return _validated(K, target, Mat.identity(F, n), -z)


def _nf_onedim_homogeneous(K: BiAffineBracket) -> NormalFormResult:
    F = K.field
    lam = K.lam.rows[0][0]
    mu = K.mu.rows[0][0]
    s = K.s.entries[0]
    if not (F.is_zero(mu) or mu == F.sub(F.one, lam)):
        raise FamilyMembershipError("one-dimensional datum is not homogeneous")
    lam_mu_1 = F.sub(F.add(lam, mu), F.one)
    if not F.is_zero(lam_mu_1):
        q = Vec(F, (F.div(s, lam_mu_1),))
        psi = Mat.identity(F, 1)
        s_new = F.zero
    elif F.is_zero(s):
        q = Vec.zero(F, 1)
        psi = Mat.identity(F, 1)
        s_new = F.zero
    else:
        q = Vec.zero(F, 1)
        psi = Mat(F, ((F.inv(s),),))
        s_new = F.one
    target = BiAffineBracket(F, 1, K.B, K.lam, K.mu, Vec(F, (s_new,)))
    return _validated(K, target, psi, q)


_NORMAL_FORMS = {
    "L2_homogeneous": _nf_L2_homogeneous,
    "L3_homogeneous": _nf_L3_homogeneous,
    "L4_homogeneous": _nf_L4_homogeneous,
    "L4_lietype_F1": lambda K: _nf_L4_lietype(K, "F1"),
    "L4_lietype_F2": lambda K: _nf_L4_lietype(K, "F2"),
    "sl2_homogeneous_normal": _nf_sl2,
    "onedim_homogeneous": _nf_onedim_homogeneous,
}


def normal_form(name: str, K: BiAffineBracket) -> NormalFormResult:
    """Reduce a family member to its canonical representative.

    Returns the target datum and the isomorphism witness (psi, q), which
    is validated before returning; a validation failure signals a catalog
    transcription bug rather than bad input."""
    try:
        reducer = _NORMAL_FORMS[name]
    except KeyError:
        raise ValueError(f"no normal form recorded for {name!r}") from None
    return reducer(K)
