"""Exact scalar arithmetic over Q and GF(p), dense vectors and matrices,
linear solving, and a grid-based polynomial identity checker.

Scalars are plain Python values: ``fractions.Fraction`` over Q (always in
lowest terms with positive denominator) and canonical residues ``int`` in
``[0, p)`` over GF(p).  All arithmetic goes through a :class:`FieldSpec`,
never through floating point.

Everything here is immutable after construction; all operations are pure
functions, so values can be shared freely across workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

__all__ = [
    "DimensionMismatchError",
    "FieldMismatchError",
    "FieldSpec",
    "GF",
    "LinearSolution",
    "Mat",
    "Q",
    "Subspace",
    "Vec",
    "exact_sqrt",
    "grid_scalars",
    "grid_vanishes",
    "grid_witness",
    "is_prime",
    "solve_linear",
    "square_class_rep",
    "squarefree_part",
]

Scalar = Union[Fraction, int]


class DimensionMismatchError(ValueError):
    """Shapes of the operands do not agree."""


class FieldMismatchError(ValueError):
    """Operands live over different fields."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every 64-bit (and beyond) input."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The coefficient field: ``kind`` is ``'Q'`` (rationals) or ``'GF'``
    (prime field, with modulus ``p``)."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise ValueError("rationals take no modulus")
        elif self.kind == "GF":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"GF modulus must be prime, got {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    # -- basic structure ---------------------------------------------------

    def characteristic(self) -> int:
        return 0 if self.kind == "Q" else self.p  # type: ignore[return-value]

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.kind == "Q" else 1

    def coerce(self, x) -> Scalar:
        """Canonical field element from an int, Fraction, or literal string."""
        if isinstance(x, str):
            return self.parse(x)
        if self.kind == "Q":
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise TypeError(f"cannot coerce {x!r} into Q")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:  # type: ignore[operator]
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, int):
            return x % self.p  # type: ignore[operator]
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b if self.kind == "Q" else (a + b) % self.p

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b if self.kind == "Q" else (a - b) % self.p

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b if self.kind == "Q" else (a * b) % self.p

    def neg(self, a: Scalar) -> Scalar:
        return -a if self.kind == "Q" else (-a) % self.p

    def inv(self, a: Scalar) -> Scalar:
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.kind == "Q" else pow(a, self.p - 2, self.p)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    def elements(self) -> Iterator[Scalar]:
        """All field elements; only available over GF(p)."""
        if self.kind == "Q":
            raise ValueError("Q is infinite")
        return iter(range(self.p))  # type: ignore[arg-type]

    def grid_point(self, i: int) -> Scalar:
        """Canonical image of the integer ``i`` (used for grid evaluation)."""
        return Fraction(i) if self.kind == "Q" else i % self.p

    # -- serialization --------------------------------------------------------
    # Rationals serialize as "p" or "p/q" strings; GF(p) residues as ints.

    def parse(self, v) -> Scalar:
        if self.kind == "Q":
            if isinstance(v, str):
                return Fraction(v)
            if isinstance(v, int):
                return Fraction(v)
            raise TypeError(f"expected rational literal, got {v!r}")
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, str):
            return self.coerce(Fraction(v))
        raise TypeError(f"expected residue, got {v!r}")

    def to_json(self, a: Scalar):
        if self.kind == "Q":
            return str(a)
        return int(a)

    def spec_to_json(self) -> dict:
        if self.kind == "Q":
            return {"kind": "Q"}
        return {"kind": "GF", "p": self.p}

    @staticmethod
    def spec_from_json(obj) -> "FieldSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError(f"bad field spec: {obj!r}")
        if obj["kind"] == "Q":
            return Q
        if obj["kind"] == "GF":
            return GF(int(obj["p"]))
        raise ValueError(f"bad field kind: {obj['kind']!r}")

    def __repr__(self):
        return "Q" if self.kind == "Q" else f"GF({self.p})"


Q = FieldSpec("Q")


def GF(p: int) -> FieldSpec:
    return FieldSpec("GF", p)


# ---------------------------------------------------------------------------
# vectors and matrices
# ---------------------------------------------------------------------------


def _require_same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


@dataclass(frozen=True)
class Vec:
    """Dense vector with exact entries."""

    field: FieldSpec
    entries: tuple

    @staticmethod
    def make(field: FieldSpec, values: Iterable) -> "Vec":
        return Vec(field, tuple(field.coerce(v) for v in values))

    @staticmethod
    def zero(field: FieldSpec, n: int) -> "Vec":
        return Vec(field, (field.zero,) * n)

    @staticmethod
    def unit(field: FieldSpec, n: int, i: int) -> "Vec":
        e = [field.zero] * n
        e[i] = field.one
        return Vec(field, tuple(e))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __add__(self, other: "Vec") -> "Vec":
        _require_same_field(self, other)
        if self.dim != other.dim:
            raise DimensionMismatchError(f"{self.dim} vs {other.dim}")
        add = self.field.add
        return Vec(self.field, tuple(add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Vec") -> "Vec":
        _require_same_field(self, other)
        if self.dim != other.dim:
            raise DimensionMismatchError(f"{self.dim} vs {other.dim}")
        sub = self.field.sub
        return Vec(self.field, tuple(sub(a, b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Vec":
        neg = self.field.neg
        return Vec(self.field, tuple(neg(a) for a in self.entries))

    def scaled(self, c) -> "Vec":
        c = self.field.coerce(c)
        mul = self.field.mul
        return Vec(self.field, tuple(mul(c, a) for a in self.entries))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def to_json(self):
        return [self.field.to_json(a) for a in self.entries]

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "Vec":
        return Vec(field, tuple(field.parse(v) for v in obj))


@dataclass(frozen=True)
class Mat:
    """Dense matrix, row-major, acting on column vectors."""

    field: FieldSpec
    rows: tuple

    @staticmethod
    def make(field: FieldSpec, rows: Iterable[Iterable]) -> "Mat":
        return Mat(field, tuple(tuple(field.coerce(v) for v in row) for row in rows))

    @staticmethod
    def zero(field: FieldSpec, nrows: int, ncols: int) -> "Mat":
        return Mat(field, ((field.zero,) * ncols,) * nrows)

    @staticmethod
    def identity(field: FieldSpec, n: int) -> "Mat":
        one, zero = field.one, field.zero
        return Mat(field, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @staticmethod
    def scalar(field: FieldSpec, n: int, c) -> "Mat":
        c = field.coerce(c)
        zero = field.zero
        return Mat(field, tuple(tuple(c if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __add__(self, other: "Mat") -> "Mat":
        _require_same_field(self, other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("matrix shapes differ")
        add = self.field.add
        return Mat(
            self.field,
            tuple(tuple(add(a, b) for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)),
        )

    def __sub__(self, other: "Mat") -> "Mat":
        _require_same_field(self, other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("matrix shapes differ")
        sub = self.field.sub
        return Mat(
            self.field,
            tuple(tuple(sub(a, b) for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)),
        )

    def __neg__(self) -> "Mat":
        neg = self.field.neg
        return Mat(self.field, tuple(tuple(neg(a) for a in r) for r in self.rows))

    def scaled(self, c) -> "Mat":
        c = self.field.coerce(c)
        mul = self.field.mul
        return Mat(self.field, tuple(tuple(mul(c, a) for a in r) for r in self.rows))

    def __matmul__(self, other):
        _require_same_field(self, other)
        F = self.field
        if isinstance(other, Vec):
            if self.ncols != other.dim:
                raise DimensionMismatchError(f"({self.nrows}x{self.ncols}) @ vec[{other.dim}]")
            out = []
            for row in self.rows:
                acc = F.zero
                for a, x in zip(row, other.entries):
                    acc = F.add(acc, F.mul(a, x))
                out.append(acc)
            return Vec(F, tuple(out))
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise DimensionMismatchError(
                    f"({self.nrows}x{self.ncols}) @ ({other.nrows}x{other.ncols})"
                )
            cols = list(zip(*other.rows))
            out_rows = []
            for row in self.rows:
                out_row = []
                for col in cols:
                    acc = F.zero
                    for a, b in zip(row, col):
                        acc = F.add(acc, F.mul(a, b))
                    out_row.append(acc)
                out_rows.append(tuple(out_row))
            return Mat(F, tuple(out_rows))
        return NotImplemented

    def apply(self, v: Vec) -> Vec:
        return self @ v

    def transpose(self) -> "Mat":
        return Mat(self.field, tuple(zip(*self.rows)))

    def column(self, j: int) -> Vec:
        return Vec(self.field, tuple(r[j] for r in self.rows))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_invertible(self) -> bool:
        if self.nrows != self.ncols:
            return False
        reduced, pivots = rref(self.field, [list(r) for r in self.rows])
        return len(pivots) == self.nrows

    def inverse(self) -> "Mat":
        if self.nrows != self.ncols:
            raise DimensionMismatchError("only square matrices invert")
        F, n = self.field, self.nrows
        aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(self.rows)]
        reduced, pivots = rref(F, aug)
        if pivots != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Mat(F, tuple(tuple(row[n:]) for row in reduced))

    def to_json(self):
        return [[self.field.to_json(a) for a in r] for r in self.rows]

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "Mat":
        return Mat(field, tuple(tuple(field.parse(v) for v in row) for row in obj))


# ---------------------------------------------------------------------------
# echelon forms and solving
# ---------------------------------------------------------------------------


def rref(field: FieldSpec, rows: list) -> tuple[list, list]:
    """Reduced row echelon form (in place on the given list of row lists).

    Pivots are chosen leftmost-first and take the first nonzero entry in the
    column (top to bottom), so the output is canonical for a given row space.
    Returns ``(rows, pivot_columns)``.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


@dataclass(frozen=True)
class Subspace:
    """Linear subspace given by its reduced-echelon basis (canonical)."""

    field: FieldSpec
    ambient_dim: int
    basis: tuple  # tuple of Vec, RREF rows

    @staticmethod
    def from_vectors(field: FieldSpec, ambient_dim: int, vectors: Iterable[Vec]) -> "Subspace":
        rows = [list(v.entries) for v in vectors]
        if not rows:
            return Subspace(field, ambient_dim, ())
        for row in rows:
            if len(row) != ambient_dim:
                raise DimensionMismatchError("vector length differs from ambient dimension")
        reduced, pivots = rref(field, rows)
        basis = tuple(Vec(field, tuple(reduced[i])) for i in range(len(pivots)))
        return Subspace(field, ambient_dim, basis)

    @staticmethod
    def zero(field: FieldSpec, ambient_dim: int) -> "Subspace":
        return Subspace(field, ambient_dim, ())

    @staticmethod
    def full(field: FieldSpec, ambient_dim: int) -> "Subspace":
        return Subspace.from_vectors(
            field, ambient_dim, [Vec.unit(field, ambient_dim, i) for i in range(ambient_dim)]
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def contains(self, v: Vec) -> bool:
        if v.dim != self.ambient_dim:
            raise DimensionMismatchError("vector outside ambient space")
        F = self.field
        residue = list(v.entries)
        for b in self.basis:
            lead = next(i for i, x in enumerate(b.entries) if x != 0)
            if residue[lead] != 0:
                f = residue[lead]
                residue = [F.sub(x, F.mul(f, y)) for x, y in zip(residue, b.entries)]
        return all(x == 0 for x in residue)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def coordinates(self, v: Vec) -> Optional[Vec]:
        """Coefficients of ``v`` in this basis, or None when v lies outside."""
        F = self.field
        residue = list(v.entries)
        coeffs = []
        for b in self.basis:
            lead = next(i for i, x in enumerate(b.entries) if x != 0)
            c = residue[lead]
            coeffs.append(c)
            if c != 0:
                residue = [F.sub(x, F.mul(c, y)) for x, y in zip(residue, b.entries)]
        if any(x != 0 for x in residue):
            return None
        return Vec(F, tuple(coeffs))


@dataclass(frozen=True)
class LinearSolution:
    """A particular solution together with a canonical kernel basis."""

    particular: Vec
    kernel: Subspace


def kernel_of(A: Mat) -> Subspace:
    """Canonical basis of ``{x : Ax = 0}``."""
    F = A.field
    n = A.ncols
    rows = [list(r) for r in A.rows]
    if not rows:
        return Subspace.full(F, n)
    reduced, pivots = rref(F, rows)
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        v = [F.zero] * n
        v[fc] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(reduced[r][fc])
        basis.append(Vec(F, tuple(v)))
    return Subspace.from_vectors(F, n, basis)


def solve_linear(A: Mat, b: Vec) -> Optional[LinearSolution]:
    """Solve ``Ax = b`` exactly.

    Returns a particular solution and a reduced-echelon kernel basis when the
    system is consistent, None otherwise.  Output is deterministic: free
    variables are set to zero in the particular solution.
    """
    if A.nrows != b.dim:
        raise DimensionMismatchError(f"A has {A.nrows} rows but b has {b.dim} entries")
    F = A.field
    n = A.ncols
    aug = [list(r) + [bv] for r, bv in zip(A.rows, b.entries)]
    if not aug:
        return LinearSolution(Vec.zero(F, n), Subspace.full(F, n))
    reduced, pivots = rref(F, aug)
    if n in pivots:
        return None  # a row reduced to 0 = 1
    x = [F.zero] * n
    for r, pc in enumerate(pivots):
        x[pc] = reduced[r][n]
    return LinearSolution(Vec(F, tuple(x)), kernel_of(A))


# ---------------------------------------------------------------------------
# grid-based polynomial identity checking
# ---------------------------------------------------------------------------


def _grid_sizes(field: FieldSpec, k: int, degree) -> list[int]:
    degrees = [degree] * k if isinstance(degree, int) else list(degree)
    if len(degrees) != k:
        raise DimensionMismatchError("one degree bound per vector argument expected")
    if field.kind == "GF" and field.p <= max(degrees):
        # Too few points for polynomial reconstruction: fall back to checking
        # the whole function on GF(p)^n per argument (function-level identity).
        return [field.p] * k  # type: ignore[list-item]
    return [d + 1 for d in degrees]


def grid_scalars(field: FieldSpec, size: int) -> list:
    return [field.grid_point(i) for i in range(size)]


def _grid_points(field: FieldSpec, n: int, k: int, degree) -> Iterator[tuple]:
    sizes = _grid_sizes(field, k, degree)
    axes = []
    for v in range(k):
        pts = grid_scalars(field, sizes[v])
        axes.extend([pts] * n)
    for flat in itertools.product(*axes):
        yield tuple(Vec(field, flat[v * n : (v + 1) * n]) for v in range(k))


def grid_witness(
    f: Callable[..., Vec],
    *,
    field: FieldSpec,
    n: int,
    k: int,
    degree,
) -> Optional[tuple]:
    """First grid point (odometer order) where ``f`` is nonzero, or None.

    ``f`` maps ``k`` vectors in field^n to a Vec and must be polynomial of
    per-coordinate degree at most the bound in every argument (the caller
    guarantees this).  Over Q, or over GF(p) with p larger than every degree
    bound, a None result is equivalent to ``f`` vanishing identically as a
    polynomial map; over smaller GF(p) it means ``f`` vanishes as a function.
    """
    for point in _grid_points(field, n, k, degree):
        value = f(*point)
        if not value.is_zero():
            return point
    return None


def grid_vanishes(f, *, field: FieldSpec, n: int, k: int, degree) -> bool:
    return grid_witness(f, field=field, n=n, k=k, degree=degree) is None


# ---------------------------------------------------------------------------
# square classes
# ---------------------------------------------------------------------------

_FACTOR_LIMIT = 10**12


def squarefree_part(n: int) -> int:
    """Squarefree part of a nonzero integer (sign preserved)."""
    if n == 0:
        return 0
    if abs(n) > _FACTOR_LIMIT:
        raise ValueError(f"refusing to factor {n} (> {_FACTOR_LIMIT})")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            if e % 2:
                out *= d
        d += 1 if d == 2 else 2
    return sign * out * n


def square_class_rep(field: FieldSpec, x: Scalar) -> Scalar:
    """Canonical representative of the square class of ``x``.

    Over Q: the squarefree integer with the sign of x (num*den reduced).
    Over GF(p): 0, 1 (residues) or the least quadratic non-residue.
    """
    x = field.coerce(x)
    if field.is_zero(x):
        return field.zero
    if field.kind == "Q":
        return Fraction(squarefree_part(x.numerator * x.denominator))  # type: ignore[union-attr]
    p = field.p
    if p == 2:
        return 1
    if pow(x, (p - 1) // 2, p) == 1:
        return 1
    return _least_nonresidue(p)


def _least_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"no non-residue found mod {p}")


def exact_sqrt(field: FieldSpec, x: Scalar):
    """A field element t with t*t == x, or None when x is not a square."""
    x = field.coerce(x)
    if field.is_zero(x):
        return field.zero
    if field.kind == "Q":
        if x < 0:
            return None
        rn, rd = isqrt(x.numerator), isqrt(x.denominator)  # type: ignore[union-attr]
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
        return None
    p = field.p
    if p == 2:
        return x
    if pow(x, (p - 1) // 2, p) != 1:
        return None
    for t in range(1, p):  # p stays small in this artifact; scanning is exact
        if t * t % p == x:
            return t
    return None
