"""Finite-dimensional Leibniz algebras given by structure constants.

Conventions (used consistently everywhere downstream):

* ``c[i][j][k]`` encodes ``[e_i, e_j] = sum_k c[i][j][k] e_k``.
* ``ad_right(a)`` is the matrix of ``x -> [x, a]``; this right-multiplication
  operator is the one that is a derivation for every ``a``.  ``ad_left(a)``
  is ``x -> [a, x]``.  Formulas in the morphism layer use the two
  asymmetrically, so the distinction matters.

Constructors validate the defining identity
``[[a,b],c] = [[a,c],b] + [a,[b,c]]`` on basis triples (trilinearity makes
that sufficient) and reject anything else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .exactmath import (
    DimensionMismatchError,
    FieldMismatchError,
    FieldSpec,
    Mat,
    Subspace,
    Vec,
    kernel_of,
)

__all__ = [
    "LeibnizAlgebra",
    "NotLeibnizError",
    "is_leibniz",
    "leibniz_defect_witness",
]

Tensor = tuple  # c[i][j][k], nested tuples of scalars


class NotLeibnizError(ValueError):
    """The given structure constants violate the Leibniz rule."""


def _tensor_bracket(field: FieldSpec, c: Tensor, x: Vec, y: Vec) -> Vec:
    n = len(c)
    add, mul = field.add, field.mul
    out = [field.zero] * n
    for i, xi in enumerate(x.entries):
        if xi == 0:
            continue
        ci = c[i]
        for j, yj in enumerate(y.entries):
            if yj == 0:
                continue
            w = mul(xi, yj)
            cij = ci[j]
            for k in range(n):
                if cij[k] != 0:
                    out[k] = add(out[k], mul(w, cij[k]))
    return Vec(field, tuple(out))


def leibniz_defect_witness(field: FieldSpec, c: Tensor) -> Optional[tuple[int, int, int]]:
    """First basis triple (i, j, k) violating the Leibniz rule, or None."""
    n = len(c)
    unit = lambda i: Vec.unit(field, n, i)
    for i, j, k in itertools.product(range(n), repeat=3):
        ei, ej, ek = unit(i), unit(j), unit(k)
        lhs = _tensor_bracket(field, c, _tensor_bracket(field, c, ei, ej), ek)
        rhs = _tensor_bracket(field, c, _tensor_bracket(field, c, ei, ek), ej) + _tensor_bracket(
            field, c, ei, _tensor_bracket(field, c, ej, ek)
        )
        if lhs != rhs:
            return (i, j, k)
    return None


def is_leibniz(field: FieldSpec, c: Tensor) -> bool:
    """Whether ``[[e_i,e_j],e_k] = [[e_i,e_k],e_j] + [e_i,[e_j,e_k]]`` holds
    for all basis triples."""
    return leibniz_defect_witness(field, c) is None


def _coerce_tensor(field: FieldSpec, c) -> Tensor:
    return tuple(tuple(tuple(field.coerce(v) for v in row) for row in plane) for plane in c)


@dataclass(frozen=True)
class LeibnizAlgebra:
    field: FieldSpec
    dim: int
    c: Tensor

    def __post_init__(self):
        if len(self.c) != self.dim or any(
            len(plane) != self.dim or any(len(row) != self.dim for row in plane) for plane in self.c
        ):
            raise DimensionMismatchError("structure tensor must be dim x dim x dim")
        witness = leibniz_defect_witness(self.field, self.c)
        if witness is not None:
            raise NotLeibnizError(f"Leibniz rule fails on basis triple {witness}")

    @staticmethod
    def make(field: FieldSpec, c) -> "LeibnizAlgebra":
        c = _coerce_tensor(field, c)
        return LeibnizAlgebra(field, len(c), c)

    @staticmethod
    def abelian(field: FieldSpec, dim: int) -> "LeibnizAlgebra":
        z = field.zero
        c = tuple(tuple((z,) * dim for _ in range(dim)) for _ in range(dim))
        return LeibnizAlgebra(field, dim, c)

    @staticmethod
    def from_table(field: FieldSpec, dim: int, table: dict) -> "LeibnizAlgebra":
        """Build from a sparse table {(i, j): {k: coeff}} of nonzero brackets."""
        c = [[[field.zero] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), combo in table.items():
            for k, v in combo.items():
                c[i][j][k] = field.coerce(v)
        return LeibnizAlgebra(field, dim, tuple(tuple(tuple(r) for r in p) for p in c))

    # -- basic operations ----------------------------------------------------

    def bracket(self, x: Vec, y: Vec) -> Vec:
        if x.field != self.field or y.field != self.field:
            raise FieldMismatchError("bracket arguments over a different field")
        if x.dim != self.dim or y.dim != self.dim:
            raise DimensionMismatchError("bracket arguments of wrong length")
        return _tensor_bracket(self.field, self.c, x, y)

    def basis(self) -> Iterator[Vec]:
        return (Vec.unit(self.field, self.dim, i) for i in range(self.dim))

    def ad_right(self, a: Vec) -> Mat:
        """Matrix of x -> [x, a]."""
        cols = [self.bracket(e, a) for e in self.basis()]
        return Mat(self.field, tuple(zip(*(col.entries for col in cols))))

    def ad_left(self, a: Vec) -> Mat:
        """Matrix of x -> [a, x]."""
        cols = [self.bracket(a, e) for e in self.basis()]
        return Mat(self.field, tuple(zip(*(col.entries for col in cols))))

    def is_abelian(self) -> bool:
        return all(v == 0 for p in self.c for r in p for v in r)

    # -- derived structure ----------------------------------------------------

    def leib_ideal(self) -> Subspace:
        """Span of the squares [x, x].

        Generated by [e_i,e_i] together with the polarizations
        [e_i,e_j] + [e_j,e_i]; over GF(2), where polarization divides by two,
        the squares of all vectors are enumerated instead.
        """
        gens = []
        es = list(self.basis())
        for i, ei in enumerate(es):
            gens.append(self.bracket(ei, ei))
            for j in range(i + 1, self.dim):
                gens.append(self.bracket(ei, es[j]) + self.bracket(es[j], ei))
        if self.field.kind == "GF" and self.field.p == 2:
            for coords in itertools.product(range(2), repeat=self.dim):
                v = Vec.make(self.field, coords)
                gens.append(self.bracket(v, v))
        return Subspace.from_vectors(self.field, self.dim, gens)

    def is_lie(self) -> bool:
        return self.leib_ideal().is_zero()

    def left_center(self) -> Subspace:
        """{x : [x, l] = 0}: kernel of the stacked maps x -> [x, e_j]."""
        rows = []
        for e in self.basis():
            rows.extend(self.ad_right(e).rows)
        return kernel_of(Mat(self.field, tuple(rows)))

    def right_center(self) -> Subspace:
        """{x : [l, x] = 0}: kernel of the stacked maps x -> [e_j, x]."""
        rows = []
        for e in self.basis():
            rows.extend(self.ad_left(e).rows)
        return kernel_of(Mat(self.field, tuple(rows)))

    def is_derivation(self, D: Mat) -> bool:
        """[D a, b] + [a, D b] = D [a, b] on basis pairs."""
        es = list(self.basis())
        for ei in es:
            Dei = D @ ei
            for ej in es:
                lhs = self.bracket(Dei, ej) + self.bracket(ei, D @ ej)
                if lhs != D @ self.bracket(ei, ej):
                    return False
        return True

    def in_centroid(self, kappa: Mat) -> bool:
        """kappa [a, b] = [kappa a, b] on basis pairs."""
        es = list(self.basis())
        for ei in es:
            kei = kappa @ ei
            for ej in es:
                if kappa @ self.bracket(ei, ej) != self.bracket(kei, ej):
                    return False
        return True

    def centroid_basis(self) -> Subspace:
        """Canonical basis of the centroid, as vectorized (row-major) matrices."""
        F, n = self.field, self.dim
        rows = []
        es = list(self.basis())
        # kappa[e_i,e_j] - [kappa e_i, e_j] = 0, linear in the n^2 entries of kappa
        for i in range(n):
            for j in range(n):
                bij = self.bracket(es[i], es[j])
                for out in range(n):
                    coeff = [F.zero] * (n * n)
                    # kappa acts on bij: row `out` of kappa dotted with bij
                    for m in range(n):
                        coeff[out * n + m] = F.add(coeff[out * n + m], bij.entries[m])
                    # [kappa e_i, e_j] = sum_m kappa[m][i] [e_m, e_j]
                    for m in range(n):
                        coeff[m * n + i] = F.sub(coeff[m * n + i], self.c[m][j][out])
                    rows.append(tuple(coeff))
        return kernel_of(Mat(F, tuple(rows)))

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "field": self.field.spec_to_json(),
            "dim": self.dim,
            "c": [[[self.field.to_json(v) for v in row] for row in plane] for plane in self.c],
        }

    @staticmethod
    def from_json(obj) -> "LeibnizAlgebra":
        field = FieldSpec.spec_from_json(obj["field"])
        c = tuple(
            tuple(tuple(field.parse(v) for v in row) for row in plane) for plane in obj["c"]
        )
        alg = LeibnizAlgebra(field, int(obj["dim"]), c)
        return alg
