"""The concrete affine-space model: points of F^n with the standard heap
``<a,b,c> = a - b + c`` and scalar action ``act(alpha, a, b) = (1-alpha)a +
alpha b``.

Points and tangent vectors share the :class:`~leibaff.exactmath.Vec`
representation; which one a value denotes is carried by the operation
semantics.  ``translate(o, u, -)`` is the vector-space isomorphism between
the tangent fibres at ``o`` and at ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactmath import DimensionMismatchError, FieldSpec, Mat, Vec

__all__ = ["AffineMapData", "act", "heap", "translate"]


def heap(a: Vec, b: Vec, c: Vec) -> Vec:
    """Ternary heap operation a - b + c."""
    return a - b + c


def act(alpha, a: Vec, b: Vec) -> Vec:
    """Scalar ternary action (1 - alpha) a + alpha b."""
    F = a.field
    alpha = F.coerce(alpha)
    return a.scaled(F.sub(F.one, alpha)) + b.scaled(alpha)


def translate(o: Vec, u: Vec, a: Vec) -> Vec:
    """Translation a - o + u, an isomorphism of the fibres at o and u."""
    return a - o + u


@dataclass(frozen=True)
class AffineMapData:
    """An affine map x -> matrix @ x + offset between coordinate spaces."""

    matrix: Mat
    offset: Vec

    def __post_init__(self):
        if self.matrix.nrows != self.offset.dim:
            raise DimensionMismatchError("offset length differs from matrix row count")

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    @property
    def source_dim(self) -> int:
        return self.matrix.ncols

    @property
    def target_dim(self) -> int:
        return self.matrix.nrows

    @staticmethod
    def identity(field: FieldSpec, n: int) -> "AffineMapData":
        return AffineMapData(Mat.identity(field, n), Vec.zero(field, n))

    @staticmethod
    def linear(matrix: Mat) -> "AffineMapData":
        return AffineMapData(matrix, Vec.zero(matrix.field, matrix.nrows))

    def __call__(self, a: Vec) -> Vec:
        return self.matrix @ a + self.offset

    def linear_part(self) -> Mat:
        return self.matrix

    def compose(self, inner: "AffineMapData") -> "AffineMapData":
        """self after inner."""
        return AffineMapData(self.matrix @ inner.matrix, self.matrix @ inner.offset + self.offset)

    def to_json(self):
        return {"matrix": self.matrix.to_json(), "offset": self.offset.to_json()}

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "AffineMapData":
        return AffineMapData(Mat.from_json(field, obj["matrix"]), Vec.from_json(field, obj["offset"]))
