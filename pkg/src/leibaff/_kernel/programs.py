"""Straight-line bracket programs evaluated over identity-check grids.

A :class:`Program` is a short instruction list over vector registers of a
fixed dimension ``n``.  The first ``nvars`` registers hold the grid point;
the remaining ones are filled by instructions:

* ``AFF  dst x y d`` : dst = B_d(x, y) + lam_d x + mu_d y + s_d
* ``BIL  dst x y d`` : dst = B_d(x, y)
* ``MATV dst x . m`` : dst = mats[m] @ x
* ``LIN  dst . . l`` : dst = sum of integer-coefficient terms + const vector

A program "vanishes" when its check register is the zero vector at every
grid point.  Grids follow the identity-checker convention: per-variable
degree bound ``d`` gives points with coordinates in {0, ..., d}; over GF(p)
with p <= max degree the whole field is used instead (function semantics).

The same program is run by the pure interpreter and by the compiled core,
which guarantees both backends decide literally the same question.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from ..exactmath import FieldSpec, Mat, Vec

OP_AFF = 0
OP_BIL = 1
OP_MATV = 2
OP_LIN = 3

__all__ = [
    "OP_AFF",
    "OP_BIL",
    "OP_LIN",
    "OP_MATV",
    "BracketPayload",
    "Program",
    "ProgramBuilder",
]


@dataclass(frozen=True)
class BracketPayload:
    """One bi-affine datum (B, lam, mu, s) in exact field entries."""

    B: tuple  # n x n x n nested tuples
    lam: tuple  # n x n rows
    mu: tuple
    s: tuple  # n entries


@dataclass(frozen=True)
class Program:
    field: FieldSpec
    n: int
    nvars: int
    degrees: tuple  # per-variable degree bounds
    nregs: int
    instrs: tuple  # (op, dst, x, y, idx)
    lin_specs: tuple  # ((coeff, reg), ...), const_idx
    data: tuple  # BracketPayload
    mats: tuple  # n x n rows (tuples)
    consts: tuple  # n entries (tuples)
    check: int

    def grid_sizes(self) -> tuple:
        f = self.field
        if f.kind == "GF" and f.p <= max(self.degrees):
            return (f.p,) * self.nvars
        return tuple(d + 1 for d in self.degrees)

    def point_count(self) -> int:
        total = 1
        for size in self.grid_sizes():
            total *= size ** self.n
        return total

    def digits_of(self, flat: int) -> tuple:
        """Digits of a flat grid index (rightmost digit fastest)."""
        sizes = []
        for size in self.grid_sizes():
            sizes.extend([size] * self.n)
        digits = [0] * len(sizes)
        for pos in range(len(sizes) - 1, -1, -1):
            digits[pos] = flat % sizes[pos]
            flat //= sizes[pos]
        return tuple(digits)

    def point_of(self, flat: int) -> tuple:
        """Grid point (tuple of Vec) at a flat index."""
        digits = self.digits_of(flat)
        f, n = self.field, self.n
        return tuple(
            Vec(f, tuple(f.grid_point(d) for d in digits[v * n : (v + 1) * n]))
            for v in range(self.nvars)
        )


class ProgramBuilder:
    def __init__(self, field: FieldSpec, n: int, degrees: Sequence[int]):
        self.field = field
        self.n = n
        self.degrees = tuple(degrees)
        self.nregs = len(self.degrees)
        self.instrs: list = []
        self.lin_specs: list = []
        self.data: list = []
        self.mats: list = []
        self.consts: list = []
        self._zero_reg: Optional[int] = None

    # -- tables ---------------------------------------------------------------

    def add_datum(self, B, lam: Mat, mu: Mat, s: Vec) -> int:
        payload = BracketPayload(
            tuple(tuple(tuple(row) for row in plane) for plane in B),
            tuple(tuple(r) for r in lam.rows),
            tuple(tuple(r) for r in mu.rows),
            tuple(s.entries),
        )
        self.data.append(payload)
        return len(self.data) - 1

    def add_mat(self, m: Mat) -> int:
        self.mats.append(tuple(tuple(r) for r in m.rows))
        return len(self.mats) - 1

    def add_const(self, v: Vec) -> int:
        self.consts.append(tuple(v.entries))
        return len(self.consts) - 1

    # -- instructions -----------------------------------------------------------

    def _new_reg(self) -> int:
        self.nregs += 1
        return self.nregs - 1

    def var(self, i: int) -> int:
        return i

    def zero(self) -> int:
        if self._zero_reg is None:
            self._zero_reg = self.lin([])
        return self._zero_reg

    def aff(self, x: int, y: int, datum: int = 0) -> int:
        dst = self._new_reg()
        self.instrs.append((OP_AFF, dst, x, y, datum))
        return dst

    def bil(self, x: int, y: int, datum: int = 0) -> int:
        dst = self._new_reg()
        self.instrs.append((OP_BIL, dst, x, y, datum))
        return dst

    def matv(self, m: int, x: int) -> int:
        dst = self._new_reg()
        self.instrs.append((OP_MATV, dst, x, -1, m))
        return dst

    def lin(self, terms, const: Optional[int] = None) -> int:
        dst = self._new_reg()
        self.lin_specs.append((tuple(terms), -1 if const is None else const))
        self.instrs.append((OP_LIN, dst, -1, -1, len(self.lin_specs) - 1))
        return dst

    def add(self, *regs: int) -> int:
        return self.lin([(1, r) for r in regs])

    def sub(self, a: int, b: int) -> int:
        return self.lin([(1, a), (-1, b)])

    def combine(self, *signed_regs) -> int:
        return self.lin(list(signed_regs))

    def finish(self, check: int) -> Program:
        return Program(
            field=self.field,
            n=self.n,
            nvars=len(self.degrees),
            degrees=self.degrees,
            nregs=self.nregs,
            instrs=tuple(self.instrs),
            lin_specs=tuple(self.lin_specs),
            data=tuple(self.data),
            mats=tuple(self.mats),
            consts=tuple(self.consts),
            check=check,
        )
