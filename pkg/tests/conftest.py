"""Shared helpers: deterministic randomness and quick datum builders."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from leibaff.affgebra import BiAffineBracket
from leibaff.exactmath import GF, FieldSpec, Mat, Q, Vec
from leibaff.catalog import algebra


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def rand_scalar(field: FieldSpec, rng: random.Random, span: int = 4):
    if field.kind == "GF":
        return rng.randrange(field.p)
    num = rng.randrange(-span, span + 1)
    den = rng.randrange(1, 4)
    return Fraction(num, den)


def rand_vec(field: FieldSpec, rng: random.Random, n: int, span: int = 4) -> Vec:
    return Vec.make(field, [rand_scalar(field, rng, span) for _ in range(n)])


def rand_mat(field: FieldSpec, rng: random.Random, n: int, span: int = 4) -> Mat:
    return Mat.make(field, [[rand_scalar(field, rng, span) for _ in range(n)] for _ in range(n)])


def rand_datum(L, rng: random.Random, span: int = 4) -> BiAffineBracket:
    """Arbitrary (lam, mu, s) over a fixed fibre: always an affgebra datum."""
    n = L.dim
    return BiAffineBracket(
        L.field, n, L.c, rand_mat(L.field, rng, n, span), rand_mat(L.field, rng, n, span),
        rand_vec(L.field, rng, n, span),
    )


def catalog_fibres(field: FieldSpec):
    return [algebra(name, field) for name in ("L1(1)", "L1(2)", "L2", "L3", "L4", "L7", "sl2")]
