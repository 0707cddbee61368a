"""Seeded random generators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactcore import ExactMat, Poly, monomials_upto
from .weylops import DOp


def rand_rat(rng: random.Random, size: int = 5) -> Fraction:
    den = rng.randint(1, 3)
    return Fraction(rng.randint(-size, size), den)


def rand_poly(rng: random.Random, dim: int, degree: int = 2, terms: int = 3) -> Poly:
    monos = monomials_upto(dim, degree)
    return Poly(dim, {rng.choice(monos): rand_rat(rng) for _ in range(rng.randint(0, terms))})


def rand_dop(rng: random.Random, dim: int, order: int = 2, degree: int = 2, terms: int = 3) -> DOp:
    derivs = monomials_upto(dim, order)
    return DOp(dim, {rng.choice(derivs): rand_poly(rng, dim, degree, 2)
                     for _ in range(rng.randint(1, terms))})


def rand_matrix(rng: random.Random, rows: int, cols: int, size: int = 5) -> ExactMat:
    return ExactMat(rows, cols, [rand_rat(rng, size) for _ in range(rows * cols)])


def rand_low_rank(rng: random.Random, rows: int, cols: int, rnk: int) -> ExactMat:
    """Product of random rows x rnk and rnk x cols factors."""
    return rand_matrix(rng, rows, rnk, 3) @ rand_matrix(rng, rnk, cols, 3)


def rand_combination(rng: random.Random, ops, size: int = 3) -> DOp:
    out = DOp.zero(ops[0].dim)
    for op in ops:
        out = out + op.scale(rng.randint(-size, size))
    return out
