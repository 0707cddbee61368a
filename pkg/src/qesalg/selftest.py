"""Randomized property checks bundled with the CLI (``qesalg selftest``)."""

from __future__ import annotations

import random

from .exactcore import char_poly, nullspace
from .opdsl import parse_op, print_op
from .randgen import rand_combination, rand_dop, rand_low_rank, rand_matrix, rand_poly
from .spectral import restrict
from .subspaces import triangle_space
from .weylops import apply, commutator, compose, formal_adjoint


def _j_generators(n: int):
    texts = ["x*Dx", "y*Dx", "Dx", "Dy", "x*Dy", "y*Dy",
             f"x*(x*Dx + y*Dy - {n})", f"y*(x*Dx + y*Dy - {n})", "1"]
    return [parse_op(t, 2) for t in texts]


def leibniz(rng, dim):
    p, q, f = rand_dop(rng, dim), rand_dop(rng, dim), rand_poly(rng, dim, 4, 5)
    return apply(compose(p, q), f) == apply(p, apply(q, f))


def jacobi(rng, dim):
    a, b, c = (rand_dop(rng, dim) for _ in range(3))
    s = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
         + commutator(c, commutator(a, b)))
    return s.is_zero()


def adjoint_antihom(rng, dim):
    p, q = rand_dop(rng, dim), rand_dop(rng, dim)
    return formal_adjoint(compose(p, q)) == compose(formal_adjoint(q), formal_adjoint(p))


def nullspace_sound(rng):
    rows, cols = rng.randint(1, 6), rng.randint(1, 8)
    m = rand_low_rank(rng, rows, cols, rng.randint(0, min(rows, cols))) if rng.random() < 0.5 \
        else rand_matrix(rng, rows, cols)
    return all(not any(m @ v) for v in nullspace(m))


def cayley_hamilton(rng):
    n = rng.randint(1, 5)
    m = rand_matrix(rng, n, n)
    return char_poly(m).at_matrix(m).is_zero()


def restriction_hom(rng, gens, space):
    p, q = rand_combination(rng, gens), rand_combination(rng, gens)
    return restrict(compose(p, q), space) == restrict(p, space) @ restrict(q, space)


def round_trip(rng, dim):
    op = rand_dop(rng, dim)
    return parse_op(print_op(op), dim) == op


def run_all(rng: random.Random, cases: int = 50) -> list[tuple[str, bool]]:
    gens = _j_generators(2)
    space = triangle_space(2)
    checks = [
        ("leibniz", lambda: leibniz(rng, rng.choice((1, 2)))),
        ("jacobi", lambda: jacobi(rng, rng.choice((1, 2)))),
        ("adjoint anti-homomorphism", lambda: adjoint_antihom(rng, rng.choice((1, 2)))),
        ("nullspace soundness", lambda: nullspace_sound(rng)),
        ("cayley-hamilton", lambda: cayley_hamilton(rng)),
        ("restriction homomorphism", lambda: restriction_hom(rng, gens, space)),
        ("parser round-trip", lambda: round_trip(rng, rng.choice((1, 2, 3, 4)))),
    ]
    return [(name, all(fn() for _ in range(cases))) for name, fn in checks]
