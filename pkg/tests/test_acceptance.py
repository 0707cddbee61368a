"""End-to-end acceptance checks. Run with ``pytest tests/test_acceptance.py -s``
to see one PASS/FAIL line per criterion."""

import random
import time
from functools import lru_cache

import pytest

from qesalg.liestruct import StructConsts, algebra_profile, closure, quadratic_envelope, span_equal
from qesalg.nsusy import build_superpair, block_commutator, polynomial_in
from qesalg.opdsl import parse_op, print_op
from qesalg.qsolver import member, solve
from qesalg import selftest
from qesalg.subspaces import annihilating_set, ideal_reduce, rectangle_space, triangle_space
from qesalg.weylops import DOp, compose, formal_adjoint

FIRST_ORDER_LIMIT = 10.0   # seconds per n
SECOND_ORDER_LIMIT = 60.0
SATURATION_SHIFT = 2
PROPERTY_CASES = 200
PROPERTY_SEED = 20240601


def report(num, ok, detail=""):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, detail


def j_generators(n):
    texts = ["x*Dx", "y*Dx", "Dx", "Dy", "x*Dy", "y*Dy",
             f"x*(x*Dx + y*Dy - {n})", f"y*(x*Dx + y*Dy - {n})", "1"]
    return [parse_op(t, 2) for t in texts]


@lru_cache(maxsize=None)
def timed_solve(family, n, r):
    space = triangle_space(n) if family == "triangle" else rectangle_space(n)
    t0 = time.perf_counter()
    basis = solve(space, r)
    return basis, time.perf_counter() - t0


def test_criterion_1_first_order():
    details, ok = [], True
    for n in (2, 3, 4):
        basis, dt = timed_solve("triangle", n, 1)
        members = all(member(basis, j) for j in j_generators(n))
        ok &= basis.dim == 9 and members and dt < FIRST_ORDER_LIMIT
        details.append(f"n={n} dim={basis.dim} J-members={members} {dt:.3f}s")
    report(1, ok, "; ".join(details))


def test_criterion_2_second_order():
    details, ok = [], True
    for n in (2, 3):
        basis, dt = timed_solve("triangle", n, 2)
        ok &= basis.dim == 36 and dt < SECOND_ORDER_LIMIT
        details.append(f"n={n} dim={basis.dim} {dt:.3f}s")
    report(2, ok, "; ".join(details))


def test_criterion_3_envelope():
    env = quadratic_envelope(j_generators(2))
    basis, _ = timed_solve("triangle", 2, 2)
    ok = span_equal(env, basis.basis)
    report(3, ok, f"envelope dim={len(env)} solved dim={basis.dim}")


def test_criterion_4_lie_profile():
    basis, _ = timed_solve("triangle", 2, 1)
    sc = closure(basis.basis)
    ok = isinstance(sc, StructConsts)
    profile = algebra_profile(sc) if ok else None
    ok = ok and sc.n == 9 and profile == (8, 1) and sc.antisymmetric() and sc.jacobi()
    report(4, ok, f"dim=9 (derived, center)={profile}")


@pytest.mark.parametrize("n, r", [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2)])
def test_criterion_5_constraint_identity(n, r):
    basis, _ = timed_solve("triangle", n, r)
    ops = annihilating_set(basis.space)
    ok = True
    for h in basis.basis:
        for a in ops:
            red = ideal_reduce(a, h, ops)
            rebuilt = DOp.zero(2)
            for m, op in zip(red.multipliers, ops):
                rebuilt = rebuilt + compose(m, op)
            ok &= red.exact and rebuilt == compose(a, h)
    report(5, ok, f"triangle n={n} r={r}: {basis.dim} elements x {len(ops)} annihilators")


def test_criterion_6_rectangle():
    details, ok = [], True
    for n in (2, 3):
        basis, _ = timed_solve("rectangle", n, 1)
        expected = ["Dx", "x*Dx", f"x^2*Dx - {n}*x", "Dy", "y*Dy", f"y^2*Dy - {n}*y", "1"]
        members = all(member(basis, parse_op(t, 2)) for t in expected)
        ok &= basis.dim == 7 and members
        details.append(f"n={n} dim={basis.dim} sl2+sl2 members={members}")
    report(6, ok, "; ".join(details))


def test_criterion_7_saturation():
    cases = [("triangle", n, 1, 9) for n in (2, 3, 4)] + [("triangle", n, 2, 36) for n in (2, 3)] \
        + [("rectangle", n, 1, 7) for n in (2, 3)]
    details, ok = [], True
    for family, n, r, want in cases:
        space = triangle_space(n) if family == "triangle" else rectangle_space(n)
        got = solve(space, r, SATURATION_SHIFT).dim
        ok &= got == want
        details.append(f"{family}({n}) r={r}: {got}")
    report(7, ok, f"bounds +{SATURATION_SHIFT}: " + ", ".join(details))


def test_criterion_8_susy():
    a, h = parse_op("Dx + x", 1), parse_op("-Dx^2 + x^2", 1)
    pair = build_superpair(a, h)
    comm_zero = all(b.is_zero() for row in block_commutator(pair.Q, pair.Hbold) for b in row)
    aad = compose(a, formal_adjoint(a))
    p = polynomial_in(aad, h, a.order)
    ok = (pair.L == DOp.scalar(2, 1) and comm_zero and aad == h + DOp.identity(1)
          and p == [1, 1] and len(p) - 1 == a.order)
    report(8, ok, f"L={print_op(pair.L)} [Q,H]=0:{comm_zero} P={[str(c) for c in p or []]}")


PROPERTIES = [
    ("leibniz", lambda rng: selftest.leibniz(rng, rng.choice((1, 2)))),
    ("jacobi", lambda rng: selftest.jacobi(rng, rng.choice((1, 2)))),
    ("adjoint anti-homomorphism", lambda rng: selftest.adjoint_antihom(rng, rng.choice((1, 2)))),
    ("nullspace soundness", selftest.nullspace_sound),
    ("cayley-hamilton", selftest.cayley_hamilton),
    ("restriction homomorphism",
     lambda rng: selftest.restriction_hom(rng, j_generators(2), triangle_space(2))),
    ("parser round-trip", lambda rng: selftest.round_trip(rng, rng.choice((1, 2, 3, 4)))),
]


@pytest.mark.parametrize("name, check", PROPERTIES, ids=[p[0] for p in PROPERTIES])
def test_criterion_9_properties(name, check):
    rng = random.Random(PROPERTY_SEED)
    failures = [i for i in range(PROPERTY_CASES) if not check(rng)]
    report(9, not failures, f"{name}: {PROPERTY_CASES - len(failures)}/{PROPERTY_CASES} exact")
