import random
from fractions import Fraction

import pytest

from qesalg.exactcore import Poly
from qesalg.opdsl import parse_op
from qesalg.randgen import rand_dop, rand_poly
from qesalg.subspaces import annihilating_set, triangle_space
from qesalg.weylops import DOp, apply, commutator, compose, formal_adjoint, is_formally_symmetric


def op1(text):
    return parse_op(text, 1)


def op2(text):
    return parse_op(text, 2)


def test_apply_examples():
    x = Poly.var(0, 1)
    assert apply(op1("Dx"), x * x) == x.scale(2)
    for k in range(6):
        assert apply(op1("x*Dx"), x**k) == (x**k).scale(k)
    X, Y = Poly.var(0, 2), Poly.var(1, 2)
    assert apply(op2("Dx*Dy"), X * X * Y) == X.scale(2)


def test_apply_dim_mismatch():
    with pytest.raises(ValueError):
        apply(op1("Dx"), Poly.var(0, 2))


def test_compose_examples():
    assert compose(op1("Dx"), op1("x")) == op1("x*Dx + 1")
    # x∂(x²∂f) = 2x² f' + x³ f''
    assert compose(op1("x*Dx"), op1("x^2*Dx")) == op1("x^3*Dx^2 + 2*x^2*Dx")
    rng = random.Random(1)
    for _ in range(20):
        p = rand_dop(rng, 2)
        assert compose(p, DOp.identity(2)) == p
        assert compose(DOp.identity(2), p) == p


def test_commutator_examples():
    assert commutator(op1("Dx"), op1("x")) == DOp.identity(1)
    assert commutator(op1("x*Dx"), op1("x^2*Dx")) == op1("x^2*Dx")


@pytest.mark.parametrize("n", [2, 3])
def test_triangle_annihilators_commute(n):
    ops = annihilating_set(triangle_space(n))
    for a in ops:
        for b in ops:
            assert commutator(a, b).is_zero()


def test_adjoint_examples():
    assert formal_adjoint(op1("Dx")) == op1("-Dx")
    assert formal_adjoint(op1("x*Dx")) == op1("-x*Dx - 1")
    rng = random.Random(4)
    for _ in range(30):
        p = rand_dop(rng, rng.choice((1, 2)))
        assert formal_adjoint(formal_adjoint(p)) == p


def test_symmetry_predicate():
    assert is_formally_symmetric(op1("-Dx^2 + x^2"))
    assert not is_formally_symmetric(op1("Dx"))
    # adjoint is -x*Dx - 1/2
    assert formal_adjoint(op1("x*Dx + 1/2")) == op1("-x*Dx - 1/2")
    assert not is_formally_symmetric(op1("x*Dx + 1/2"))


def test_leibniz_soundness_random():
    rng = random.Random(10)
    for _ in range(60):
        d = rng.choice((1, 2, 3))
        p, q, f = rand_dop(rng, d), rand_dop(rng, d), rand_poly(rng, d, 4, 5)
        assert apply(compose(p, q), f) == apply(p, apply(q, f))


def test_order_bookkeeping():
    rng = random.Random(12)
    for _ in range(40):
        p, q = rand_dop(rng, 2), rand_dop(rng, 2)
        if p and q:
            assert compose(p, q).order <= p.order + q.order


def test_antisymmetry_and_jacobi():
    rng = random.Random(13)
    for _ in range(30):
        a, b, c = (rand_dop(rng, 2, order=2, degree=2) for _ in range(3))
        assert commutator(a, b) == -commutator(b, a)
        jac = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
               + commutator(c, commutator(a, b)))
        assert jac.is_zero()


def test_normal_form_merges_terms():
    op = op2("x*Dx + Dx*x")
    assert op == op2("2*x*Dx + 1")
    assert op.terms[(1, 0)] == Poly.var(0, 2).scale(2)


def test_dop_json_round_trip():
    op = op2("1/2*x^2*Dx*Dy - y*Dy + 3")
    obj = op.to_json()
    assert [t["deriv"] for t in obj["terms"]] == [[0, 0], [0, 1], [1, 1]]
    assert DOp.from_json(obj) == op


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(op1("Dx"), op2("Dx"))


def test_scalar_equality():
    assert op1("Dx*x - x*Dx") == 1
    assert DOp.scalar(Fraction(3, 2), 2) == Fraction(3, 2)
