import random
from fractions import Fraction

import pytest

from qesalg.liestruct import (
    ClosureFailure,
    StructConsts,
    algebra_profile,
    closure,
    quadratic_envelope,
    span_equal,
)
from qesalg.opdsl import parse_op
from qesalg.qsolver import solve
from qesalg.subspaces import triangle_space
from qesalg.weylops import DOp, commutator


def j_generators(n):
    texts = ["x*Dx", "y*Dx", "Dx", "Dy", "x*Dy", "y*Dy",
             f"x*(x*Dx + y*Dy - {n})", f"y*(x*Dx + y*Dy - {n})", "1"]
    return [parse_op(t, 2) for t in texts]


def test_j_closes_u3_profile():
    sc = closure(j_generators(2))
    assert isinstance(sc, StructConsts)
    assert sc.antisymmetric() and sc.jacobi()
    assert algebra_profile(sc) == (8, 1)


def test_structure_constants_reproduce_brackets():
    js = j_generators(3)
    sc = closure(js)
    for a in range(9):
        for b in range(9):
            rebuilt = DOp.zero(2)
            for m in range(9):
                if sc.c[a][b][m]:
                    rebuilt = rebuilt + js[m].scale(sc.c[a][b][m])
            assert rebuilt == commutator(js[a], js[b])


def test_closure_failure():
    res = closure([parse_op("Dx", 1), parse_op("x^2*Dx", 1)])
    assert isinstance(res, ClosureFailure) and not res
    assert res.pair == (0, 1)
    assert res.residual == parse_op("2*x*Dx", 1)


def test_closure_abelian():
    sc = closure([DOp.identity(2)])
    assert sc.c == [[[0]]]
    assert algebra_profile(closure([parse_op("Dx", 2), parse_op("Dy", 2), DOp.identity(2)])) == (0, 3)


def test_closure_needs_independent_basis():
    with pytest.raises(ValueError):
        closure([parse_op("Dx", 1), parse_op("2*Dx", 1)])


def test_affine_profile():
    # [x Dx, Dx] = -Dx; 1 is central
    sc = closure([parse_op("x*Dx", 1), parse_op("Dx", 1), DOp.identity(1)])
    assert sc.c[0][1] == [0, -1, 0]
    assert algebra_profile(sc) == (1, 1)


def test_envelope_examples():
    assert len(quadratic_envelope(j_generators(2))) == 36
    env = quadratic_envelope([parse_op("Dx", 1)])
    assert span_equal(env, [parse_op("Dx^2", 1), parse_op("Dx", 1)]) and len(env) == 2
    assert len(quadratic_envelope([DOp.identity(1)])) == 1


def test_envelope_equals_second_order_space():
    assert span_equal(quadratic_envelope(j_generators(2)), solve(triangle_space(2), 2).basis)


def test_envelope_invariant_under_basis_change():
    rng = random.Random(8)
    js = j_generators(2)
    # unimodular: identity plus strictly lower-triangular integer part
    mixed = []
    for i, j in enumerate(js):
        op = j
        for k in range(i):
            op = op + js[k].scale(rng.randint(-2, 2))
        mixed.append(op)
    assert len(quadratic_envelope(mixed)) == 36
    assert span_equal(quadratic_envelope(mixed), quadratic_envelope(js))


def test_span_equal_basic():
    dx, dy = parse_op("Dx", 2), parse_op("Dy", 2)
    assert span_equal([dx], [dx.scale(2)])
    assert not span_equal([dx], [dy])
    a, b, c = [dx, dy], [dx + dy, dx - dy], [dy.scale(Fraction(1, 3)), dx.scale(5)]
    assert span_equal(a, b) and span_equal(b, c) and span_equal(a, c)
    assert span_equal(a, a)


def test_struct_consts_json_round_trip():
    sc = closure(j_generators(2))
    back = StructConsts.from_json(9, sc.to_json())
    assert back.c == sc.c
