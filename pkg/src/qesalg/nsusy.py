"""Single-constraint case: supercharge, superhamiltonian and P(H).

Given A and H with [A, H] = L∘A, the block operators

    Q = [[0, 0], [A, 0]],    Hbold = diag(H, L + H)

commute, and in one dimension A∘A† is a polynomial in H.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactcore import ExactMat, grlex_key, solve_linear
from .liestruct import coefficient_matrix
from .weylops import DOp, commutator, compose, formal_adjoint

__all__ = [
    "CofactorError",
    "SuperPair",
    "divide_left",
    "cofactor",
    "build_superpair",
    "block_compose",
    "block_commutator",
    "polynomial_in",
]


class CofactorError(ValueError):
    def __init__(self, remainder: DOp):
        self.remainder = remainder
        from .opdsl import print_op
        super().__init__(f"[A, H] is not a left multiple of A; remainder {print_op(remainder)}")


def _leading(op: DOp) -> tuple:
    return max(op.terms, key=grlex_key)


def divide_left(p: DOp, a: DOp) -> tuple[DOp, DOp]:
    """Greedy division p = q∘a + r.

    Terms of p are removed from the top of the graded order down whenever
    their derivative index dominates the leading index of ``a`` and the
    coefficient is an exact polynomial multiple of a's leading coefficient.
    Whatever cannot be removed is returned as the remainder.
    """
    p._check(a)
    if a.is_zero():
        raise ZeroDivisionError("division by the zero operator")
    lead = _leading(a)
    lead_c = a.terms[lead]
    dim = p.dim
    quot = DOp.zero(dim)
    rem_terms = {}
    work = p
    while work:
        beta = _leading(work)
        c = work.terms[beta]
        step = None
        if all(x <= y for x, y in zip(lead, beta)):
            qc = c.divide_exact(lead_c)
            if qc is not None:
                shift = tuple(y - x for x, y in zip(lead, beta))
                step = DOp(dim, {shift: qc})
        if step is None:
            rem_terms[beta] = c
            work = DOp._raw(dim, {k: v for k, v in work.terms.items() if k != beta})
            continue
        quot = quot + step
        work = work - compose(step, a)
    return quot, DOp(dim, rem_terms)


def cofactor(a: DOp, h: DOp) -> DOp | None:
    """L with [a, h] = L∘a, or None when the division leaves a remainder."""
    q, r = divide_left(commutator(a, h), a)
    return q if r.is_zero() else None


def block_compose(x, y):
    zero = None
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            acc = zero
            for k in range(2):
                term = compose(x[i][k], y[k][j])
                acc = term if acc is None else acc + term
            out[i][j] = acc
    return out


def block_commutator(x, y):
    xy, yx = block_compose(x, y), block_compose(y, x)
    return [[xy[i][j] - yx[i][j] for j in range(2)] for i in range(2)]


@dataclass
class SuperPair:
    A: DOp
    H: DOp
    L: DOp

    @property
    def Q(self):
        z = DOp.zero(self.A.dim)
        return [[z, z], [self.A, z]]

    @property
    def Qdag(self):
        z = DOp.zero(self.A.dim)
        return [[z, formal_adjoint(self.A)], [z, z]]

    @property
    def Hbold(self):
        z = DOp.zero(self.A.dim)
        return [[self.H, z], [z, self.L + self.H]]

    def commutes(self) -> bool:
        return all(b.is_zero() for row in block_commutator(self.Q, self.Hbold) for b in row)

    def anticommutator(self):
        """{Q, Q†} = diag(A†A, AA†) as block matrix."""
        qd = self.Qdag
        a, b = block_compose(self.Q, qd), block_compose(qd, self.Q)
        return [[a[i][j] + b[i][j] for j in range(2)] for i in range(2)]


def build_superpair(a: DOp, h: DOp) -> SuperPair:
    q, r = divide_left(commutator(a, h), a)
    if not r.is_zero():
        raise CofactorError(r)
    pair = SuperPair(a, h, q)
    if not pair.commutes():
        raise ArithmeticError("[Q, Hbold] does not vanish")
    return pair


def polynomial_in(x: DOp, h: DOp, max_deg: int) -> list[Fraction] | None:
    """Coefficients p_0..p_k (trailing zeros dropped) with x = Σ p_j h^j."""
    x._check(h)
    powers = [DOp.identity(h.dim)]
    for _ in range(max_deg):
        powers.append(compose(powers[-1], h))
    mat, keys = coefficient_matrix(powers + [x])
    cols = ExactMat(mat.cols, max_deg + 1,
                    [mat[j, i] for i in range(mat.cols) for j in range(max_deg + 1)])
    rhs = [mat[max_deg + 1, i] for i in range(mat.cols)]
    sol = solve_linear(cols, rhs)
    if sol is None:
        return None
    while len(sol) > 1 and sol[-1] == 0:
        sol.pop()
    return sol
