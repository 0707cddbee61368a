"""Lie closure, structure constants and quadratic envelopes of operator spans."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactcore import (
    ExactMat,
    Poly,
    canonical_rows,
    grlex_key,
    rank,
    rat_from_json,
    rat_to_json,
    solve_linear,
)
from .weylops import DOp, commutator, compose

__all__ = [
    "StructConsts",
    "ClosureFailure",
    "coefficient_matrix",
    "closure",
    "algebra_profile",
    "quadratic_envelope",
    "span_equal",
    "span_rank",
]


def _key(k):
    alpha, e = k
    return grlex_key(alpha) + grlex_key(e)


def coefficient_matrix(ops: Sequence[DOp], keys: Sequence | None = None) -> tuple[ExactMat, list]:
    """Rows are operators, columns are (derivative, monomial) pairs."""
    if keys is None:
        keys = sorted({(a, e) for op in ops for a, e, _ in op.items()}, key=_key)
    index = {k: j for j, k in enumerate(keys)}
    entries = [Fraction(0)] * (len(ops) * len(keys))
    for i, op in enumerate(ops):
        for a, e, v in op.items():
            entries[i * len(keys) + index[(a, e)]] = v
    return ExactMat(len(ops), len(keys), entries), list(keys)


def _from_row(row, keys, dim) -> DOp:
    terms: dict = {}
    for (a, e), v in zip(keys, row):
        if v:
            terms.setdefault(a, {})[e] = v
    return DOp(dim, {a: Poly(dim, t) for a, t in terms.items()})


@dataclass
class StructConsts:
    """[J_a, J_b] = Σ_m c[a][b][m] J_m."""

    n: int
    c: list

    def antisymmetric(self) -> bool:
        return all(self.c[a][b][m] == -self.c[b][a][m]
                   for a in range(self.n) for b in range(self.n) for m in range(self.n))

    def jacobi(self) -> bool:
        n, c = self.n, self.c
        for a in range(n):
            for b in range(a + 1, n):
                for d in range(b + 1, n):
                    for m in range(n):
                        s = sum(c[a][b][p] * c[p][d][m] + c[b][d][p] * c[p][a][m]
                                + c[d][a][p] * c[p][b][m] for p in range(n))
                        if s:
                            return False
        return True

    def to_json(self) -> list:
        return [[a, b, m, rat_to_json(self.c[a][b][m])]
                for a in range(self.n) for b in range(self.n) for m in range(self.n)
                if self.c[a][b][m]]

    @classmethod
    def from_json(cls, n: int, obj: list) -> "StructConsts":
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a, b, m, v in obj:
            c[a][b][m] = rat_from_json(v)
        return cls(n, c)


@dataclass
class ClosureFailure:
    pair: tuple
    residual: DOp

    def __bool__(self):
        return False


def _coords_solver(basis: Sequence[DOp]):
    keys = sorted({(a, e) for op in basis for a, e, _ in op.items()}, key=_key)
    mat, _ = coefficient_matrix(basis, keys)
    cols = mat.transpose()
    index = {k: j for j, k in enumerate(keys)}

    def coords(op: DOp):
        vec = [Fraction(0)] * len(keys)
        for a, e, v in op.items():
            j = index.get((a, e))
            if j is None:
                return None
            vec[j] = v
        return solve_linear(cols, vec)

    return coords


def closure(basis: Sequence[DOp]) -> StructConsts | ClosureFailure:
    """Structure constants if the span is closed under commutators.

    On failure the report carries the first offending pair and the
    commutator itself as residual.
    """
    basis = list(basis)
    n = len(basis)
    if n and rank(coefficient_matrix(basis)[0]) != n:
        raise ValueError("closure needs a linearly independent basis")
    coords = _coords_solver(basis)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            br = commutator(basis[a], basis[b])
            if not br:
                continue
            x = coords(br)
            if x is None:
                return ClosureFailure((a, b), br)
            for m in range(n):
                c[a][b][m] = x[m]
                c[b][a][m] = -x[m]
    sc = StructConsts(n, c)
    if not (sc.antisymmetric() and sc.jacobi()):
        raise ArithmeticError("structure constants violate antisymmetry or Jacobi")
    return sc


def algebra_profile(sc: StructConsts) -> tuple[int, int]:
    """(dimension of the derived algebra, dimension of the center)."""
    n, c = sc.n, sc.c
    derived = rank(ExactMat.from_rows([c[a][b] for a in range(n) for b in range(a + 1, n)], n)) \
        if n > 1 else 0
    # x in center iff Σ_a x_a c[a][b][m] = 0 for all b, m
    rows = [[c[a][b][m] for a in range(n)] for b in range(n) for m in range(n)]
    center = n - (rank(ExactMat.from_rows(rows, n)) if rows else 0)
    return derived, center


def quadratic_envelope(basis: Sequence[DOp]) -> list[DOp]:
    """Canonical independent spanning list of {J_a∘J_b} ∪ {J_a}."""
    basis = list(basis)
    if not basis:
        return []
    dim = basis[0].dim
    gens = list(basis)
    for a in basis:
        for b in basis:
            gens.append(compose(a, b))
    mat, keys = coefficient_matrix(gens)
    rows = canonical_rows(mat.to_rows(), len(keys))
    return [_from_row(r, keys, dim) for r in rows]


def span_rank(ops: Sequence[DOp]) -> int:
    ops = list(ops)
    return rank(coefficient_matrix(ops)[0]) if ops else 0


def span_equal(a: Sequence[DOp], b: Sequence[DOp]) -> bool:
    a, b = list(a), list(b)
    dims = {op.dim for op in a + b}
    if len(dims) > 1:
        raise ValueError("operators of mixed dimension")
    ra, rb, rab = span_rank(a), span_rank(b), span_rank(a + b)
    return ra == rb == rab
