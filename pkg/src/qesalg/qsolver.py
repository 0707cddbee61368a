"""Invariance solver: all order-r operators mapping a monomial space into itself.

The constraint [A_k, H] ≈ 0 is imposed in its equivalent form H·F ⊆ F.  The
coefficient of every derivative slot is a polynomial of bounded degree with
unknown coefficients; the conditions are linear in those unknowns, so the
solution space is the exact kernel of one rational matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .exactcore import (
    ExactMat,
    Poly,
    canonical_rows,
    falling,
    grlex_key,
    monomials_upto,
    nullspace,
    rank,
    solve_linear,
)
from .subspaces import MonoSpace
from .weylops import DOp, apply

log = logging.getLogger(__name__)

__all__ = [
    "Ansatz",
    "QESBasis",
    "VerificationError",
    "build_ansatz",
    "invariance_system",
    "solve",
    "member",
    "Membership",
    "check_invariant",
]

BoundRule = Callable[[tuple], int] | int | dict | None


class VerificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Ansatz:
    dim: int
    order: int
    slots: tuple  # ((deriv, (coefficient exponents, ...)), ...)

    @property
    def columns(self) -> list[tuple[tuple, tuple]]:
        return [(alpha, e) for alpha, exps in self.slots for e in exps]

    @property
    def n_unknowns(self) -> int:
        return sum(len(exps) for _, exps in self.slots)

    @property
    def bounds(self) -> dict:
        return {alpha: (max(sum(e) for e in exps) if exps else -1) for alpha, exps in self.slots}

    def column_index(self) -> dict:
        return {c: i for i, c in enumerate(self.columns)}

    def to_dop(self, vec: Sequence) -> DOp:
        terms: dict = {}
        for (alpha, e), v in zip(self.columns, vec):
            if v:
                terms.setdefault(alpha, {})[e] = v
        return DOp(self.dim, {a: Poly(self.dim, t) for a, t in terms.items()})

    def vector(self, op: DOp) -> list[Fraction] | None:
        """Coordinates of ``op`` in the unknowns, None if it leaves the slots."""
        idx = self.column_index()
        vec = [Fraction(0)] * len(idx)
        for alpha, e, v in op.items():
            j = idx.get((alpha, e))
            if j is None:
                return None
            vec[j] = v
        return vec


def _resolve_bounds(dim: int, r: int, bound_rule: BoundRule) -> dict:
    derivs = monomials_upto(dim, r)
    if bound_rule is None:
        bound_rule = 0
    if isinstance(bound_rule, int):
        return {a: sum(a) + r + bound_rule for a in derivs}
    if isinstance(bound_rule, dict):
        return {a: int(bound_rule.get(a, sum(a) + r)) for a in derivs}
    return {a: int(bound_rule(a)) for a in derivs}


def build_ansatz(d: int, r: int, bound_rule: BoundRule = None) -> Ansatz:
    """General order-``r`` operator with polynomial coefficients.

    ``bound_rule`` gives the coefficient degree bound per derivative index:
    None means |α| + r, an int k means |α| + r + k, a dict overrides per
    index, and a callable is evaluated on each index.
    """
    if d < 1 or r < 0:
        raise ValueError("need d >= 1 and r >= 0")
    bounds = _resolve_bounds(d, r, bound_rule)
    slots = tuple((a, tuple(monomials_upto(d, bounds[a]))) for a in monomials_upto(d, r))
    return Ansatz(d, r, slots)


def _constraint_rows(ans: Ansatz, space: MonoSpace, m: tuple) -> list[list]:
    # image of x^m under each unknown, then keep the components outside the span
    images: dict = {}
    for j, (alpha, e) in enumerate(ans.columns):
        if any(a > v for a, v in zip(alpha, m)):
            continue
        f = 1
        for v, a in zip(m, alpha):
            f *= falling(v, a)
        out = tuple(v - a + k for v, a, k in zip(m, alpha, e))
        if out in space:
            continue
        images.setdefault(out, {})[j] = f
    rows = []
    for out in sorted(images, key=grlex_key):
        rows.append(images[out])
    return rows


def invariance_system(ans: Ansatz, space: MonoSpace) -> ExactMat:
    """Linear conditions for the ansatz to map span(space) into itself.

    Rows are ordered by input monomial, then by outgoing monomial (graded-lex);
    columns follow ``ans.columns``.
    """
    if ans.dim != space.dim:
        raise ValueError("ansatz and space dimensions differ")
    n = ans.n_unknowns
    entries = []
    count = 0
    for m in space.exps:
        for row in _constraint_rows(ans, space, m):
            dense = [0] * n
            for j, v in row.items():
                dense[j] = v
            entries.extend(dense)
            count += 1
    return ExactMat(count, n, entries)


def check_invariant(op: DOp, space: MonoSpace) -> tuple[tuple, Poly] | None:
    """First (monomial, outside residual) violating invariance, or None."""
    for m in space.exps:
        res = space.outside(apply(op, Poly.monomial(m)))
        if res:
            return m, res
    return None


@dataclass
class QESBasis:
    space: MonoSpace
    order: int
    basis: list
    bounds: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ansatz(self) -> Ansatz:
        return build_ansatz(self.space.dim, self.order, dict(self.bounds))

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "order": self.order,
            "dim": self.dim,
            "bounds": [{"deriv": list(a), "max_degree": d}
                       for a, d in sorted(self.bounds.items(), key=lambda t: grlex_key(t[0]))],
            "warnings": list(self.warnings),
            "basis": [op.to_json() for op in self.basis],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QESBasis":
        space = MonoSpace.from_json(obj["space"])
        order = int(obj["order"])
        bounds = {tuple(b["deriv"]): int(b["max_degree"]) for b in obj.get("bounds", [])}
        if not bounds:
            bounds = _resolve_bounds(space.dim, order, None)
        basis = [DOp.from_json(o) for o in obj["basis"]]
        if "dim" in obj and int(obj["dim"]) != len(basis):
            raise ValueError(f"declared dim {obj['dim']} but {len(basis)} basis elements")
        return cls(space, order, basis, bounds, list(obj.get("warnings", [])))


def _space_index(space: MonoSpace) -> int:
    fam = space.family
    return fam[1] if fam else space.max_degree


def solve(space: MonoSpace, r: int, bound_rule: BoundRule = None) -> QESBasis:
    """Exact basis of the order-``r`` operators preserving span(space)."""
    ans = build_ansatz(space.dim, r, bound_rule)
    mat = invariance_system(ans, space)
    kern = nullspace(mat)
    vecs = canonical_rows(kern, ans.n_unknowns)
    basis = [ans.to_dop(v) for v in vecs]
    for op in basis:
        bad = check_invariant(op, space)
        if bad is not None:
            raise VerificationError(f"basis element fails on monomial {bad[0]}: residual {bad[1].to_text()}")
    warnings = []
    if _space_index(space) < r:
        warnings.append(
            f"small-n: family index {_space_index(space)} < order {r}; "
            "operators of order above the index are constrained only by the degree bounds"
        )
        log.info(warnings[-1])
    log.debug("solve %s r=%d: %d unknowns, %d rows, dim %d",
              space, r, ans.n_unknowns, mat.rows, len(basis))
    return QESBasis(space, r, basis, ans.bounds, warnings)


class Membership(NamedTuple):
    ok: bool
    coords: list | None

    def __bool__(self):
        return self.ok


def member(basis: QESBasis, candidate: DOp) -> Membership:
    """Exact span membership; coordinates refer to ``basis.basis``."""
    if candidate.dim != basis.space.dim or candidate.order > basis.order:
        return Membership(False, None)
    ans = basis.ansatz
    vec = ans.vector(candidate)
    if vec is None:
        return Membership(False, None)
    if not basis.basis:
        ok = not any(vec)
        return Membership(ok, [] if ok else None)
    cols = [ans.vector(b) for b in basis.basis]
    mat = ExactMat(len(vec), len(cols), [cols[j][i] for i in range(len(vec)) for j in range(len(cols))])
    coords = solve_linear(mat, vec)
    if coords is None:
        return Membership(False, None)
    return Membership(True, coords)


def is_independent(ops: Sequence[DOp]) -> bool:
    from .liestruct import coefficient_matrix
    mat, _ = coefficient_matrix(ops)
    return rank(mat) == len(ops)
