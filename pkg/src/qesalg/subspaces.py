"""Monomial annihilator subspaces and their annihilating operators."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactcore import ExactMat, Poly, canonical_rows, grlex_key, monomials_upto, nullspace
from .weylops import DOp, apply, compose

__all__ = [
    "MonoSpace",
    "OpSet",
    "triangle_space",
    "rectangle_space",
    "family_space",
    "annihilating_set",
    "joint_kernel",
    "check_complete",
    "ideal_reduce",
    "Reduction",
]


class MonoSpace:
    """Span of finitely many monomials, kept in graded-lex order."""

    __slots__ = ("dim", "exps", "label", "_index")

    def __init__(self, dim: int, exps, label: str | None = None):
        exps = {tuple(int(v) for v in e) for e in exps}
        if not exps:
            raise ValueError("monomial space must be nonempty")
        for e in exps:
            if len(e) != dim or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for dimension {dim}")
        self.dim = dim
        self.exps = tuple(sorted(exps, key=grlex_key))
        self.label = label
        self._index = {e: i for i, e in enumerate(self.exps)}

    def __len__(self):
        return len(self.exps)

    def __iter__(self):
        return iter(self.exps)

    def __contains__(self, e) -> bool:
        return tuple(e) in self._index

    def index(self, e) -> int:
        return self._index[tuple(e)]

    @property
    def max_degree(self) -> int:
        return max(sum(e) for e in self.exps)

    @property
    def family(self) -> tuple[str, int] | None:
        if self.label and ":" in self.label:
            name, n = self.label.split(":", 1)
            if name in ("triangle", "rectangle"):
                return name, int(n)
        return None

    def basis(self) -> list[Poly]:
        return [Poly.monomial(e) for e in self.exps]

    def outside(self, p: Poly) -> Poly:
        """Component of ``p`` not in the span."""
        return Poly._raw(p.dim, {e: c for e, c in p.terms.items() if e not in self._index})

    def __eq__(self, other):
        if not isinstance(other, MonoSpace):
            return NotImplemented
        return self.dim == other.dim and self.exps == other.exps

    def __hash__(self):
        return hash((self.dim, self.exps))

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"MonoSpace(dim={self.dim}, size={len(self)}{tag})"

    def to_json(self) -> dict:
        out = {"dim": self.dim, "exps": [list(e) for e in self.exps]}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MonoSpace":
        return cls(int(obj["dim"]), obj["exps"], obj.get("label"))


@dataclass(frozen=True)
class OpSet:
    ops: tuple
    space: MonoSpace | None = None

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        dims = {op.dim for op in self.ops}
        if len(dims) > 1:
            raise ValueError("operators of mixed dimension")

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __getitem__(self, k):
        return self.ops[k]

    @property
    def dim(self) -> int:
        if self.ops:
            return self.ops[0].dim
        return self.space.dim

    def to_json(self) -> list:
        return [op.to_json() for op in self.ops]

    @classmethod
    def from_json(cls, obj: list, space: MonoSpace | None = None) -> "OpSet":
        return cls(tuple(DOp.from_json(o) for o in obj), space)


def triangle_space(n: int) -> MonoSpace:
    """{x^k y^l : k + l <= n}."""
    if n < 1:
        raise ValueError("triangle family needs n >= 1")
    return family_space("triangle", n)


def rectangle_space(n: int) -> MonoSpace:
    """{x^k y^l : k <= n, l <= n}."""
    if n < 1:
        raise ValueError("rectangle family needs n >= 1")
    return family_space("rectangle", n)


def family_space(name: str, n: int) -> MonoSpace:
    """Built-in family, also accepting the degenerate n = 0 member."""
    if n < 0:
        raise ValueError("family index must be >= 0")
    if name == "triangle":
        exps = [(k, l) for k in range(n + 1) for l in range(n + 1 - k)]
    elif name == "rectangle":
        exps = [(k, l) for k in range(n + 1) for l in range(n + 1)]
    else:
        raise ValueError(f"unknown family {name!r}")
    return MonoSpace(2, exps, f"{name}:{n}")


def annihilating_set(space: MonoSpace) -> OpSet:
    fam = space.family
    if fam is None:
        raise ValueError("annihilating_set only knows the triangle and rectangle families")
    name, n = fam
    if name == "triangle":
        ops = [DOp.partial((k, n - k + 1)) for k in range(n + 2)]
    else:
        ops = [DOp.partial((n + 1, 0)), DOp.partial((0, n + 1))]
    return OpSet(tuple(ops), space)


def joint_kernel(ops: OpSet | Sequence[DOp], max_degree: int, dim: int | None = None):
    """Polynomials of degree <= max_degree killed by every operator.

    Returns a MonoSpace when the kernel is spanned by monomials, otherwise a
    list of Poly (RREF basis in graded-lex coordinates).
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    ops = list(ops)
    if dim is None:
        if not ops:
            raise ValueError("dimension needed for an empty operator set")
        dim = ops[0].dim
    monos = monomials_upto(dim, max_degree)
    images = [[apply(op, Poly.monomial(m)) for m in monos] for op in ops]
    rows = []
    for per_op in images:
        outs = sorted({e for img in per_op for e in img.terms}, key=grlex_key)
        for e in outs:
            rows.append([img.terms.get(e, Fraction(0)) for img in per_op])
    mat = ExactMat.from_rows(rows, len(monos)) if rows else ExactMat(0, len(monos))
    kern = canonical_rows(nullspace(mat), len(monos))
    if all(sum(1 for v in r if v) == 1 for r in kern):
        if not kern:
            return []
        return MonoSpace(dim, [monos[next(j for j, v in enumerate(r) if v)] for r in kern])
    return [Poly(dim, {monos[j]: v for j, v in enumerate(r) if v}) for r in kern]


def check_complete(ops: OpSet | Sequence[DOp], space: MonoSpace, slack: int = 1) -> bool:
    """Degree-bounded completeness probe at slack and slack + 1."""
    if slack < 0:
        raise ValueError("slack must be >= 0")
    for s in (slack, slack + 1):
        k = joint_kernel(ops, space.max_degree + s, dim=space.dim)
        if not isinstance(k, MonoSpace) or k != space:
            return False
    return True


@dataclass
class Reduction:
    """Left-ideal division result: product = Σ M_l∘A_l + remainder."""

    product: DOp
    multipliers: list = field(default_factory=list)
    remainder: DOp | None = None

    @property
    def exact(self) -> bool:
        return self.remainder.is_zero()


def _monomial_pattern(op: DOp) -> tuple[tuple, Fraction]:
    if len(op.terms) != 1:
        raise ValueError("ideal_reduce needs single-term annihilating operators")
    (alpha, c), = op.terms.items()
    if not c.is_const():
        raise ValueError("ideal_reduce needs constant-coefficient annihilating operators")
    return alpha, c.const_value()


def ideal_reduce(a: DOp, h: DOp, ops: OpSet | Sequence[DOp]) -> Reduction:
    """Divide a∘h by the left ideal of monomial-derivative operators.

    Each term c(x) D^β goes to the first operator in ``ops`` whose derivative
    pattern is componentwise <= β; for the triangle family ordered by k this
    is the smallest admissible k.
    """
    pats = [_monomial_pattern(op) for op in ops]
    prod = compose(a, h)
    dim = prod.dim
    mult: list[dict] = [{} for _ in pats]
    rem = {}
    for beta, c in prod.terms.items():
        for l, (alpha, lead) in enumerate(pats):
            if all(x <= y for x, y in zip(alpha, beta)):
                shift = tuple(y - x for x, y in zip(alpha, beta))
                mult[l][shift] = c.scale(1 / lead)
                break
        else:
            rem[beta] = c
    return Reduction(prod, [DOp(dim, m) for m in mult], DOp(dim, rem))
