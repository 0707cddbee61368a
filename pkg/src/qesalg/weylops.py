"""Differential operators with polynomial coefficients (Weyl algebra over Q).

An operator is stored in normal form: ``sum c_alpha(x) * D^alpha`` with every
coefficient to the left of the derivatives.  Equality is equality of that
map, so two operators are equal iff they act identically on polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Sequence

from .exactcore import Poly, grlex_key, rat

__all__ = [
    "DOp",
    "apply",
    "compose",
    "commutator",
    "formal_adjoint",
    "is_formally_symmetric",
]


class DOp:
    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict | None = None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        clean: dict = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ValueError(f"bad derivative index {alpha} for dimension {dim}")
            if not isinstance(c, Poly):
                c = Poly.const(c, dim)
            elif c.dim != dim:
                raise ValueError(f"coefficient dimension {c.dim} != {dim}")
            if alpha in clean:
                c = clean[alpha] + c
            clean[alpha] = c
        self.terms = {a: c for a, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "DOp":
        op = object.__new__(cls)
        op.dim = dim
        op.terms = terms
        op._hash = None
        return op

    # -- constructors
    @classmethod
    def zero(cls, dim: int) -> "DOp":
        return cls._raw(dim, {})

    @classmethod
    def identity(cls, dim: int) -> "DOp":
        return cls.mult(Poly.const(1, dim))

    @classmethod
    def scalar(cls, c, dim: int) -> "DOp":
        return cls.mult(Poly.const(c, dim))

    @classmethod
    def mult(cls, p: Poly) -> "DOp":
        return cls(p.dim, {(0,) * p.dim: p})

    @classmethod
    def var(cls, i: int, dim: int) -> "DOp":
        return cls.mult(Poly.var(i, dim))

    @classmethod
    def partial(cls, alpha: Sequence[int] | int, dim: int | None = None) -> "DOp":
        """``partial(0, 2)`` is D_x in two variables; ``partial((1, 2))`` is D_x D_y^2."""
        if isinstance(alpha, int):
            if dim is None:
                raise ValueError("dimension required when alpha is a variable index")
            a = [0] * dim
            a[alpha] = 1
            alpha = a
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: Poly.const(1, len(alpha))})

    # -- basic properties
    @property
    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, alpha: Sequence[int]) -> Poly:
        return self.terms.get(tuple(alpha), Poly.zero(self.dim))

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def items(self) -> Iterable[tuple[tuple, tuple, Fraction]]:
        """Flat (derivative index, coefficient exponent, value) triples."""
        for a, c in self.terms.items():
            for e, v in c.terms.items():
                yield a, e, v

    # -- linear structure
    def _check(self, other: "DOp"):
        if not isinstance(other, DOp):
            raise TypeError(f"expected DOp, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, DOp):
            other = DOp.scalar(other, self.dim)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = out[a] + c if a in out else c
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        return DOp._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return DOp._raw(self.dim, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DOp):
            other = DOp.scalar(other, self.dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DOp":
        c = rat(c)
        if not c:
            return DOp.zero(self.dim)
        return DOp._raw(self.dim, {a: p.scale(c) for a, p in self.terms.items()})

    def __mul__(self, other):
        """Composition for operators, scaling for numbers."""
        if isinstance(other, DOp):
            return compose(self, other)
        if isinstance(other, Poly):
            return compose(self, DOp.mult(other))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Poly):
            return compose(DOp.mult(other), self)
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("power must be a non-negative int")
        out = DOp.identity(self.dim)
        for _ in range(k):
            out = compose(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, DOp):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == DOp.scalar(other, self.dim)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __call__(self, f: Poly) -> Poly:
        return apply(self, f)

    def __repr__(self):
        from .opdsl import print_op
        return f"DOp({self.dim}, {print_op(self)!r})"

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"deriv": list(a), "coeff": c.to_json()} for a, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DOp":
        dim = int(obj["dim"])
        return cls(dim, {tuple(t["deriv"]): Poly.from_json(t["coeff"]) for t in obj["terms"]})


def apply(op: DOp, f: Poly) -> Poly:
    if op.dim != f.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs polynomial {f.dim}")
    out = Poly.zero(op.dim)
    for alpha, c in op.terms.items():
        df = f.diff(alpha)
        if df:
            out = out + c * df
    return out


def compose(p: DOp, q: DOp) -> DOp:
    """Normal form of p∘q by the generalized Leibniz rule.

    (a D^α)∘(b D^β) = a Σ_{γ≤α} C(α,γ) (D^γ b) D^{α-γ+β}
    """
    p._check(q)
    dim = p.dim
    acc: dict = {}
    for alpha, a in p.terms.items():
        for beta, b in q.terms.items():
            for gamma in product(*(range(k + 1) for k in alpha)):
                db = b.diff(gamma)
                if not db:
                    continue
                w = 1
                for k, g in zip(alpha, gamma):
                    w *= comb(k, g)
                key = tuple(k - g + m for k, g, m in zip(alpha, gamma, beta))
                term = (a * db).scale(w)
                acc[key] = acc[key] + term if key in acc else term
    return DOp._raw(dim, {k: c for k, c in acc.items() if c})


def commutator(p: DOp, q: DOp) -> DOp:
    return compose(p, q) - compose(q, p)


def formal_adjoint(p: DOp) -> DOp:
    """Integration-by-parts transpose: Σ (-1)^|α| D^α ∘ c_α."""
    out = DOp.zero(p.dim)
    for alpha, c in p.terms.items():
        term = compose(DOp.partial(alpha), DOp.mult(c))
        out = out + (term if sum(alpha) % 2 == 0 else -term)
    return out


def is_formally_symmetric(p: DOp) -> bool:
    return formal_adjoint(p) == p
