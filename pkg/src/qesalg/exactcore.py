"""Exact scalars, multivariate polynomials and dense rational matrices.

Scalars are :class:`fractions.Fraction`; a multi-index is a plain tuple of
non-negative ints.  Everything here is exact except :func:`real_roots`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

Rat = Fraction
MIdx = tuple

__all__ = [
    "Rat",
    "MIdx",
    "Poly",
    "ExactMat",
    "CharPoly",
    "Root",
    "rat",
    "rat_to_json",
    "rat_from_json",
    "grlex_key",
    "monomials_upto",
    "poly_arith",
    "rref",
    "nullspace",
    "rank",
    "solve_linear",
    "char_poly",
    "real_roots",
]


def rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


def rat_to_json(c: Fraction) -> str:
    c = rat(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def rat_from_json(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise ValueError(f"bad rational {s!r}")
    return Fraction(s)


def grlex_key(exps: Sequence[int]) -> tuple:
    """Graded order: total degree first, then x before y before z."""
    return (sum(exps), tuple(-e for e in exps))


def monomials_upto(dim: int, degree: int) -> list[tuple]:
    """All exponent tuples of total degree <= degree, in graded-lex order."""
    if degree < 0:
        return []
    out = []
    for total in range(degree + 1):
        out.extend(_compositions(total, dim))
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    # descending in the first entry, which is exactly grlex within a degree
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


class Poly:
    """Polynomial in ``dim`` variables with rational coefficients.

    ``terms`` maps exponent tuples to nonzero Fractions.  Treat instances as
    immutable.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict | None = None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != dim or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for dimension {dim}")
            c = rat(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "Poly":
        # trusted constructor: keys valid, values nonzero Fractions
        p = object.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls._raw(dim, {})

    @classmethod
    def const(cls, c, dim: int) -> "Poly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> "Poly":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def var(cls, i: int, dim: int) -> "Poly":
        e = [0] * dim
        e[i] = 1
        return cls._raw(dim, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def _check(self, other: "Poly"):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.dim)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = rat(c)
        if not c:
            return Poly.zero(self.dim)
        return Poly._raw(self.dim, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.dim, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("power must be a non-negative int")
        out = Poly.const(1, self.dim)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.dim: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def diff(self, alpha: Sequence[int]) -> "Poly":
        """Apply the mixed partial derivative with orders ``alpha``."""
        out = {}
        for e, c in self.terms.items():
            if all(a <= v for a, v in zip(alpha, e)):
                f = 1
                for v, a in zip(e, alpha):
                    f *= falling(v, a)
                out[tuple(v - a for v, a in zip(e, alpha))] = c * f
        return Poly._raw(self.dim, out)

    def leading(self) -> tuple:
        """(exponent, coefficient) of the grlex-largest term."""
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def divide_exact(self, other: "Poly") -> "Poly | None":
        """Quotient if ``other`` divides ``self`` exactly, else None."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        le, lc = other.leading()
        rem = self
        quot = {}
        while rem.terms:
            e, c = rem.leading()
            if any(a < b for a, b in zip(e, le)):
                return None
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c / lc
            quot[qe] = quot.get(qe, 0) + qc
            rem = rem - Poly._raw(self.dim, {qe: qc}) * other
        return Poly(self.dim, quot)

    def __call__(self, *point):
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(point, e):
                t *= v**k
            total += t
        return total

    def __repr__(self):
        return f"Poly({self.dim}, {self.to_text()!r})"

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = _default_names(self.dim)
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            mag = abs(c)
            if not mono:
                body = rat_to_json(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{rat_to_json(mag)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"exp": list(e), "c": rat_to_json(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        return cls(int(obj["dim"]), {tuple(t["exp"]): rat_from_json(t["c"]) for t in obj["terms"]})


def _default_names(dim: int) -> list[str]:
    if dim <= 3:
        return ["x", "y", "z"][:dim]
    return [f"x{i + 1}" for i in range(dim)]


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------- matrices


class ExactMat:
    """Dense row-major matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable | None = None):
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.entries = [Fraction(0)] * (rows * cols)
        else:
            self.entries = [rat(v) for v in entries]
        if len(self.entries) != rows * cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMat":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, [v for r in rows for v in r])

    @classmethod
    def identity(cls, n: int) -> "ExactMat":
        m = cls(n, n)
        for i in range(n):
            m.entries[i * n + i] = Fraction(1)
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "ExactMat":
        return ExactMat(self.cols, self.rows,
                        [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __matmul__(self, other):
        if isinstance(other, ExactMat):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            a, b = self.to_rows(), other.to_rows()
            out = []
            for r in a:
                nz = [(k, v) for k, v in enumerate(r) if v]
                for j in range(other.cols):
                    out.append(sum((v * b[k][j] for k, v in nz), Fraction(0)))
            return ExactMat(self.rows, other.cols, out)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return [sum((a * b for a, b in zip(self.row(i), vec) if a), Fraction(0))
                for i in range(self.rows)]

    def __add__(self, other: "ExactMat"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return ExactMat(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ExactMat"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return ExactMat(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> "ExactMat":
        c = rat(c)
        return ExactMat(self.rows, self.cols, [v * c for v in self.entries])

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def permuted(self, perm: Sequence[int]) -> "ExactMat":
        """P M P^-1 for the basis permutation ``perm`` (new index i = old perm[i])."""
        n = self.rows
        return ExactMat(n, n, [self[perm[i], perm[j]] for i in range(n) for j in range(n)])

    def __eq__(self, other):
        if not isinstance(other, ExactMat):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"ExactMat({self.rows}x{self.cols})"

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [rat_to_json(v) for v in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "ExactMat":
        return cls(obj["rows"], obj["cols"], [rat_from_json(v) for v in obj["entries"]])


def _int_row(row: dict) -> dict:
    """Scale a sparse rational row to coprime integers (sign of lowest column > 0)."""
    den = 1
    for v in row.values():
        den = den * v.denominator // math.gcd(den, v.denominator) if isinstance(v, Fraction) else den
    ints = {c: int(v * den) for c, v in row.items()}
    return _normalize(ints)


def _normalize(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    lead = min(row)
    if row[lead] < 0:
        g = -g
    if g not in (0, 1):
        row = {c: v // g for c, v in row.items()}
    return row


def _echelon(rows: Iterable[dict]) -> dict:
    """Fraction-free Gauss-Jordan on sparse integer rows.

    Returns {pivot column: row}; every row is zero in all other pivot columns
    and its pivot column is its lowest column.
    """
    pivots: dict = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        if not row:
            continue
        row = _int_row(row)
        for c in sorted(set(row) & pivots.keys()):
            if c not in row:
                continue
            prow = pivots[c]
            a, b = prow[c], row[c]
            new = {k: a * v for k, v in row.items()}
            for k, v in prow.items():
                s = new.get(k, 0) - b * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            if not new:
                row = {}
                break
            row = _normalize(new)
        if not row:
            continue
        p = min(row)
        for c, prow in list(pivots.items()):
            if p in prow:
                a, b = row[p], prow[p]
                new = {k: a * v for k, v in prow.items()}
                for k, v in row.items():
                    s = new.get(k, 0) - b * v
                    if s:
                        new[k] = s
                    else:
                        new.pop(k, None)
                pivots[c] = _normalize(new)
        pivots[p] = row
    return pivots


def _sparse_rows(m) -> list[dict]:
    if isinstance(m, ExactMat):
        return [{j: v for j, v in enumerate(m.row(i)) if v} for i in range(m.rows)]
    return [{j: rat(v) for j, v in enumerate(r) if v} for r in m]


def rref(m: ExactMat) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form: (nonzero rows, pivot columns), pivots ascending."""
    piv = _echelon(_sparse_rows(m))
    rows, cols = [], sorted(piv)
    for c in cols:
        r = piv[c]
        lead = r[c]
        dense = [Fraction(0)] * m.cols
        for k, v in r.items():
            dense[k] = Fraction(v, lead)
        rows.append(dense)
    return rows, cols


def rank(m: ExactMat) -> int:
    return len(_echelon(_sparse_rows(m)))


def nullspace(m: ExactMat) -> list[list[Fraction]]:
    """Canonical basis of the right kernel.

    One vector per free column (ascending); that column is 1, the other free
    columns are 0.
    """
    piv = _echelon(_sparse_rows(m))
    free = [j for j in range(m.cols) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for p, r in piv.items():
            if f in r:
                v[p] = Fraction(-r[f], r[p])
        basis.append(v)
    return basis


def solve_linear(m: ExactMat, b: Sequence) -> list[Fraction] | None:
    """One solution x of m x = b (free variables zero), or None."""
    if len(b) != m.rows:
        raise ValueError("shape mismatch")
    aug = []
    for i in range(m.rows):
        r = {j: v for j, v in enumerate(m.row(i)) if v}
        if b[i]:
            r[m.cols] = rat(b[i])
        aug.append(r)
    piv = _echelon(aug)
    if m.cols in piv:
        return None
    x = [Fraction(0)] * m.cols
    for p, r in piv.items():
        x[p] = Fraction(r.get(m.cols, 0), r[p])
    return x


def canonical_rows(vectors: Sequence[Sequence], width: int) -> list[list[Fraction]]:
    """RREF of the row space spanned by ``vectors`` (zero rows dropped)."""
    rows, _ = rref(ExactMat(len(vectors), width, [v for r in vectors for v in r]))
    return rows


# ------------------------------------------------------ characteristic poly


class CharPoly:
    """Monic polynomial; ``coeffs`` run from the leading power down to λ^0."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = [rat(c) for c in coeffs]
        if not coeffs or coeffs[0] != 1:
            raise ValueError("characteristic polynomial must be monic")
        self.coeffs = coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, power: int) -> Fraction:
        return self.coeffs[self.degree - power]

    def __call__(self, lam):
        acc = Fraction(0) if not isinstance(lam, float) else 0.0
        for c in self.coeffs:
            acc = acc * lam + c
        return acc

    def at_matrix(self, m: ExactMat) -> ExactMat:
        """Horner evaluation with matrix argument."""
        n = m.rows
        acc = ExactMat(n, n)
        eye = ExactMat.identity(n)
        for c in self.coeffs:
            acc = acc @ m + eye.scale(c)
        return acc

    def __eq__(self, other):
        if isinstance(other, CharPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self):
        return f"CharPoly({[rat_to_json(c) for c in self.coeffs]})"

    def to_json(self) -> list[str]:
        return [rat_to_json(c) for c in self.coeffs]


def char_poly(m: ExactMat) -> CharPoly:
    """Faddeev-LeVerrier recursion, exact over the rationals."""
    if m.rows != m.cols:
        raise ValueError(f"char_poly needs a square matrix, got {m.rows}x{m.cols}")
    n = m.rows
    coeffs = [Fraction(1)]
    aux = ExactMat(n, n)
    eye = ExactMat.identity(n)
    for k in range(1, n + 1):
        aux = m @ aux + eye.scale(coeffs[-1])
        coeffs.append(-(m @ aux).trace() / k)
    return CharPoly(coeffs)


# ------------------------------------------------------------ root finding


def _pdiv(a: list, b: list) -> tuple[list, list]:
    # descending coefficient lists, exact
    a = list(a)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return q, a


def _pgcd(a: list, b: list) -> list:
    while b:
        _, r = _pdiv(a, b)
        a, b = b, r
    return [c / a[0] for c in a]


def _pderiv(a: list) -> list:
    n = len(a) - 1
    out = [c * (n - i) for i, c in enumerate(a[:-1])]
    while out and out[0] == 0:
        out.pop(0)
    return out


def squarefree_parts(coeffs: Sequence) -> list[tuple[list, int]]:
    """Yun's algorithm: [(monic factor, multiplicity)], factors coprime."""
    f = [rat(c) for c in coeffs]
    if len(f) <= 1:
        return []
    out = []
    g = _pgcd(f, _pderiv(f))
    w, _ = _pdiv(f, g)
    i = 1
    while len(w) > 1:
        y = _pgcd(w, g)
        z, _ = _pdiv(w, y)
        if len(z) > 1:
            out.append(([c / z[0] for c in z], i))
        g, _ = _pdiv(g, y)
        w = y
        i += 1
    return out


class Root(NamedTuple):
    re: float
    im: float
    mult: int

    @property
    def is_real(self) -> bool:
        return self.im == 0.0


def real_roots(p: CharPoly | Sequence, tol: float = 1e-9) -> list[Root]:
    """Numeric roots of an exact polynomial with exact multiplicities.

    Multiplicities come from an exact square-free decomposition; each
    square-free part is solved by companion-matrix eigenvalues.  Real roots
    come first, ascending; complex roots (``im != 0``) follow, sorted by
    (re, im).
    """
    coeffs = p.coeffs if isinstance(p, CharPoly) else [rat(c) for c in p]
    real, cplx = [], []
    for factor, mult in squarefree_parts(coeffs):
        vals = np.roots([float(c) for c in factor]) if len(factor) > 1 else []
        for z in vals:
            if abs(z.imag) <= tol * max(1.0, abs(z.real)):
                real.append(Root(float(z.real), 0.0, mult))
            else:
                cplx.append(Root(float(z.real), float(z.imag), mult))
    real.sort()
    cplx.sort()
    return real + cplx
