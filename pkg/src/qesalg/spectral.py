"""Finite spectra of operators restricted to an invariant monomial space."""

from __future__ import annotations

from dataclasses import dataclass

from .exactcore import CharPoly, ExactMat, Poly, char_poly, real_roots
from .subspaces import MonoSpace
from .weylops import DOp, apply

__all__ = ["InvarianceError", "Spectrum", "restrict", "spectrum"]


class InvarianceError(ValueError):
    def __init__(self, monomial: tuple, residual: Poly):
        self.monomial = monomial
        self.residual = residual
        super().__init__(f"image of monomial {list(monomial)} leaves the space: {residual.to_text()}")


def restrict(h: DOp, space: MonoSpace) -> ExactMat:
    """Matrix of ``h`` on span(space); column j is the image of basis monomial j."""
    if h.dim != space.dim:
        raise ValueError("operator and space dimensions differ")
    n = len(space)
    m = ExactMat(n, n)
    for j, e in enumerate(space.exps):
        img = apply(h, Poly.monomial(e))
        out = space.outside(img)
        if out:
            raise InvarianceError(e, out)
        for k, v in img.terms.items():
            m.entries[space.index(k) * n + j] = v
    return m


@dataclass
class Spectrum:
    charpoly: CharPoly
    roots: list
    matrix: ExactMat

    def to_json(self) -> dict:
        return {
            "charpoly": self.charpoly.to_json(),
            "roots": [{"re": r.re, "im": r.im, "mult": r.mult} for r in self.roots],
        }


def spectrum(h: DOp, space: MonoSpace, tol: float = 1e-9) -> Spectrum:
    """Exact characteristic polynomial plus numeric roots.

    The root sum is checked against the trace and the root product against
    the determinant, both relative to ``tol``.
    """
    mat = restrict(h, space)
    cp = char_poly(mat)
    roots = real_roots(cp, tol)
    total = sum(complex(r.re, r.im) * r.mult for r in roots)
    trace = float(mat.trace())
    if abs(total - trace) > tol * max(1.0, abs(trace), sum(abs(complex(r.re, r.im)) * r.mult for r in roots)):
        raise ArithmeticError(f"root sum {total} disagrees with trace {trace}")
    n = len(space)
    det = float((-1) ** n * cp.coeff(0))
    prod = complex(1.0)
    for r in roots:
        prod *= complex(r.re, r.im) ** r.mult
    scale = 1.0
    for r in roots:
        scale *= max(1.0, abs(complex(r.re, r.im))) ** r.mult
    if abs(prod - det) > tol * n * scale:
        raise ArithmeticError(f"root product {prod} disagrees with determinant {det}")
    return Spectrum(cp, roots, mat)

