"""Exact construction and analysis of quasi-exactly solvable operators."""

from .exactcore import CharPoly, ExactMat, Poly, char_poly, nullspace, real_roots
from .liestruct import algebra_profile, closure, quadratic_envelope, span_equal
from .nsusy import build_superpair, cofactor, polynomial_in
from .opdsl import parse, parse_op, print_op
from .qsolver import QESBasis, build_ansatz, member, solve
from .spectral import restrict, spectrum
from .subspaces import (
    MonoSpace,
    OpSet,
    annihilating_set,
    check_complete,
    ideal_reduce,
    joint_kernel,
    rectangle_space,
    triangle_space,
)
from .weylops import DOp, apply, commutator, compose, formal_adjoint, is_formally_symmetric

__version__ = "0.1.0"
