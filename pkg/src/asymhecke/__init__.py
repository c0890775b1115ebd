"""Exact asymptotic Hecke algebras (J-rings) of finite Coxeter groups."""

__version__ = "0.1.0"

from .asymptotic import (CellRing, GammaTensor, TensorInvariantError, cell_ring, check_tensor,
                         gamma_tensor, read_gamma, write_gamma)
from .cells import CellPartition, compute_cells, intersection_with_inverse
from .coxeter import CoxeterDescriptor, CoxeterError, CoxeterGroup, Element, WordError
from .exact import IntPoly, LaurentPoly, QuadExt, RealCyclotomic, char_poly, expand_factored_poly
from .fixtures import CellFixture, fixture_tensor, load_fixture, parse_fixture, verify_fixture
from .hecke import KLTable, compute_kl_table, t_multiply
from .ringlab import (center_dimension, derived_algebra_dimension, enumerate_unital_subrings,
                      eval_expr, find_permutation_isomorphisms, parse_relation, trace_form_gram)

__all__ = [
    "CellFixture", "CellPartition", "CellRing", "CoxeterDescriptor", "CoxeterError", "CoxeterGroup",
    "Element", "GammaTensor", "IntPoly", "KLTable", "LaurentPoly", "QuadExt", "RealCyclotomic",
    "TensorInvariantError", "WordError", "cell_ring", "center_dimension", "char_poly", "check_tensor",
    "compute_cells", "compute_kl_table", "derived_algebra_dimension", "enumerate_unital_subrings",
    "eval_expr", "expand_factored_poly", "find_permutation_isomorphisms", "fixture_tensor",
    "gamma_tensor", "intersection_with_inverse", "load_fixture", "parse_fixture", "parse_relation",
    "read_gamma", "t_multiply", "trace_form_gram", "verify_fixture", "write_gamma",
]
