"""Definable sets of T_N (a cycle-free bijection of M onto M minus N named points).

Pipeline: parse a formula, eliminate quantifiers, decompose the solution
set into disjoint cells, and read off its class in (Z/NZ)[X]; the
standard model (N, x -> x + N) provides brute-force ground truth.
"""

from .core_sets import SimpleSet, from_positive_atoms, includes, intersect, simple_set
from .decompose import BasicSet, Cell, Decomposition, disjointify, decompose_formula, to_basic
from .k0 import ClassPoly, IntPoly, class_of, class_of_basic, classes_equal, dim_preorder, dim_semiring_value
from .maps import (
    ClassMismatch,
    NoInjection,
    NormalMap,
    PiecewiseMap,
    dim_injections,
    image,
    injection_into_complement,
    is_injective,
    normal_extension,
    synthesize_bijection,
    verify_map,
)
from .oracle import StandardModel, count, cross_check_class, eval_formula, fit_counting_polynomial
from .qe import QFFormula, eliminate, to_dnf
from .syntax import OrbitPoint, ParseError, constant, generic, parse, print_formula

__version__ = "0.1.0"
