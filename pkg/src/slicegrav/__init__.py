"""Numerical verification of conformal covariance for slice Dirac operators.

Clifford algebra arithmetic, truncated Taylor jets, the slice operator G and
its relatives, Vahlen matrices for GRAV maps, and an identity-checking engine.
"""

from .clifford import Algebra, AlgebraSignature, Multivector, algebra
from .jetcalc import FunctionJet, PolynomialFunction, jet_mul, polynomial_to_jet
from .moebius import GeneratorWord, PointSpace, VahlenMatrix, compose, parse_word
from .operators import OperatorContext, apply_G, apply_G_dagger, apply_G_iterated, apply_G_paravector
from .verify import CheckCase, CheckReport, SuiteConfig, run_case, run_suite
from .weights import WeightSpec, weight_pair

__all__ = [
    "Algebra",
    "AlgebraSignature",
    "CheckCase",
    "CheckReport",
    "FunctionJet",
    "GeneratorWord",
    "Multivector",
    "OperatorContext",
    "PointSpace",
    "PolynomialFunction",
    "SuiteConfig",
    "VahlenMatrix",
    "WeightSpec",
    "algebra",
    "apply_G",
    "apply_G_dagger",
    "apply_G_iterated",
    "apply_G_paravector",
    "compose",
    "jet_mul",
    "parse_word",
    "polynomial_to_jet",
    "run_case",
    "run_suite",
    "weight_pair",
]
