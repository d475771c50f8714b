"""Structured perturbations that give a matrix polynomial a double eigenvalue
at a chosen point, and the resulting upper bound on how far away that is."""

from .errors import MultiEigError
from .matpoly import (
    MatrixPolynomial,
    derivative,
    evaluate,
    is_weakly_normal,
    simultaneous_diagonalizer,
    spectrum,
)
from .perturbation import WeightSet
from .pipeline import run_pipeline
from .problem import ProblemSpec, Tolerances, parse_problem
from .svcurve import build_F, maximize_s2nm1, singular_values_at

__all__ = [
    "MatrixPolynomial", "MultiEigError", "ProblemSpec", "Tolerances", "WeightSet",
    "build_F", "derivative", "evaluate", "is_weakly_normal", "maximize_s2nm1",
    "parse_problem", "run_pipeline", "simultaneous_diagonalizer", "singular_values_at",
    "spectrum",
]
