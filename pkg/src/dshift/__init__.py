"""Matrix-normed structure of finite-dimensional quotients of the d-shift algebra."""

__version__ = "0.1.0"

from .errors import DomainError, DShiftError, InputError, PoleError, RankError, UnsupportedError
from .kernel import BallPoint, JetFunctional, KernelVector, Polynomial
from .linalg import PosDefReport, Positivity, posdef_invertible
from .pick import FeasibilityReport, PickProblem, Variant, Verdict, feasible, pick_matrix, quotient_norm
from .recipe import IdealSpec, QuotientElement, QuotientModel, build_model

__all__ = [
    "BallPoint",
    "DShiftError",
    "DomainError",
    "FeasibilityReport",
    "IdealSpec",
    "InputError",
    "JetFunctional",
    "KernelVector",
    "PickProblem",
    "PoleError",
    "Polynomial",
    "PosDefReport",
    "Positivity",
    "QuotientElement",
    "QuotientModel",
    "RankError",
    "UnsupportedError",
    "Variant",
    "Verdict",
    "build_model",
    "feasible",
    "pick_matrix",
    "posdef_invertible",
    "quotient_norm",
]
