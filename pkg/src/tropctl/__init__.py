"""Exact max-plus linear algebra, controlled invariance and timetable synthesis."""

from .feedback import EigenResult, FeedbackResult, check_feedback, eigen, minmax_subfixed, solve_feedback
from .invariance import InvarianceReport, check_geometric_invariance, corollary_bound, max_invariant, phi
from .linalg import StarResult, kleene_star, left_residual, mat_mul, right_residual, spectral_radius
from .network import NetworkSpec, build_dynamics, build_spec, simulate, synthesize
from .semimodule import Semimodule, contains, intersect, membership, ominus, preimage, semimodule_equal, volume
from .semiring import NEG_INF, POS_INF
from .twosided import GeneratorSet, TwoSidedSystem, minimize_generators, solve_hyperplane, solve_system

__version__ = "0.1.0"

__all__ = [
    "EigenResult",
    "FeedbackResult",
    "GeneratorSet",
    "InvarianceReport",
    "NEG_INF",
    "NetworkSpec",
    "POS_INF",
    "Semimodule",
    "StarResult",
    "TwoSidedSystem",
    "build_dynamics",
    "build_spec",
    "check_feedback",
    "check_geometric_invariance",
    "contains",
    "corollary_bound",
    "eigen",
    "intersect",
    "kleene_star",
    "left_residual",
    "mat_mul",
    "max_invariant",
    "membership",
    "minimize_generators",
    "minmax_subfixed",
    "ominus",
    "phi",
    "preimage",
    "right_residual",
    "semimodule_equal",
    "simulate",
    "solve_feedback",
    "solve_hyperplane",
    "solve_system",
    "spectral_radius",
    "synthesize",
    "volume",
]
