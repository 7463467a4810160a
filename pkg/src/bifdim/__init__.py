"""Box dimension and Minkowski content of orbits of one-dimensional maps
near nonhyperbolic fixed points and cycles."""

__version__ = "0.1.0"

from .errors import BifdimError, DomainError, ParseError, PreconditionError, UnknownIdentifierError
from .jet import Jet
from .exprmap import MapExpr, evaluate, eval_dlambda, eval_jet, parse
from .dynamics import (Cycle, FixedPoint, MapSystem, Orbit, StopReason, distance_sequence,
                       find_cycles, find_fixed_points, iterate)
from .fractal import (ContentEstimate, DimensionEstimate, PointSet, PowerLawFit,
                      conjectured_content, content_bounds, content_estimate, dim_sausage,
                      dim_tricot, envelope_constants, fit_decay_exponent, sausage_measure)
from .classify import (BifurcationReport, Classification, check_bifurcation_conditions,
                       classify_fixed_point, predict_and_measure)

__all__ = [
    "BifdimError", "DomainError", "ParseError", "PreconditionError", "UnknownIdentifierError",
    "Jet", "MapExpr", "parse", "evaluate", "eval_jet", "eval_dlambda",
    "MapSystem", "Orbit", "StopReason", "FixedPoint", "Cycle",
    "iterate", "find_fixed_points", "find_cycles", "distance_sequence",
    "PointSet", "DimensionEstimate", "ContentEstimate", "PowerLawFit",
    "sausage_measure", "dim_sausage", "dim_tricot", "fit_decay_exponent",
    "envelope_constants", "content_estimate", "content_bounds", "conjectured_content",
    "Classification", "BifurcationReport", "classify_fixed_point",
    "check_bifurcation_conditions", "predict_and_measure",
]
