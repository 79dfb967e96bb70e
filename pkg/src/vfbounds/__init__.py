"""Bounds on the volume fraction of two-phase, two-dimensional isotropic elastic bodies."""
from .boundary import BoundaryTrace, Measurements, ingest
from .errors import ContrastError, DomainError, SolverError, TraceParseError, TraceValidationError
from .intervals import FractionInterval, QuadraticInequality
from .mandel import IsotropicPhase, PhasePair

__all__ = [
    "BoundaryTrace", "ContrastError", "DomainError", "FractionInterval", "IsotropicPhase",
    "Measurements", "PhasePair", "QuadraticInequality", "SolverError", "TraceParseError",
    "TraceValidationError", "ingest",
]
__version__ = "0.1.0"
