"""Subharmonic bifurcation engine: Melnikov analysis, Newton-Puiseux
branches, eta-series solutions, and tree-diagram cross-checks."""

__version__ = "0.1.0"

from .errors import (BoundViolated, CapExceeded, DegenerateFrequency,
                     InsufficientTruncation, MissingLowerOrder,
                     MixedScalarModes, NearSingularC, NonResonant, NotReal,
                     PeriodicityViolated, PrecisionExhausted, SchemaError,
                     ShootingDiverged, SubharmonicError)
from .scalars import QQi, ScalarContext, TrigPoly
from .series import (PlanarSystem, Resonance, TrigTaylor, tt_eval_resonant,
                     tt_mul, validate_system)
from .phase import Phase

__all__ = [
    "QQi", "ScalarContext", "TrigPoly", "PlanarSystem", "Resonance",
    "TrigTaylor", "tt_eval_resonant", "tt_mul", "validate_system", "Phase",
    "SubharmonicError", "NonResonant", "DegenerateFrequency", "NotReal",
    "MixedScalarModes", "MissingLowerOrder", "PrecisionExhausted",
    "InsufficientTruncation", "PeriodicityViolated", "NearSingularC",
    "CapExceeded", "BoundViolated", "ShootingDiverged", "SchemaError",
]
