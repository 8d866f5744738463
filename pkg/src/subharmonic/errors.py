"""Exception types shared across the package."""


class SubharmonicError(Exception):
    """Base class for all package errors."""


class NonResonant(SubharmonicError):
    """omega(A0) does not equal p/q."""


class DegenerateFrequency(SubharmonicError):
    """omega'(A0) vanishes, so the twist condition fails."""


class NotReal(SubharmonicError):
    """A mode table violates the conjugate-symmetry (reality) invariant."""


class MixedScalarModes(SubharmonicError):
    """Exact and numeric scalars were combined without explicit coercion."""


class MissingLowerOrder(SubharmonicError):
    """An order (k, j) was requested before its prerequisites were solved."""


class PrecisionExhausted(SubharmonicError):
    """A numeric-mode decision (root multiplicity, zero test) cannot be
    certified at the configured precision."""


class InsufficientTruncation(SubharmonicError):
    """A series substitution or tail computation needs more input orders
    than the stored truncation rectangle provides."""

    def __init__(self, message, needed_kmax=None, needed_jmax=None):
        super().__init__(message)
        self.needed_kmax = needed_kmax
        self.needed_jmax = needed_jmax


class PeriodicityViolated(SubharmonicError):
    """The mean of Gamma failed to vanish at an order where the branch
    data says it must; signals an upstream branch error."""


class NearSingularC(SubharmonicError):
    """The tail-recursion constant C is numerically too small to divide by."""


class CapExceeded(SubharmonicError):
    """A tree enumeration was requested beyond its desk-scale cap."""


class BoundViolated(SubharmonicError):
    """An enumerated tree violates one of the counting bounds."""


class ShootingDiverged(SubharmonicError):
    """Newton iteration on the return map failed to converge for one
    epsilon; reported per value, not fatal for the sweep."""


class SchemaError(SubharmonicError):
    """A system definition file failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
