"""Exception types raised across the package."""


class InvalidElementError(ValueError):
    """A quadratic-field element violates the integrality/parity invariant."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InvariantViolationError(RuntimeError):
    """A mathematical invariant that should hold was found to fail."""


class NumericError(ArithmeticError):
    """A floating point computation became ill-defined (e.g. zero denominator)."""


class NonConvergenceError(RuntimeError):
    """An iterative procedure hit its iteration cap."""


class DegeneracyError(ValueError):
    """Input data is degenerate for the requested construction."""


class RealRootError(ValueError):
    """A quadratic expected to have complex roots has real ones."""


class NotSpecialError(ValueError):
    """A point of H^2 is not a special (CM) point at the given tolerance."""


class ToleranceError(ValueError):
    """The tolerance admits too many relations to be meaningful."""


class BadPrimeError(ValueError):
    """The curve has bad reduction at the requested prime."""


class ConsistencyError(RuntimeError):
    """Computed Frobenius data violates the Weil bounds."""


class RegistryError(LookupError):
    """Unknown curve label or malformed registry file."""


class ConfigError(ValueError):
    """Invalid scan configuration."""
