"""Error types shared across the package.

Numeric routines raise subclasses of :class:`TopdcError`; the CLI maps
them to exit code 3 and maps :class:`ConfigError` to exit code 2.
"""


class TopdcError(Exception):
    """Base class for all package errors."""


class ConfigError(TopdcError):
    """Invalid run configuration.  Carries the offending field path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class OutOfRange(TopdcError):
    """Requested point lies outside a model's validity range or a grid."""


class NonHermitianInput(TopdcError):
    """Matrix handed to a Hermitian eigensolver is not Hermitian."""


class NegativeRadicand(TopdcError):
    """Square root of a negative quantity where a real result is required."""


class InvalidLength(TopdcError):
    """Nonpositive propagation length."""


class ZeroDispersion(TopdcError):
    """Vanishing group velocity dispersion where a finite value is required."""


class NoSignChange(TopdcError):
    """Root bracket does not straddle a sign change."""


class ZeroKernel(TopdcError):
    """Source kernel vanishes identically on the grid; no state to normalize."""


class EmptyFilter(TopdcError):
    """Spectral filter removes (essentially) all of the state."""


class GridMismatch(TopdcError):
    """Operands defined on different frequency grids."""


class NotNormalized(TopdcError):
    """Vector or amplitude set violates its normalization contract."""


class NonPositiveSemidefinite(TopdcError):
    """Density matrix has an eigenvalue below the allowed numerical floor."""


class NegativeDensity(UserWarning):
    """Probability density went negative; first-order expansion breakdown."""
