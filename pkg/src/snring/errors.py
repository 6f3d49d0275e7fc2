"""Exception types shared across the package."""


class SnRingError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(SnRingError):
    """Invalid device layout: bad site indices, overlapping regions, too-small ring."""


class ParameterError(SnRingError):
    """Invalid physical parameter, e.g. non-positive lead coupling."""


class CausalityError(SnRingError):
    """A retarded quantity acquired a positive imaginary part beyond tolerance."""


class SolverError(SnRingError):
    """Dense linear solve failed or left a residual above tolerance."""


class StaleSelfEnergyError(SnRingError):
    """A self-energy evaluated at one (energy, flux) was fed to a solve at another."""


class NumericalConsistencyError(SnRingError):
    """A quantity that must be real/non-negative came out otherwise."""


class ContrastUndefinedError(SnRingError):
    """Both transmissions vanish; the contrast ratio is 0/0."""


class InjectionStarvedError(SnRingError):
    """The injected-carrier trace is too small to normalize the dephasing rate."""


class AggregationError(SnRingError):
    """Sweep records cannot be grouped as requested (ragged grid)."""


class ConfigError(SnRingError):
    """Bad configuration input.  Carries a line number when one is known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(SnRingError):
    """Records do not share the schema expected by a writer or plotter."""
