"""Exception types shared across the package."""


class DampWaveError(Exception):
    pass


class SymbolEvaluationError(DampWaveError):
    """A damping symbol returned NaN or a negative value."""


class MetadataMismatchError(DampWaveError):
    """Declared limit metadata disagrees with the probed trend."""


class ProfileSingularityError(DampWaveError):
    """The exterior profile multiplier was requested where it is undefined."""


class OracleBudgetError(DampWaveError):
    pass


class InequalityViolation(DampWaveError):
    pass


class TailNotConverged(DampWaveError):
    pass


class NonFiniteIntegrand(DampWaveError):
    pass


class DivergentSmallFrequency(DampWaveError):
    pass


class EmptyAlphaSet(DampWaveError):
    pass


class AlphaUndecided(DampWaveError):
    pass


class FitDomainError(DampWaveError):
    pass


class ConfigError(DampWaveError):
    """Invalid command-line or config-file input (exit code 2)."""
