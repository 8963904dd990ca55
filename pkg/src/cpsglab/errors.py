"""Exception and warning types shared across the package."""


class CpsgError(Exception):
    """Base class for all package errors."""


class SpectrumError(CpsgError):
    """Invalid spectral model or operation outside its domain."""


class KernelDomainError(CpsgError):
    """Kernel evaluated at a pole, on a branch cut, or derivative unsupported."""


class QuadratureError(CpsgError):
    """Integration failed to converge within the evaluation budget.

    Carries the partial result accumulated so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DivergenceError(QuadratureError):
    """Semi-infinite integral whose dyadic tail panels stop decreasing."""


class PreThresholdError(CpsgError):
    """Closed-form branch requested below the crossover index n1.

    ``n1`` holds the estimated first admissible index.
    """

    def __init__(self, message, n1=None):
        super().__init__(message)
        self.n1 = n1


class FitError(CpsgError):
    """Power-law regression rejected its input (too few samples, nonpositive norms)."""


class ConfigError(CpsgError):
    """Malformed run configuration."""


class TruncationWarning(UserWarning):
    """A spectral supremum was attained at the last retained mode.

    The truncation K is probably too small for the requested parameter range;
    affected samples should be treated as unreliable.
    """
