"""Exception hierarchy shared by every module in the package."""


class JelliumError(Exception):
    """Base class for all package-specific errors."""


class NotIntegrableError(JelliumError):
    """Partition function diverges: beta*(alpha - n + 1) <= 2."""

    def __init__(self, margin, message=None):
        self.margin = float(margin)
        super().__init__(
            message
            or f"partition function diverges: beta*(alpha - n + 1) - 2 = {margin:.6g} <= 0"
        )


class CoincidentPointsError(JelliumError):
    """Two particles share the same position; gradient is undefined."""


class BetaNotTwoError(JelliumError):
    """Operation requires the determinantal temperature beta = 2."""


class NOverLimitError(JelliumError):
    """Quadrature of the partition function is limited to n <= 2."""


class CnNotPositiveError(JelliumError):
    """Edge scalings need c_n = log n - 2 log log n - log 2 pi > 0."""

    def __init__(self, n, c_n, min_n):
        self.n = n
        self.c_n = c_n
        self.min_n = min_n
        super().__init__(
            f"c_n = {c_n:.6g} <= 0 for n = {n}; the smallest usable n is {min_n}"
        )


class LambdaBelowOneError(JelliumError):
    """Low-temperature equilibrium needs lambda = alpha/n >= 1."""


class SubcriticalParametersError(JelliumError):
    """Crossover solver needs kappa*(lambda - 1) > 2 (strictly)."""


class NoConvergenceError(JelliumError):
    """Iterative solver failed; carries the residual history."""

    def __init__(self, message, residual_history=None):
        self.residual_history = list(residual_history or [])
        super().__init__(message)


class NonNormalizedError(JelliumError):
    """Density does not integrate to one."""


class EntropyDivergesError(JelliumError):
    """Relative entropy term of the rate functional is not finite."""


class EmptySampleError(JelliumError):
    """Statistical routines need at least one observation."""


class NonFiniteValueError(JelliumError):
    """Sample contains NaN or infinite entries."""


class POutOfRangeError(JelliumError):
    """Quantile argument must lie strictly inside (0, 1)."""
