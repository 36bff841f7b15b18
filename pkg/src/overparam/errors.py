"""Exception types raised across the package."""

from __future__ import annotations


class OverparamError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParams(OverparamError, ValueError):
    """Ensemble or theory parameters fall outside their admissible range."""


class NotDiagonal(OverparamError, ValueError):
    """The requested ensemble has no diagonal covariance spectrum."""


class InvalidSignal(OverparamError, ValueError):
    """The sparse signal index is out of range for the ensemble."""


class DimensionOverflow(OverparamError, OverflowError):
    """A derived dimension exceeds the configured maximum."""


class SingularGram(OverparamError, ArithmeticError):
    """The Gram matrix could not be factorized, even after jitter."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class NotConverged(OverparamError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``best`` holds the last iterate and ``kkt_gap`` its optimality gap.
    """

    def __init__(self, message: str, best=None, kkt_gap: float = float("nan")):
        super().__init__(message)
        self.best = best
        self.kkt_gap = kkt_gap


class Infeasible(OverparamError, ValueError):
    """Training data cannot be separated with unit margin."""


class NotSeparating(OverparamError, ValueError):
    """A coefficient vector misclassifies (or touches) a training point."""


class BoundaryCase(OverparamError, ValueError):
    """Parameters sit exactly on a regime threshold."""


class InvalidRegime(OverparamError, ValueError):
    """Parameters lie outside the regime where a bound is defined."""


class DegenerateInput(OverparamError, ValueError):
    """Input data do not determine the requested fit."""


class EvenN(OverparamError, ValueError):
    """Regular Fourier grids need an odd number of points."""


class EvenD(OverparamError, ValueError):
    """Real Fourier feature lists need an odd number of features."""


class InvalidTargets(OverparamError, ValueError):
    """Targets are incompatible with the design (wrong length, nonzero mean)."""


class ConfigError(OverparamError, ValueError):
    """Experiment configuration is malformed; ``path`` names the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class MemoryCap(OverparamError, MemoryError):
    """A trial would allocate more feature-matrix entries than allowed."""

    def __init__(self, required: int, available: int):
        super().__init__(
            f"trial needs {required} matrix entries (~{required * 8 / 2**20:.0f} MiB), "
            f"cap is {available}"
        )
        self.required = required
        self.available = available


class IncompleteData(OverparamError, ValueError):
    """Result rows do not cover the configured sweep."""
