"""Weighted Fourier features on a regular grid.

On ``n`` (odd) equally spaced points, a real Fourier feature of frequency
``k n + j`` or ``k n - j`` is an exact alias of frequency ``j``: cosines agree,
sines agree up to sign. Minimum weighted-norm interpolation therefore spreads a
low-frequency target over the favored feature and its aliases in closed form,
which gives a noise-free counterpart of survival and contamination.

Feature layout (0-based columns): column 0 is the constant
``1/sqrt(2 pi)``; for frequency ``k >= 1``, column ``2k - 1`` is
``sin(kx)/sqrt(pi)`` and column ``2k`` is ``cos(kx)/sqrt(pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryCase, EvenD, EvenN, InvalidParams, InvalidRegime, InvalidTargets
from .rng import make_rng
from .solvers import GramFactor, gram_matrix, min_norm_interpolate, solve_svm_hard_margin
from .solvers import SolverOptions, support_vector_fraction

_MEAN_ATOL = 1e-9


def regular_grid(n: int) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise EvenN(f"regular grid needs odd n >= 3, got {n}")
    return -math.pi + math.pi * (2 * np.arange(n) + 1) / n


def fourier_features(points, d: int) -> np.ndarray:
    if d < 1 or d % 2 == 0:
        raise EvenD(f"feature count must be odd, got {d}")
    x = np.asarray(points, dtype=float).reshape(-1)
    out = np.empty((x.size, d))
    out[:, 0] = 1.0 / math.sqrt(2 * math.pi)
    k = np.arange(1, (d - 1) // 2 + 1)
    arg = np.outer(x, k)
    out[:, 1::2] = np.sin(arg) / math.sqrt(math.pi)
    out[:, 2::2] = np.cos(arg) / math.sqrt(math.pi)
    return out


def sin_column(freq: int) -> int:
    return 2 * freq - 1


def cos_column(freq: int) -> int:
    return 2 * freq


@dataclass(frozen=True)
class FourierDesign:
    """Grid size, feature count and one preference weight per frequency."""

    n: int
    d: int
    weights: np.ndarray

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise EvenN(f"grid size must be odd, got {self.n}")
        if self.d % 2 == 0:
            raise EvenD(f"feature count must be odd, got {self.d}")
        if self.d % self.n:
            raise InvalidParams(f"d={self.d} is not a multiple of n={self.n}")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != ((self.d - 1) // 2 + 1,):
            raise InvalidParams(f"need {(self.d - 1) // 2 + 1} weights, got {w.shape}")
        if np.any(w <= 0) or np.any(np.diff(w) > 0):
            raise InvalidParams("weights must be positive and non-increasing")
        object.__setattr__(self, "weights", w)

    @property
    def alias_count(self) -> int:
        return self.d // self.n - 1

    def column_weights(self) -> np.ndarray:
        """Per-column weight: the constant, then each frequency twice."""
        return np.concatenate([self.weights[:1], np.repeat(self.weights[1:], 2)])

    def train_features(self) -> np.ndarray:
        return fourier_features(regular_grid(self.n), self.d)


def bilevel_design(n: int, d: int, favored: int, lambda_h: float) -> FourierDesign:
    """Weight ``lambda_h`` on the first ``favored`` columns (odd count), 1 elsewhere."""
    if favored < 1 or favored % 2 == 0:
        raise InvalidParams(f"favored column count must be odd, got {favored}")
    top = (favored - 1) // 2
    weights = np.ones((d - 1) // 2 + 1)
    weights[: top + 1] = lambda_h
    return FourierDesign(n=n, d=d, weights=weights)


def weighted_min_norm(design: FourierDesign, targets) -> np.ndarray:
    """Coefficients minimizing ``sum_j coef_j^2 / w_j`` subject to interpolation.

    Solved as an unweighted minimum-norm problem on features rescaled by
    ``sqrt(w)``, then mapped back.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (design.n,):
        raise InvalidTargets(f"need {design.n} targets, got shape {targets.shape}")
    if abs(targets.mean()) > _MEAN_ATOL:
        raise InvalidTargets("targets with a nonzero grid mean are not supported")
    root = np.sqrt(design.column_weights())
    scaled = design.train_features() * root
    fit = min_norm_interpolate(scaled, targets)
    if fit.residual_inf > 1e-10 * (1 + np.abs(targets).max(initial=0.0)):
        raise ArithmeticError(f"interpolation residual {fit.residual_inf:.3g}")
    return root * fit.alpha


def alias_frequencies(n: int, d: int, freq: int) -> tuple[list[int], list[int]]:
    """Frequencies ``k n + freq`` and ``k n - freq`` below the feature cutoff."""
    top = (d - 1) // 2
    plus = [k * n + freq for k in range(1, top // n + 2) if k * n + freq <= top]
    minus = [k * n - freq for k in range(1, top // n + 2) if 0 < k * n - freq <= top]
    return plus, minus


@dataclass(frozen=True)
class ClosedForm:
    a: float
    b: float
    sigma_cn: float


def closed_form_alias(n: int, d: int, lambda_h: float) -> ClosedForm:
    """True-feature coefficient ``a`` and per-alias coefficient ``b``."""
    if not lambda_h > 0:
        raise InvalidParams(f"lambda_h must be positive, got {lambda_h}")
    if d % n:
        raise InvalidParams(f"d={d} is not a multiple of n={n}")
    m = d // n - 1
    return _closed_form(m, lambda_h)


def _closed_form(m: float, lambda_h: float) -> ClosedForm:
    b = 1.0 / (lambda_h + m)
    return ClosedForm(a=lambda_h * b, b=b, sigma_cn=math.sqrt(m) * b)


def bilevel_closed_form(p: float, q: float, r: float, n: float) -> ClosedForm:
    """Closed form with ``lambda_h = n^(p-r-q)`` and ``n^(p-1)`` aliases."""
    return _closed_form(n ** (p - 1.0), n ** (p - r - q))


def fourier_regime_approx(p: float, q: float, r: float, n: float) -> tuple[float, float]:
    """Piecewise power-law ``(a, sigma_cn)``; each within a factor 2 of the exact value."""
    knee = 1.0 - r
    if abs(q - knee) <= 1e-12:
        raise BoundaryCase("q = 1 - r has no single dominant term")
    if q < knee:
        return 1.0, n ** (-((p + 1.0) / 2.0 - (q + r)))
    return n ** (-(q - knee)), n ** (-(p - 1.0) / 2.0)


def fourier_cls_upper_bound(p: float, q: float, r: float, n: float) -> float:
    """Union bound on misclassification: rare weak signal or large contamination."""
    eps = (p - 1.0) / 2.0 - (q - (1.0 - r))
    if eps <= 0:
        raise InvalidRegime(f"bound needs q < (1 - r) + (p - 1)/2, got eps = {eps}")
    tail = n ** (-eps / 2.0)
    return 2.0 / math.pi * math.asin(min(1.0, tail)) + tail


def bilevel_fourier_design(n: int, p: float, q: float, r: float) -> FourierDesign:
    """Grid design matching bi-level scaling at finite ``n``.

    The alias count ``n^(p-1)`` and favored count ``n^r`` are rounded, each
    bumped up by one where needed so ``d = n (m + 1)`` and the favored column
    count are odd.
    """
    m = max(1, int(round(n ** (p - 1.0))))
    if (m + 1) % 2 == 0:
        m += 1
    favored = max(1, int(round(n**r)))
    if favored % 2 == 0:
        favored += 1
    if favored >= n:
        raise InvalidParams(f"favored count {favored} must stay below n={n}")
    return bilevel_design(n, n * (m + 1), favored, n ** (p - r - q))


def fourier_test_error(
    design: FourierDesign, coefs: np.ndarray, n_test: int, seed: int, chunk: int = 2048
) -> float:
    """Fraction of uniform test points where ``sgn(f)`` differs from ``sgn(cos x)``."""
    rng = make_rng(seed)
    wrong = 0
    done = 0
    while done < n_test:
        k = min(chunk, n_test - done)
        x = rng.uniform(-math.pi, math.pi, size=k)
        pred = fourier_features(x, design.d) @ coefs
        wrong += int(np.count_nonzero((pred >= 0) != (np.cos(x) >= 0)))
        done += k
    return wrong / n_test


def fourier_svm_support_fraction(
    n: int, d: int, m: float, tol: float = 1e-6
) -> dict:
    """Hard-margin SVM against min-norm interpolation on Fourier features.

    Weights decay as ``(k + 1)^-m`` over frequency ``k``; labels are
    ``sgn(cos x)`` on the grid (never zero for odd ``n``). Returns the
    support-vector fraction and the coefficient gap between the two solvers.
    """
    weights = (np.arange((d - 1) // 2 + 1) + 1.0) ** (-float(m))
    design = FourierDesign(n=n, d=d, weights=weights)
    root = np.sqrt(design.column_weights())
    phi = design.train_features() * root
    y = np.where(np.cos(regular_grid(n)) >= 0, 1.0, -1.0)
    A = gram_matrix(phi)
    factor = GramFactor(A)
    svm, dual = solve_svm_hard_margin(phi, y, SolverOptions(tol=1e-8), gram=A, factor=factor)
    interp = min_norm_interpolate(phi, y, factor=factor)
    scale = max(float(np.abs(interp.alpha).max()), 1e-300)
    return {
        "sv_fraction": support_vector_fraction(phi, y, svm.alpha, tol),
        "coef_gap": float(np.abs(svm.alpha - interp.alpha).max()) / scale,
        "kkt_gap": dual.kkt_gap,
    }
