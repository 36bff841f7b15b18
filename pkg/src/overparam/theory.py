"""Asymptotic predictions for the bi-level ensemble.

These functions turn ``(p, q, r)`` into the qualitative outcomes the theory
predicts: which of the three generalization regimes applies, when every
training point is guaranteed to be a support vector, and the power-law
exponents (in ``n``) of survival, contamination and their ratio. Monte-Carlo
output is then checked against them by ordering tests and log-log fits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .ensembles import Spectrum
from .errors import BoundaryCase, DegenerateInput, InvalidParams

BOUNDARY_ATOL = 1e-12


class Regime(str, enum.Enum):
    BOTH_SUCCEED = "BothSucceed"
    CLASSIFICATION_ONLY = "ClassificationOnly"
    BOTH_FAIL = "BothFail"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    q_low: float
    q_high: float
    limit_mse: float | None
    limit_cls: float | None


@dataclass(frozen=True)
class AsymptoticPrediction:
    su_limit: float
    su_exponent: float
    cn_upper_exponent: float
    cn_lower_exponent: float
    snr_lower_exponent: float
    snr_upper_exponent: float


@dataclass(frozen=True)
class SupportCondition:
    holds: bool
    lhs: float
    rhs: float


def check_admissible(p: float, q: float, r: float) -> None:
    if not p > 1:
        raise InvalidParams(f"need p > 1, got {p}")
    if not 0 <= r < 1:
        raise InvalidParams(f"need 0 <= r < 1, got {r}")
    if not 0 < q <= p - r + BOUNDARY_ATOL:
        raise InvalidParams(f"need 0 < q <= p - r = {p - r}, got {q}")


def regime_thresholds(p: float, r: float) -> tuple[float, float]:
    q_low = 1.0 - r
    return q_low, q_low + (p - 1.0) / 2.0


def classify_regime(p: float, q: float, r: float) -> RegimeVerdict:
    check_admissible(p, q, r)
    q_low, q_high = regime_thresholds(p, r)
    if abs(q - q_low) <= BOUNDARY_ATOL or abs(q - q_high) <= BOUNDARY_ATOL:
        return RegimeVerdict(Regime.BOUNDARY, q_low, q_high, None, None)
    if q < q_low:
        return RegimeVerdict(Regime.BOTH_SUCCEED, q_low, q_high, 0.0, 0.0)
    if q < q_high:
        return RegimeVerdict(Regime.CLASSIFICATION_ONLY, q_low, q_high, 1.0, 0.0)
    return RegimeVerdict(Regime.BOTH_FAIL, q_low, q_high, 1.0, 0.5)


def all_sv_condition_general(spectrum: Spectrum, n: int) -> SupportCondition:
    """Spectrum-level sufficient condition for every point to be a support vector."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    lam = spectrum.lambdas
    lhs = float(lam.sum())
    ln = math.log(n)
    rhs = 72.0 * (
        float(np.linalg.norm(lam)) * n * math.sqrt(ln) + float(lam.max()) * n**1.5 * ln + 1.0
    )
    return SupportCondition(holds=lhs >= rhs, lhs=lhs, rhs=rhs)


def all_sv_condition_isotropic(n: int, d: float) -> SupportCondition:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    rhs = 10.0 * n * math.log(n) + n - 1.0
    return SupportCondition(holds=d > rhs, lhs=float(d), rhs=rhs)


def bilevel_sv_sufficient(p: float, q: float, r: float) -> bool:
    check_admissible(p, q, r)
    return p > 2 and q > 1.5 - r


def predicted_scalings(p: float, q: float, r: float, nu_star: float = 0.0) -> AsymptoticPrediction:
    """Limits and exponents of survival, contamination and their ratio.

    Exponents are powers of ``n`` (log factors dropped), for minimum-norm
    interpolation of binary labels.
    """
    check_admissible(p, q, r)
    if not 0 <= nu_star < 0.5:
        raise InvalidParams(f"need 0 <= nu_star < 1/2, got {nu_star}")
    knee = 1.0 - r
    if abs(q - knee) <= BOUNDARY_ATOL:
        raise BoundaryCase(f"q = 1 - r = {knee}: exponents are undefined at the knee")
    snr_upper = (p - 1.0) / 2.0 + knee - q
    if q < knee:
        return AsymptoticPrediction(
            su_limit=math.sqrt(2.0 / math.pi) * (1.0 - 2.0 * nu_star),
            su_exponent=0.0,
            cn_upper_exponent=-min(p - 1.0, knee) / 2.0,
            cn_lower_exponent=q - knee - (p - 1.0) / 2.0,
            snr_lower_exponent=min(p - 1.0, knee) / 2.0,
            snr_upper_exponent=snr_upper,
        )
    return AsymptoticPrediction(
        su_limit=0.0,
        su_exponent=knee - q,
        cn_upper_exponent=-min(p - 1.0, 2.0 * q + r - 1.0) / 2.0,
        cn_lower_exponent=-(p - 1.0) / 2.0,
        snr_lower_exponent=min(p - 1.0, 2.0 * q + r - 1.0) / 2.0 + knee - q,
        snr_upper_exponent=snr_upper,
    )


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(ns, values) -> ExponentFit:
    """Least-squares fit of ``log(values)`` against ``log(ns)``."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.size < 3 or ns.size != values.size:
        raise DegenerateInput("need at least 3 paired points")
    if np.any(values <= 0) or np.any(ns <= 0):
        raise DegenerateInput("log-log fit needs positive inputs")
    if np.ptp(ns) == 0:
        raise DegenerateInput("all n values are equal")
    lx, ly = np.log(ns), np.log(values)
    if np.ptp(ly) == 0:
        return ExponentFit(slope=0.0, intercept=float(ly[0]), r_squared=1.0)
    res = stats.linregress(lx, ly)
    return ExponentFit(slope=float(res.slope), intercept=float(res.intercept), r_squared=float(res.rvalue**2))
