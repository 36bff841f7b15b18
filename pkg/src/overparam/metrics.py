"""Survival, contamination, test losses and the margin bound.

For a 1-sparse truth ``e_t / sqrt(lambda_t)`` under Gaussian features, any
coefficient vector's test behavior is captured by two numbers: the survival
``SU = sqrt(lambda_t) * alpha_t`` (how much of the true feature is kept) and
the contamination ``CN`` (standard deviation of the prediction contributed by
every other feature). Excess MSE and excess classification error are exact
functions of the pair; :func:`empirical_losses` estimates the same quantities
by Monte Carlo so the closed forms can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import (
    EnsembleSpec,
    Explicit,
    SignalSpec,
    Spectrum,
    iter_blocks,
    sgn,
)
from .errors import NotSeparating
from .rng import make_rng


@dataclass
class SuCnReport:
    su: float
    cn: float
    snr: float


@dataclass
class LossReport:
    excess_mse: float
    excess_cls: float


@dataclass
class EmpiricalReport:
    mse_hat: float
    err_hat: float
    n_test: int
    std_err: float
    mse_std: float  # sample std of the per-point squared errors


@dataclass
class MarginReport:
    gamma: float
    gamma_n: float
    frob: float
    alpha_norm: float
    ramp_term: float
    complexity_term: float
    confidence_term: float
    bound: float
    delta: float


def _index(spectrum: Spectrum, t: int) -> int:
    if not 1 <= t <= spectrum.d:
        raise IndexError(f"feature index t={t} outside 1..{spectrum.d}")
    return t - 1


def survival(alpha: np.ndarray, spectrum: Spectrum, t: int) -> float:
    i = _index(spectrum, t)
    return float(math.sqrt(spectrum.lambdas[i]) * alpha[i])


def contamination(alpha: np.ndarray, spectrum: Spectrum, t: int) -> float:
    i = _index(spectrum, t)
    w = spectrum.lambdas * np.square(alpha)
    return math.sqrt(float(w[:i].sum() + w[i + 1 :].sum()))


def su_cn(alpha: np.ndarray, spectrum: Spectrum, t: int) -> SuCnReport:
    su = survival(alpha, spectrum, t)
    cn = contamination(alpha, spectrum, t)
    if cn > 0:
        snr = su / cn
    elif su != 0:
        snr = math.copysign(math.inf, su)
    else:
        snr = math.nan
    return SuCnReport(su=su, cn=cn, snr=snr)


def analytic_losses(su: float, cn: float) -> LossReport:
    """Exact excess MSE and excess 0-1 error under Gaussian features.

    With ``cn == 0`` the arctan is taken at its limit: error 0 for positive
    survival, 1 for negative, 1/2 when both vanish.
    """
    if cn < 0:
        raise ValueError(f"contamination must be non-negative, got {cn}")
    mse = (1.0 - su) ** 2 + cn**2
    if cn > 0:
        cls = 0.5 - math.atan(su / cn) / math.pi
    elif su > 0:
        cls = 0.0
    elif su < 0:
        cls = 1.0
    else:
        cls = 0.5
    return LossReport(excess_mse=mse, excess_cls=min(max(cls, 0.0), 1.0))


def evaluate_on_blocks(alpha: np.ndarray, blocks) -> EmpiricalReport:
    """Accumulate test MSE and sign error over ``(phi, z, y)`` blocks.

    The truth is the real output ``z``; the classification target is ``sgn(z)``.
    """
    sq_sum = 0.0
    sq_sq_sum = 0.0
    wrong = 0
    count = 0
    for phi, z, _ in blocks:
        pred = phi @ alpha
        err = np.square(z - pred)
        sq_sum += float(err.sum())
        sq_sq_sum += float(np.square(err).sum())
        wrong += int(np.count_nonzero(sgn(pred) != sgn(z)))
        count += z.size
    if count == 0:
        raise ValueError("empty test set")
    mse = sq_sum / count
    var = max(sq_sq_sum / count - mse**2, 0.0) * count / max(count - 1, 1)
    err_hat = wrong / count
    return EmpiricalReport(
        mse_hat=mse,
        err_hat=err_hat,
        n_test=count,
        std_err=math.sqrt(err_hat * (1 - err_hat) / count),
        mse_std=math.sqrt(var),
    )


def empirical_losses(
    alpha: np.ndarray, t: int, spectrum: Spectrum, n_test: int, seed: int
) -> EmpiricalReport:
    """Monte-Carlo excess MSE and excess 0-1 error on fresh Gaussian test points."""
    if n_test < 1:
        raise ValueError(f"n_test must be >= 1, got {n_test}")
    _index(spectrum, t)
    spec = Explicit(tuple(spectrum.lambdas))
    blocks = iter_blocks(spec, SignalSpec(t=t), n_test, seed)
    return evaluate_on_blocks(np.asarray(alpha, dtype=float), blocks)


def empirical_losses_for(
    alpha: np.ndarray, spec: EnsembleSpec, signal: SignalSpec, n_test: int, seed: int
) -> EmpiricalReport:
    """Same estimate for any ensemble, including weak features (truth ``z = X``)."""
    if n_test < 1:
        raise ValueError(f"n_test must be >= 1, got {n_test}")
    clean = SignalSpec(t=signal.t, nu_star=0.0)
    return evaluate_on_blocks(np.asarray(alpha, dtype=float), iter_blocks(spec, clean, n_test, seed))


def cauchy_ratio_check(n_samples: int, seed: int) -> float:
    """Sup distance between the empirical CDF of ``V/U`` and the standard Cauchy CDF."""
    if n_samples < 10_000:
        raise ValueError(f"need at least 10^4 samples, got {n_samples}")
    rng = make_rng(seed)
    u = rng.standard_normal(n_samples)
    v = rng.standard_normal(n_samples)
    ratio = np.sort(v / u)
    cdf = 0.5 + np.arctan(ratio) / np.pi
    k = np.arange(1, n_samples + 1)
    upper = np.max(k / n_samples - cdf)
    lower = np.max(cdf - (k - 1) / n_samples)
    return float(max(upper, lower))


def ramp_loss(z: np.ndarray, gamma: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.where(z <= 0, 1.0, np.where(z <= gamma, 1.0 - z / gamma, 0.0))


def margin_bound(
    phi: np.ndarray, y: np.ndarray, alpha: np.ndarray, delta: float = 0.05
) -> MarginReport:
    """Margin-based bound on test 0-1 error, with each addend reported.

    ``complexity_term`` depends only on the normalized margin and is invariant
    to rescaling ``alpha``; ``confidence_term`` uses the raw margin.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    margins = y * (phi @ alpha)
    gamma = float(margins.min())
    if gamma <= 0:
        raise NotSeparating(f"minimum training margin is {gamma:.3g}")
    alpha_norm = float(np.linalg.norm(alpha))
    gamma_n = gamma / alpha_norm
    frob = float(np.linalg.norm(phi))
    ramp = float(ramp_loss(margins, gamma).mean())
    complexity = 4.0 / gamma_n * frob / n
    confidence = (8.0 / gamma + 1.0) * math.sqrt(math.log(4.0 / delta) / (2 * n))
    return MarginReport(
        gamma=gamma,
        gamma_n=gamma_n,
        frob=frob,
        alpha_norm=alpha_norm,
        ramp_term=ramp,
        complexity_term=complexity,
        confidence_term=confidence,
        bound=ramp + complexity + confidence,
        delta=delta,
    )
