"""Minimum-norm interpolation and the hard-margin SVM.

Both solvers work entirely with the ``n x n`` Gram matrix ``A = phi phi^T``;
nothing of size ``d x d`` is ever formed.

The SVM is solved in the dual::

    maximize    sum_i g_i - 1/2 g^T Q g      subject to g >= 0,
    Q = diag(y) A diag(y),   beta = y * g,   alpha = phi^T beta

by projected coordinate ascent with exact line search, warm-started from the
clipped interpolating dual ``A^{-1} y`` and finished by an exact solve on the
current active set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import Infeasible, NotConverged, SingularGram

MIN_NORM_REAL = "MinNormReal"
MIN_NORM_BINARY = "MinNormBinary"
SVM = "SVM"


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-10
    max_iter: int = 10_000
    jitter: Optional[float] = None  # None: 1e-10 * trace(A) / n

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_LINEAR = SolverOptions(tol=1e-10)
DEFAULT_SVM = SolverOptions(tol=1e-8)


@dataclass
class Coefficients:
    alpha: np.ndarray
    solver: str
    residual_inf: float


@dataclass
class DualSolution:
    beta: np.ndarray
    iterations: int
    kkt_gap: float


@dataclass
class KKTReport:
    feasible: bool
    stationarity_gap: float
    slackness_gap: float
    margin_min: float
    sign_violation: float


def gram_matrix(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    A = phi @ phi.T
    # symmetrize away BLAS rounding asymmetry
    return 0.5 * (A + A.T)


class GramFactor:
    """Cholesky factor of a Gram matrix, with one jittered retry."""

    def __init__(self, A: np.ndarray, jitter: Optional[float] = None):
        self.A = A
        n = A.shape[0]
        self.jitter = 0.0
        try:
            self._cho = sla.cho_factor(A, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            scale = np.trace(A) / max(n, 1)
            self.jitter = jitter if jitter is not None else 1e-10 * scale
            try:
                self._cho = sla.cho_factor(
                    A + self.jitter * np.eye(n), lower=True, check_finite=False
                )
            except np.linalg.LinAlgError:
                raise SingularGram(
                    f"Gram matrix not positive definite even with jitter {self.jitter:.3g}",
                    condition=_condition_estimate(A),
                ) from None
        diag = np.abs(np.diag(self._cho[0]))
        if diag.size and (not np.all(np.isfinite(diag)) or diag.min() == 0.0):
            raise SingularGram("Gram factor has a zero pivot", condition=math.inf)

    def solve(self, b: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self._cho, b, check_finite=False)

    def condition(self) -> float:
        """Squared ratio of extreme Cholesky pivots; a cheap lower estimate."""
        diag = np.abs(np.diag(self._cho[0]))
        return float((diag.max() / diag.min()) ** 2)


def _condition_estimate(A: np.ndarray) -> float:
    w = np.linalg.eigvalsh(A)
    if w[0] <= 0:
        return math.inf
    return float(w[-1] / w[0])


def min_norm_interpolate(
    phi: np.ndarray,
    targets: np.ndarray,
    opts: SolverOptions = DEFAULT_LINEAR,
    *,
    factor: Optional[GramFactor] = None,
    solver: Optional[str] = None,
) -> Coefficients:
    """Smallest-norm ``alpha`` with ``phi @ alpha == targets``.

    ``factor`` lets callers reuse one Cholesky factorization across several
    target vectors on the same features.
    """
    phi = np.asarray(phi, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if factor is None:
        factor = GramFactor(gram_matrix(phi), opts.jitter)
    w = factor.solve(targets)
    alpha = phi.T @ w
    residual = float(np.max(np.abs(phi @ alpha - targets), initial=0.0))
    if solver is None:
        binary = targets.size > 0 and np.all(np.abs(targets) == 1.0)
        solver = MIN_NORM_BINARY if binary else MIN_NORM_REAL
    return Coefficients(alpha=alpha, solver=solver, residual_inf=residual)


def kkt_check(
    phi: np.ndarray, y: np.ndarray, alpha: np.ndarray, beta: np.ndarray, tol: float
) -> KKTReport:
    """Verify hard-margin SVM optimality of a primal/dual pair."""
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    margins = y * (phi @ alpha)
    margin_min = float(margins.min()) if margins.size else math.inf
    stationarity = float(np.max(np.abs(alpha - phi.T @ beta), initial=0.0))
    slackness = float(np.max(np.abs(beta) * np.abs(margins - 1.0), initial=0.0))
    sign_violation = float(np.max(-(y * beta), initial=0.0))
    scale = 1.0 + float(np.max(np.abs(alpha), initial=0.0))
    feasible = (
        margin_min >= 1.0 - tol
        and stationarity <= tol * scale
        and slackness <= tol
        and sign_violation <= tol
    )
    return KKTReport(
        feasible=bool(feasible),
        stationarity_gap=stationarity,
        slackness_gap=slackness,
        margin_min=margin_min,
        sign_violation=max(sign_violation, 0.0),
    )


def _kkt_gap(report: KKTReport, alpha: np.ndarray) -> float:
    scale = 1.0 + float(np.max(np.abs(alpha), initial=0.0))
    return max(
        max(0.0, 1.0 - report.margin_min),
        report.stationarity_gap / scale,
        report.slackness_gap,
        report.sign_violation,
    )


def _separable(phi: np.ndarray, y: np.ndarray) -> bool:
    from scipy.optimize import linprog

    n, d = phi.shape
    res = linprog(
        np.zeros(d),
        A_ub=-(y[:, None] * phi),
        b_ub=-np.ones(n),
        bounds=[(None, None)] * d,
        method="highs",
    )
    return res.status == 0


def solve_svm_hard_margin(
    phi: np.ndarray,
    y: np.ndarray,
    opts: SolverOptions = DEFAULT_SVM,
    *,
    gram: Optional[np.ndarray] = None,
    factor: Optional[GramFactor] = None,
) -> tuple[Coefficients, DualSolution]:
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    A = gram_matrix(phi) if gram is None else gram
    if factor is None:
        try:
            factor = GramFactor(A, opts.jitter)
        except SingularGram:
            factor = None
    if factor is None or factor.jitter > 0:
        if not _separable(phi, y):
            raise Infeasible("no coefficient vector reaches unit margin on every point")

    Q = (y[:, None] * A) * y[None, :]
    qdiag = np.diag(Q).copy()
    if np.any(qdiag <= 0):
        raise Infeasible("a training point has zero features")

    if factor is not None:
        g = np.maximum(y * factor.solve(y), 0.0)
    else:
        g = np.zeros(n)

    def finish(g_vec, iterations):
        beta = y * g_vec
        alpha = phi.T @ beta
        report = kkt_check(phi, y, alpha, beta, opts.tol)
        return alpha, beta, report, _kkt_gap(report, alpha)

    grad = Q @ g - 1.0
    best = None
    for it in range(opts.max_iter + 1):
        polished = _polish(Q, g)
        if polished is not None:
            alpha, beta, report, gap = finish(polished, it)
            if report.feasible:
                return _pack(alpha, beta, it, gap, report)
        alpha, beta, report, gap = finish(g, it)
        if report.feasible:
            return _pack(alpha, beta, it, gap, report)
        best = (alpha, beta, gap)
        if it == opts.max_iter:
            break
        for i in range(n):
            new = g[i] - grad[i] / qdiag[i]
            if new < 0.0:
                new = 0.0
            delta = new - g[i]
            if delta != 0.0:
                g[i] = new
                grad += delta * Q[:, i]
        if not np.all(np.isfinite(g)) or np.max(g, initial=0.0) > 1e15:
            raise Infeasible("dual objective is unbounded; data not separable")
        grad = Q @ g - 1.0  # refresh to stop drift
    alpha, beta, gap = best
    raise NotConverged(
        f"SVM dual ascent did not reach tol={opts.tol} in {opts.max_iter} sweeps",
        best=(Coefficients(alpha, SVM, max(0.0, 1.0 - float((y * (phi @ alpha)).min()))),
              DualSolution(beta, opts.max_iter, gap)),
        kkt_gap=gap,
    )


def _polish(Q: np.ndarray, g: np.ndarray) -> Optional[np.ndarray]:
    """Solve the equality system on the active set of ``g``; None if unusable."""
    active = np.flatnonzero(g > 0)
    if active.size == 0:
        return None
    try:
        sub = sla.solve(Q[np.ix_(active, active)], np.ones(active.size), assume_a="pos")
    except (np.linalg.LinAlgError, ValueError):
        return None
    if np.any(sub < 0) or not np.all(np.isfinite(sub)):
        return None
    out = np.zeros_like(g)
    out[active] = sub
    return out


def _pack(alpha, beta, iterations, gap, report):
    residual = max(0.0, 1.0 - report.margin_min)
    return (
        Coefficients(alpha=alpha, solver=SVM, residual_inf=residual),
        DualSolution(beta=beta, iterations=int(iterations), kkt_gap=float(gap)),
    )


def support_vector_fraction(
    phi: np.ndarray, y: np.ndarray, alpha: np.ndarray, tol: float = 1e-6
) -> float:
    """Share of training points whose margin is at most ``1 + tol``."""
    margins = np.asarray(y, dtype=float) * (np.asarray(phi, dtype=float) @ alpha)
    if margins.size == 0:
        return 1.0
    return float(np.mean(margins <= 1.0 + tol))


@dataclass
class SlacknessPrediction:
    all_sv: bool
    min_value: float


def slackness_predictor(
    phi: np.ndarray, y: np.ndarray, *, factor: Optional[GramFactor] = None
) -> SlacknessPrediction:
    """Certify that every point is a support vector without running the SVM.

    If every entry of ``y * (A^{-1} y)`` is positive, the interpolating dual is
    sign-feasible, hence SVM optimal, so the SVM equals the minimum-norm
    interpolator of ``y``.
    """
    y = np.asarray(y, dtype=float)
    if factor is None:
        factor = GramFactor(gram_matrix(phi))
    values = y * factor.solve(y)
    min_value = float(values.min())
    return SlacknessPrediction(all_sv=min_value > 0, min_value=min_value)
