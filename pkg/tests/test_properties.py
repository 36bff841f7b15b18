"""Property-based checks of the library's invariants."""

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from overparam.ensembles import BiLevel, Isotropic, SignalSpec, Spectrum, build_spectrum, sample_dataset
from overparam.fourier import (
    closed_form_alias,
    cos_column,
    fourier_features,
    regular_grid,
    sin_column,
)
from overparam.metrics import analytic_losses, margin_bound
from overparam.rng import derive_seed, make_rng
from overparam.solvers import (
    kkt_check,
    min_norm_interpolate,
    slackness_predictor,
    solve_svm_hard_margin,
)
from overparam.theory import (
    Regime,
    all_sv_condition_general,
    all_sv_condition_isotropic,
    classify_regime,
    predicted_scalings,
)

SETTINGS = settings(max_examples=40, deadline=None)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_instance(seed, max_n=10, max_d=40, correlated=True):
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    d = int(rng.integers(n, max_d + 1))
    phi = rng.standard_normal((n, d))
    if correlated:
        phi += rng.uniform(0, 2) * rng.standard_normal(d)
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return phi, y


@SETTINGS
@given(n=st.integers(2, 400), p=st.floats(1.05, 2.0), q_frac=st.floats(0.01, 1.0), r=st.floats(0.0, 0.9))
def test_bilevel_trace_equals_dimension(n, p, q_frac, r):
    q = q_frac * (p - r)
    spec = BiLevel(n, p, q, r)
    d, s = spec.dims
    a = n**-q
    assume(d > s and a * d / s >= (1 - a) * d / (d - s))
    lam = build_spectrum(spec).lambdas
    assert abs(lam.sum() - d) <= 1e-9 * d


@SETTINGS
@given(seed=seeds)
def test_min_norm_lies_in_row_space_and_is_minimal(seed):
    phi, _ = random_instance(seed)
    rng = make_rng(derive_seed(seed, 1))
    targets = rng.standard_normal(phi.shape[0])
    alpha = min_norm_interpolate(phi, targets).alpha
    w, *_ = np.linalg.lstsq(phi.T, alpha, rcond=None)
    assert np.abs(phi.T @ w - alpha).max() <= 1e-8
    # adding anything from the null space only increases the norm
    _, _, vt = np.linalg.svd(phi)
    null = vt[phi.shape[0] :]
    if null.size:
        other = alpha + null.T @ rng.standard_normal(null.shape[0])
        assert np.linalg.norm(alpha) <= np.linalg.norm(other) + 1e-12


@SETTINGS
@given(seed=seeds, c=st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3))
def test_min_norm_scales_with_targets(seed, c):
    phi, y = random_instance(seed)
    base = min_norm_interpolate(phi, y).alpha
    scaled = min_norm_interpolate(phi, c * y).alpha
    assert np.abs(scaled - c * base).max() <= 1e-10 * max(1.0, abs(c) * np.abs(base).max())


@SETTINGS
@given(seed=seeds)
def test_svm_output_passes_kkt(seed):
    phi, y = random_instance(seed)
    svm, dual = solve_svm_hard_margin(phi, y)
    assert kkt_check(phi, y, svm.alpha, dual.beta, 1e-8).feasible


@SETTINGS
@given(seed=seeds)
def test_slackness_predicate_decides_equivalence(seed):
    phi, y = random_instance(seed)
    pred = slackness_predictor(phi, y)
    svm, _ = solve_svm_hard_margin(phi, y)
    margins = y * (phi @ svm.alpha)
    if pred.all_sv:
        interp = min_norm_interpolate(phi, y).alpha
        assert np.abs(svm.alpha - interp).max() <= 1e-6 * np.abs(interp).max()
        assert abs(margins.min() - 1.0) <= 1e-6
    else:
        assert margins.max() > 1 + 1e-6


@SETTINGS
@given(seed=seeds, c=st.floats(1e-3, 1e3))
def test_normalized_margin_is_scale_free(seed, c):
    phi, y = random_instance(seed)
    svm, _ = solve_svm_hard_margin(phi, y)
    base = margin_bound(phi, y, svm.alpha).gamma_n
    assert abs(margin_bound(phi, y, c * svm.alpha).gamma_n - base) <= 1e-12 * max(1.0, base)


@SETTINGS
@given(cn=st.floats(1e-3, 10), s1=st.floats(-20, 20), s2=st.floats(-20, 20))
def test_excess_cls_decreases_in_snr(cn, s1, s2):
    lo, hi = sorted((s1, s2))
    if hi - lo < 1e-6:
        return
    assert analytic_losses(lo * cn, cn).excess_cls > analytic_losses(hi * cn, cn).excess_cls


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.0, 0.99))
def test_regimes_ordered_in_q(r):
    order = [Regime.BOTH_SUCCEED, Regime.CLASSIFICATION_ONLY, Regime.BOTH_FAIL]
    ranks = []
    for q in np.linspace(0.005, 1.5 - r, 100):
        regime = classify_regime(1.5, q, r).regime
        if regime is not Regime.BOUNDARY:
            ranks.append(order.index(regime))
    assert ranks == sorted(ranks)


@SETTINGS
@given(p=st.floats(1.05, 3.0), r=st.floats(0.0, 0.95), q_frac=st.floats(0.01, 1.0))
def test_scalings_agree_with_regime_limits(p, r, q_frac):
    q = q_frac * (p - r)
    verdict = classify_regime(p, q, r)
    if verdict.regime is Regime.BOUNDARY:
        return
    pred = predicted_scalings(p, q, r)
    if verdict.limit_cls == 0.0:
        assert pred.su_limit > 0 or pred.snr_lower_exponent > 0
    else:
        assert pred.snr_upper_exponent < 0


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 64), log_d=st.floats(1, 6.5))
def test_general_condition_implies_isotropic_condition(n, log_d):
    d = int(10**log_d)
    if all_sv_condition_general(Spectrum(np.ones(d)), n).holds:
        assert all_sv_condition_isotropic(n, d).holds


@settings(max_examples=25, deadline=None)
@given(half=st.integers(1, 12), k=st.integers(1, 4), data=st.data())
def test_alias_columns_on_grid(half, k, data):
    n = 2 * half + 1
    j = data.draw(st.integers(1, half))
    F = fourier_features(regular_grid(n), 2 * (k * n + j) + 1)
    np.testing.assert_allclose(F[:, cos_column(k * n + j)], F[:, cos_column(j)], atol=1e-12)
    np.testing.assert_allclose(F[:, sin_column(k * n + j)], F[:, sin_column(j)], atol=1e-12)
    np.testing.assert_allclose(F[:, cos_column(k * n - j)], F[:, cos_column(j)], atol=1e-12)
    np.testing.assert_allclose(F[:, sin_column(k * n - j)], -F[:, sin_column(j)], atol=1e-12)


@SETTINGS
@given(n=st.sampled_from([3, 7, 49]), mult=st.integers(1, 30), lambda_h=st.floats(1e-3, 1e6))
def test_closed_form_constraint(n, mult, lambda_h):
    cf = closed_form_alias(n, n * (2 * mult - 1), lambda_h)
    m = 2 * mult - 2
    assert abs(cf.a + m * cf.b - 1.0) <= 1e-12
    assert abs(cf.sigma_cn - math.sqrt(m) * cf.b) <= 1e-15


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_sampling_is_pure(seed):
    spec = Isotropic(6, 20)
    a = sample_dataset(spec, SignalSpec(nu_star=0.1), 6, seed)
    b = sample_dataset(spec, SignalSpec(nu_star=0.1), 6, seed)
    np.testing.assert_array_equal(a.phi, b.phi)
    np.testing.assert_array_equal(a.y, b.y)
