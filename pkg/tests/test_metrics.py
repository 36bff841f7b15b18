import math

import numpy as np
import pytest
from scipy import stats

from overparam.ensembles import (
    BiLevel,
    Isotropic,
    SignalSpec,
    WeakFeatures,
    alpha_star,
    build_spectrum,
    sample_dataset,
)
from overparam.errors import NotSeparating
from overparam.metrics import (
    analytic_losses,
    cauchy_ratio_check,
    contamination,
    empirical_losses,
    empirical_losses_for,
    margin_bound,
    ramp_loss,
    su_cn,
    survival,
)
from overparam.solvers import min_norm_interpolate, solve_svm_hard_margin

ISO4 = build_spectrum(Isotropic(4, 4))


class TestSurvivalContamination:
    def test_true_coefficients_survive_fully(self):
        spectrum = build_spectrum(BiLevel(64, 1.5, 0.3, 0.5))
        a = alpha_star(spectrum, 1)
        assert survival(a, spectrum, 1) == pytest.approx(1.0)
        assert contamination(a, spectrum, 1) == 0.0

    def test_zero(self):
        assert survival(np.zeros(4), ISO4, 1) == 0.0

    def test_scaled_basis_vector_has_no_contamination(self):
        assert contamination(np.array([2.5, 0, 0, 0]), ISO4, 1) == 0.0

    def test_single_extra_term(self):
        assert contamination(np.array([1.0, 1.0, 0, 0]), ISO4, 1) == pytest.approx(1.0)

    def test_index_range(self):
        with pytest.raises(IndexError):
            survival(np.zeros(4), ISO4, 5)
        with pytest.raises(IndexError):
            contamination(np.zeros(4), ISO4, 0)

    def test_snr_conventions(self):
        assert su_cn(np.array([1.0, 0, 0, 0]), ISO4, 1).snr == math.inf
        assert su_cn(np.array([-1.0, 0, 0, 0]), ISO4, 1).snr == -math.inf
        assert math.isnan(su_cn(np.zeros(4), ISO4, 1).snr)


class TestAnalyticLosses:
    def test_perfect_recovery(self):
        rep = analytic_losses(1.0, 0.0)
        assert (rep.excess_mse, rep.excess_cls) == (0.0, 0.0)

    @pytest.mark.parametrize("c", [1e-3, 0.7, 40.0])
    def test_equal_su_cn_gives_quarter(self, c):
        assert analytic_losses(c, c).excess_cls == pytest.approx(0.25)

    def test_no_survival_is_coin_flip(self):
        assert analytic_losses(0.0, 2.0).excess_cls == 0.5

    def test_zero_contamination_limits(self):
        assert analytic_losses(-0.3, 0.0).excess_cls == 1.0
        assert analytic_losses(0.0, 0.0).excess_cls == 0.5
        assert analytic_losses(0.2, 0.0).excess_cls == 0.0

    def test_mse_formula(self):
        assert analytic_losses(0.5, 2.0).excess_mse == pytest.approx(0.25 + 4.0)

    def test_negative_contamination_rejected(self):
        with pytest.raises(ValueError):
            analytic_losses(0.5, -1.0)

    def test_cls_matches_gaussian_orthant_probability(self):
        # P(sign(su*g + cn*h) != sign(g)) for independent standard normals,
        # evaluated by 1-D quadrature as an independent oracle
        from scipy import integrate

        su, cn = 0.6, 0.9

        def integrand(g):
            return stats.norm.pdf(g) * stats.norm.cdf(-su * abs(g) / cn)

        oracle = integrate.quad(integrand, -np.inf, np.inf)[0]
        assert analytic_losses(su, cn).excess_cls == pytest.approx(oracle, abs=1e-10)


class TestEmpiricalLosses:
    def test_truth_has_zero_loss(self):
        spectrum = build_spectrum(BiLevel(64, 1.5, 0.3, 0.5))
        rep = empirical_losses(alpha_star(spectrum, 1), 1, spectrum, 5000, seed=1)
        assert rep.err_hat == 0.0
        assert rep.mse_hat == pytest.approx(0.0, abs=1e-20)

    def test_negated_truth(self):
        spectrum = build_spectrum(BiLevel(64, 1.5, 0.3, 0.5))
        rep = empirical_losses(-alpha_star(spectrum, 1), 1, spectrum, 20000, seed=1)
        assert rep.err_hat == 1.0
        # 2<phi, alpha*> has variance 4
        assert abs(rep.mse_hat - 4.0) < 5 * rep.mse_std / math.sqrt(rep.n_test)

    def test_matches_analytic_on_interpolator(self):
        spec = BiLevel(64, 1.5, 0.4, 0.5)
        data = sample_dataset(spec, SignalSpec(), 64, seed=3)
        spectrum = build_spectrum(spec)
        alpha = min_norm_interpolate(data.phi, data.z).alpha
        rep = su_cn(alpha, spectrum, 1)
        ana = analytic_losses(rep.su, rep.cn)
        emp = empirical_losses(alpha, 1, spectrum, 50_000, seed=4)
        assert abs(emp.mse_hat - ana.excess_mse) <= 5 * emp.mse_std / math.sqrt(emp.n_test)
        assert abs(emp.err_hat - ana.excess_cls) <= 3 * emp.std_err

    def test_weak_features_need_the_spec(self):
        spec = WeakFeatures(16, 64, 0.1)
        alpha = np.full(64, 1.0 / 64)
        rep = empirical_losses_for(alpha, spec, SignalSpec(), 3000, seed=0)
        assert 0.0 <= rep.err_hat <= 1.0

    def test_requires_test_points(self):
        with pytest.raises(ValueError):
            empirical_losses(np.zeros(4), 1, ISO4, 0, seed=0)


class TestCauchy:
    def test_close_to_cauchy(self):
        assert cauchy_ratio_check(100_000, seed=0) <= 0.01

    def test_deterministic(self):
        assert cauchy_ratio_check(10_000, seed=3) == cauchy_ratio_check(10_000, seed=3)

    def test_agrees_with_scipy_ks_statistic(self):
        from overparam.rng import make_rng

        rng = make_rng(5)
        u, v = rng.standard_normal(10_000), rng.standard_normal(10_000)
        assert cauchy_ratio_check(10_000, seed=5) == pytest.approx(stats.kstest(v / u, "cauchy").statistic, abs=1e-12)

    def test_minimum_sample_count(self):
        with pytest.raises(ValueError):
            cauchy_ratio_check(100, seed=0)


class TestMargin:
    def test_ramp_loss(self):
        np.testing.assert_allclose(ramp_loss([-1.0, 0.0, 0.5, 1.0, 2.0], 1.0), [1, 1, 0.5, 0, 0])

    def test_isotropic_bound_is_vacuous(self):
        data = sample_dataset(Isotropic(32, 4096), SignalSpec(), 32, seed=0)
        svm, _ = solve_svm_hard_margin(data.phi, data.y)
        rep = margin_bound(data.phi, data.y, svm.alpha, delta=0.05)
        assert rep.bound > 1.0
        assert rep.gamma == pytest.approx(1.0, abs=1e-6)
        # every margin is at least gamma, so the ramp never fires
        assert rep.ramp_term == 0.0
        assert rep.bound == pytest.approx(rep.ramp_term + rep.complexity_term + rep.confidence_term)

    def test_scaling_keeps_normalized_terms(self):
        data = sample_dataset(Isotropic(16, 256), SignalSpec(), 16, seed=2)
        svm, _ = solve_svm_hard_margin(data.phi, data.y)
        base = margin_bound(data.phi, data.y, svm.alpha)
        scaled = margin_bound(data.phi, data.y, 3.0 * svm.alpha)
        assert scaled.gamma_n == pytest.approx(base.gamma_n, abs=1e-12)
        assert scaled.complexity_term == pytest.approx(base.complexity_term, rel=1e-12)
        assert scaled.ramp_term == pytest.approx(base.ramp_term, abs=1e-12)
        assert scaled.gamma == pytest.approx(3.0 * base.gamma)

    def test_rejects_non_separating(self):
        with pytest.raises(NotSeparating):
            margin_bound(np.eye(2), np.array([1.0, -1.0]), np.array([1.0, 1.0]))

    def test_delta_range(self):
        with pytest.raises(ValueError):
            margin_bound(np.eye(2), np.ones(2), np.ones(2), delta=1.5)
