import math

import numpy as np
import pytest

from overparam.ensembles import Spectrum
from overparam.errors import BoundaryCase, DegenerateInput, InvalidParams
from overparam.theory import (
    Regime,
    all_sv_condition_general,
    all_sv_condition_isotropic,
    bilevel_sv_sufficient,
    classify_regime,
    fit_exponent,
    predicted_scalings,
    regime_thresholds,
)


class TestRegimes:
    @pytest.mark.parametrize(
        "q, regime, limits",
        [
            (0.25, Regime.BOTH_SUCCEED, (0.0, 0.0)),
            (0.6, Regime.CLASSIFICATION_ONLY, (1.0, 0.0)),
            (0.9, Regime.BOTH_FAIL, (1.0, 0.5)),
        ],
    )
    def test_examples(self, q, regime, limits):
        v = classify_regime(1.5, q, 0.5)
        assert v.regime is regime
        assert (v.limit_mse, v.limit_cls) == limits
        assert (v.q_low, v.q_high) == (0.5, 0.75)

    @pytest.mark.parametrize("q", [0.5, 0.75])
    def test_thresholds_are_boundaries(self, q):
        v = classify_regime(1.5, q, 0.5)
        assert v.regime is Regime.BOUNDARY
        assert v.limit_mse is None

    def test_inadmissible(self):
        with pytest.raises(InvalidParams):
            classify_regime(1.5, 1.2, 0.5)
        with pytest.raises(InvalidParams):
            classify_regime(0.9, 0.2, 0.5)

    def test_thresholds(self):
        assert regime_thresholds(2.0, 0.2) == pytest.approx((0.8, 1.3))


class TestSupportConditions:
    def test_isotropic_threshold_at_n32(self):
        cond = all_sv_condition_isotropic(32, 1141)
        assert cond.rhs == pytest.approx(10 * 32 * math.log(32) + 31)
        assert cond.rhs == pytest.approx(1140.0, abs=0.1)
        assert cond.holds
        assert not all_sv_condition_isotropic(32, 1024).holds

    def test_isotropic_small_n(self):
        cond = all_sv_condition_isotropic(2, 100)
        assert cond.holds
        assert cond.rhs == pytest.approx(14.86, abs=0.01)

    def test_general_is_conservative(self):
        assert not all_sv_condition_general(Spectrum(np.ones(1141)), 32).holds

    def test_general_single_eigenvalue(self):
        cond = all_sv_condition_general(Spectrum(np.array([1.0])), 2)
        assert not cond.holds
        assert cond.lhs == 1.0

    @pytest.mark.parametrize("n", [4, 8, 32])
    def test_general_isotropic_crossing(self, n):
        # isotropic: d >= 72 (sqrt(d) n sqrt(ln n) + n^1.5 ln n + 1) is a quadratic in sqrt(d)
        b = 72 * n * math.sqrt(math.log(n))
        c = 72 * (n**1.5 * math.log(n) + 1)
        root = (b + math.sqrt(b * b + 4 * c)) / 2
        d_star = math.ceil(root**2)
        assert all_sv_condition_general(Spectrum(np.ones(d_star)), n).holds
        assert not all_sv_condition_general(Spectrum(np.ones(d_star - 2)), n).holds

    def test_bilevel_sufficient(self):
        assert bilevel_sv_sufficient(3, 1.2, 0.5)
        assert not bilevel_sv_sufficient(1.5, 0.8, 0.5)
        assert not bilevel_sv_sufficient(2, 1.4, 0.5)


class TestScalings:
    def test_classification_only_exponents(self):
        pred = predicted_scalings(1.5, 0.6, 0.5)
        assert pred.su_exponent == pytest.approx(-0.1)
        assert pred.cn_lower_exponent == pytest.approx(-0.25)
        assert pred.su_limit == 0.0

    def test_survival_limit(self):
        assert predicted_scalings(1.5, 0.1, 0.5).su_limit == pytest.approx(math.sqrt(2 / math.pi))
        assert predicted_scalings(1.5, 0.1, 0.5).su_limit == pytest.approx(0.7979, abs=1e-4)

    def test_label_noise_halves_survival(self):
        clean = predicted_scalings(1.5, 0.1, 0.5, 0.0).su_limit
        assert predicted_scalings(1.5, 0.1, 0.5, 0.25).su_limit == pytest.approx(clean / 2)

    def test_knee_is_undefined(self):
        with pytest.raises(BoundaryCase):
            predicted_scalings(1.5, 0.5, 0.5)

    def test_noise_range(self):
        with pytest.raises(InvalidParams):
            predicted_scalings(1.5, 0.1, 0.5, 0.5)


class TestFitExponent:
    def test_exact_power_law(self):
        ns = np.array([64, 128, 256, 512, 1024], dtype=float)
        fit = fit_exponent(ns, ns**-0.25)
        assert fit.slope == pytest.approx(-0.25, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_constant(self):
        assert fit_exponent([1, 2, 4], [3, 3, 3]).slope == 0.0

    @pytest.mark.parametrize(
        "ns, values",
        [([1, 2], [1, 2]), ([1, 2, 4], [1, -2, 3]), ([2, 2, 2], [1, 2, 3]), ([1, 2, 4], [1, 2])],
    )
    def test_degenerate(self, ns, values):
        with pytest.raises(DegenerateInput):
            fit_exponent(ns, values)
