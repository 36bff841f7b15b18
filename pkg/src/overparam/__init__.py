"""Minimum-norm interpolation versus the hard-margin SVM in overparameterized
linear models: data generation, solvers, survival/contamination metrics,
theoretical predictions and a Monte-Carlo sweep harness."""

from .ensembles import (
    BiLevel,
    Dataset,
    Explicit,
    Isotropic,
    PolyDecay,
    SignalSpec,
    Spectrum,
    WeakFeatures,
    alpha_star,
    bilevel_dims,
    build_spectrum,
    sample_dataset,
    sample_test_set,
)
from .metrics import (
    analytic_losses,
    cauchy_ratio_check,
    contamination,
    empirical_losses,
    margin_bound,
    survival,
)
from .solvers import (
    SolverOptions,
    gram_matrix,
    kkt_check,
    min_norm_interpolate,
    slackness_predictor,
    solve_svm_hard_margin,
    support_vector_fraction,
)
from .theory import classify_regime, fit_exponent, predicted_scalings

__version__ = "0.1.0"
