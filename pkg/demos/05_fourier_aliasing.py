"""Aliasing on a regular grid, and the closed form it implies.

On n equally spaced points, cos((kn +/- 1) x) is indistinguishable from
cos(x). A minimum weighted-norm fit of cos(x) splits the coefficient
between the true frequency (weight lambda_h) and its m aliases (weight 1):
a = lambda_h / (lambda_h + m) on the truth, b = 1 / (lambda_h + m) on each
alias.

Run: python3 demos/05_fourier_aliasing.py
"""

import math

import numpy as np

from overparam.fourier import (
    alias_frequencies,
    bilevel_design,
    closed_form_alias,
    cos_column,
    fourier_features,
    fourier_svm_support_fraction,
    fourier_test_error,
    regular_grid,
    weighted_min_norm,
)

n, d = 49, 441
x = regular_grid(n)
F = fourier_features(x, d)
print("cos(50x) - cos(x) on the grid:", np.abs(F[:, cos_column(50)] - F[:, cos_column(1)]).max())

plus, minus = alias_frequencies(n, d, 1)
print("aliases of frequency 1:", sorted(plus + minus))

for lambda_h in (23.81, 5.53, 1.89):
    design = bilevel_design(n, d, favored=7, lambda_h=lambda_h)
    coefs = weighted_min_norm(design, np.cos(x)) / math.sqrt(math.pi)
    cf = closed_form_alias(n, d, lambda_h)
    err = fourier_test_error(design, coefs * math.sqrt(math.pi), 20_000, seed=0)
    print(f"lambda_h={lambda_h:6.2f}  a={coefs[cos_column(1)]:.6f} (closed {cf.a:.6f})  "
          f"b={coefs[cos_column(plus[0])]:.6f} (closed {cf.b:.6f})  test sign error {err:.3f}")

# Hard-margin SVM on the same kind of features with polynomially decaying
# weights (k+1)^-m: slow decay keeps every point on the margin.
print("\nSVM support fraction on Fourier features (n=33, d=1023):")
for m in (0.5, 1.0, 2.0, 2.5, 3.0):
    res = fourier_svm_support_fraction(33, 33 * 31, m)
    print(f"  m={m:.1f}  {res['sv_fraction']:.3f}")
