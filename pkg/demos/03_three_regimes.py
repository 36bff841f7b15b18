"""Classification can succeed where regression fails.

For the same features, interpolate the real outputs (regression) and the
signs (classification), then read both test errors off survival and
contamination. No test set is needed: the losses are closed-form in those
two numbers under Gaussian features.

Run: python3 demos/03_three_regimes.py   (about 30 s)
"""

import numpy as np

from overparam import BiLevel, SignalSpec, build_spectrum, sample_dataset
from overparam.metrics import analytic_losses, su_cn
from overparam.solvers import GramFactor, gram_matrix, min_norm_interpolate
from overparam.theory import classify_regime

n, p, r = 529, 1.5, 0.5
print(f"{'q':>5} {'regime':>20} {'excess MSE':>11} {'excess 0-1':>11}")
for q in (0.2, 0.35, 0.6, 0.7, 0.85, 0.95):
    spec = BiLevel(n, p, q, r)
    spectrum = build_spectrum(spec)
    mse, cls = [], []
    for seed in range(8):
        data = sample_dataset(spec, SignalSpec(), n, seed)
        factor = GramFactor(gram_matrix(data.phi))        # shared by both fits
        real = su_cn(min_norm_interpolate(data.phi, data.z, factor=factor).alpha, spectrum, 1)
        binary = su_cn(min_norm_interpolate(data.phi, data.y, factor=factor).alpha, spectrum, 1)
        mse.append(analytic_losses(real.su, real.cn).excess_mse)
        cls.append(analytic_losses(binary.su, binary.cn).excess_cls)
    regime = classify_regime(p, q, r).regime.value
    print(f"{q:5.2f} {regime:>20} {np.median(mse):11.3f} {np.median(cls):11.3f}")

print("\nMSE near 1 means the regression fit predicts almost nothing;"
      "\n0-1 error near 0.5 means the classifier is guessing.")
