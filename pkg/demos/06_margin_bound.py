"""A margin-based generalization bound that cannot see the difference.

For isotropic features the SVM's test error climbs toward 1/2 as d grows;
for weak features it falls. The margin bound stays above 1 in both cases,
so it says nothing about either trend.

Run: python3 demos/06_margin_bound.py   (about 20 s)
"""

import numpy as np

from overparam import Isotropic, SignalSpec, WeakFeatures, sample_dataset
from overparam.metrics import empirical_losses_for, margin_bound
from overparam.solvers import solve_svm_hard_margin

n = 32
for name, make in (("isotropic", lambda d: Isotropic(n, d)),
                   ("weak features", lambda d: WeakFeatures(n, d, 0.1))):
    print(name)
    for d in (128, 1024, 8192):
        spec = make(d)
        bounds, errs = [], []
        for seed in range(6):
            data = sample_dataset(spec, SignalSpec(), n, seed)
            svm, _ = solve_svm_hard_margin(data.phi, data.y)
            bounds.append(margin_bound(data.phi, data.y, svm.alpha).bound)
            errs.append(empirical_losses_for(svm.alpha, spec, SignalSpec(), 2000, seed + 1000).err_hat)
        print(f"  d={d:5d}  bound {np.median(bounds):6.3f}   test error {np.median(errs):.3f}")
