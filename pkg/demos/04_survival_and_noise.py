"""Survival of the true feature under sign labels, and how label noise
scales it.

Interpolating +/-1 labels instead of the real output keeps a fixed
fraction of the true coefficient. Flipping each label with probability
nu multiplies that fraction by (1 - 2 nu).

Run: python3 demos/04_survival_and_noise.py   (about 15 s)
"""

import math

import numpy as np

from overparam import BiLevel, SignalSpec, build_spectrum, sample_dataset
from overparam.metrics import survival
from overparam.solvers import min_norm_interpolate
from overparam.theory import predicted_scalings

spec = BiLevel(256, 1.5, 0.1, 0.5)
spectrum = build_spectrum(spec)

for nu in (0.0, 0.1, 0.25, 0.4):
    su = []
    for seed in range(10):
        # same seed, same features: only the flipped labels differ
        data = sample_dataset(spec, SignalSpec(t=1, nu_star=nu), spec.n, seed)
        su.append(survival(min_norm_interpolate(data.phi, data.y).alpha, spectrum, 1))
    limit = predicted_scalings(spec.p, spec.q, spec.r, nu).su_limit
    print(f"nu={nu:.2f}  median SU {np.median(su):.3f}   large-n limit {limit:.3f}")

print(f"\nsqrt(2/pi) = {math.sqrt(2 / math.pi):.4f}")
