"""Support-vector fraction across the bi-level family.

Raising q moves weight from the few favored directions to the many
unfavored ones; the data look more isotropic and every point ends up on
the margin.

Run: python3 demos/02_support_fraction_transition.py   (about 20 s)
"""

import numpy as np

from overparam import BiLevel, SignalSpec, sample_dataset
from overparam.solvers import solve_svm_hard_margin, support_vector_fraction

n, p, r = 529, 1.5, 0.5
d, s = BiLevel(n, p, 0.5, r).dims
print(f"n={n}, d={d}, favored directions s={s}")

for q in (0.1, 0.3, 0.5, 0.7, 0.9):
    spec = BiLevel(n, p, q, r)
    fracs = []
    for seed in range(4):
        data = sample_dataset(spec, SignalSpec(), n, seed)
        svm, dual = solve_svm_hard_margin(data.phi, data.y)
        fracs.append(support_vector_fraction(data.phi, data.y, svm.alpha))
    bar = "#" * int(round(40 * np.median(fracs)))
    print(f"q={q:.1f}  {np.median(fracs):.3f}  {bar}")
