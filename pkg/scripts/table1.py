#!/usr/bin/env python3
"""Critical periods and minimal embedding dimensions of the preset signals."""
import math

from koopman_sampling.experiments import TABLE_DIMS
from koopman_sampling.sampling import sample, select_dimension
from koopman_sampling.signals import PRESETS, koopman_spectrum, min_space_dimension

print(f"{'signal':8s} {'T_gamma':>20s} {'analytic M':>10s} {'Hankel M':>9s} {'table M':>8s}")
for name, s in PRESETS.items():
    rep = koopman_spectrum(s)
    est = select_dimension(sample(s, 0.3, 40), K_max=12, threshold=1e-10)
    print(f"{name:8s} {rep.critical_period!r:>20s} {min_space_dimension(s):>10d} {est.dim:>9d} {TABLE_DIMS[name]:>8d}")
print(f"pi/4 = {math.pi / 4!r}")
