#!/usr/bin/env python3
"""Distribution of windowed KR error over many noise seeds at T_s = 0.3."""
import argparse

import numpy as np

from koopman_sampling.experiments import run_figure_suite

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--trials", type=int, default=50)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()
rep = run_figure_suite("fig10to13", trials=args.trials, seed=args.seed)
for name in sorted({r["signal"] for r in rep.rows}):
    for snr in (30.0, 20.0, 10.0):
        rows = rep.find(signal=name, snr_db=snr)
        ratio = np.array([r["rms_error"] / r["noise_rms"] for r in rows if r["status"] == "ok"])
        print(f"{name} {snr:4g} dB  ok={ratio.size}/{len(rows)}  rms/noise median={np.median(ratio):.2f} p90={np.quantile(ratio, 0.9):.2f}")
