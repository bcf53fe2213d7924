#!/usr/bin/env python3
"""Run every experiment suite and write reports, series CSVs and SVG overlays."""
import argparse
import sys
from pathlib import Path

from koopman_sampling.experiments import SUITES, run_figure_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    for suite in SUITES:
        out = Path(args.out) / suite
        rep = run_figure_suite(suite, None, out, plots=not args.no_plots, seed=args.seed, trials=args.trials)
        bad = sum(r["status"] != "ok" for r in rep.rows)
        print(f"{suite}: {len(rep.rows)} cells, {bad} failed -> {out}")
        for r in rep.sorted_rows():
            snr = "" if r["snr_db"] is None else f" snr={r['snr_db']:g}"
            print(f"  {r['signal']:8s} {r['method']:9s} T={r['T_s']:<5g}{snr} max={r['max_error']:.3g} status={r['status']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
