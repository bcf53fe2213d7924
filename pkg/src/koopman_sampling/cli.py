"""``koopman-sampling`` command-line interface.

Exit codes: 0 success, 2 usage or invalid input, 3 numerical failure,
4 sampling period at the aliasing boundary.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineMethod, baseline_reconstruct
from .closed_form import (
    ExpSincConfig,
    PolyExpStructure,
    exp_sinc_reconstruct,
    poly_exp_closed_form,
    sinc_reconstruct,
    truncation_bound,
)
from .errors import AliasingBoundaryError, InconsistencyError, KoopmanSamplingError, NumericalFailure
from .experiments import SUITES, TABLE_DIMS, run_figure_suite, series_csv
from .koopman import KoopmanModel, estimate_spectrum, fit, reconstruct, reconstruct_windowed
from .sampling import SampleSet, add_white_noise, sample
from .signals import PRESETS, CardinalSine, koopman_spectrum, load_signal, signal_to_dict

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ALIASING = 0, 2, 3, 4
METHODS = ("kr", "kr-windowed", "spline", "pchip", "polyfit12", "sinc", "exp-sinc", "poly-exp")


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# --- input helpers -------------------------------------------------------


def _samples_from_args(args) -> tuple[SampleSet, object]:
    """Return (samples, signal or None) from --samples or --signal/--ts/--n."""
    if getattr(args, "samples", None):
        return SampleSet.load(args.samples), (load_signal(args.signal) if args.signal else None)
    if not args.signal or args.ts is None:
        raise UsageError("give --samples FILE or --signal with --ts")
    s = load_signal(args.signal)
    ss = sample(s, args.ts, args.n, args.start)
    if args.snr_db is not None:
        ss = add_white_noise(ss, args.snr_db, args.seed)
    return ss, s


# --- subcommands ---------------------------------------------------------


def cmd_generate(args):
    s = load_signal(args.signal)
    ts = args.ts if args.ts is not None else 0.3
    t1 = args.t_end if args.t_end is not None else (args.n - 1) * ts
    t = np.linspace(args.start, t1, args.grid)
    g = s(t)
    if args.format == "json":
        text = _dump({"signal": signal_to_dict(s), "t": t.tolist(), "value": g.tolist()})
    else:
        text = "t,value\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(t, g))
    _emit(text, args.out)


def cmd_sample(args):
    ss, _ = _samples_from_args(args)
    _emit(ss.to_json() if args.format == "json" else ss.to_csv(), args.out)


def cmd_identify(args):
    ss, s = _samples_from_args(args)
    dim = args.dim if args.dim is not None else TABLE_DIMS.get(args.signal or "")
    model = fit(ss, dim, boundary=args.boundary)
    text = json.dumps(model.to_dict())
    _emit(text, args.out)


def _kr_model(args, ss) -> KoopmanModel:
    if args.model:
        return KoopmanModel.load(args.model)
    dim = args.dim if args.dim is not None else TABLE_DIMS.get(args.signal or "")
    noisy = args.method == "kr-windowed" and ss.snr_db is not None
    return fit(ss, dim, boundary=args.boundary or noisy)


def _reconstruct(args, ss, s, times, model=None):
    m = args.method
    if m == "kr":
        return reconstruct(model or _kr_model(args, ss), times)
    if m == "kr-windowed":
        return reconstruct_windowed(model or _kr_model(args, ss), ss, times)
    if m == "sinc":
        return sinc_reconstruct(ss, times)
    if m == "exp-sinc":
        if args.alpha is None:
            raise UsageError("exp-sinc needs --alpha")
        return exp_sinc_reconstruct(ss, args.alpha, times)
    if m == "poly-exp":
        if s is None or isinstance(s, CardinalSine):
            raise UsageError("poly-exp needs a term-sum --signal")
        return poly_exp_closed_form(PolyExpStructure.from_signal(s), ss, times)
    return baseline_reconstruct(BaselineMethod.parse(m), ss, times)


def cmd_reconstruct(args):
    ss, s = _samples_from_args(args)
    t0 = ss.start_time
    model = None
    if args.method == "kr-windowed":
        model = _kr_model(args, ss)
        times = np.linspace(t0, t0 + (ss.N - model.M) * ss.period, args.grid, endpoint=False)
    else:
        times = np.linspace(t0, ss.end_time, args.grid)
    series = _reconstruct(args, ss, s, times, model)
    truth = s(times) if s is not None else np.full(times.shape, np.nan)
    if args.format == "json":
        text = _dump(
            {
                "method": series.method,
                "t": times.tolist(),
                "truth": truth.tolist(),
                "reconstruction": series.values.tolist(),
                "max_imag_residual": series.max_imag_residual,
            }
        )
    else:
        text = series_csv(times, truth, series.values)
    _emit(text, args.out)


def cmd_spectrum(args):
    if args.model:
        rep = estimate_spectrum(KoopmanModel.load(args.model))
    elif args.samples or args.from_data:
        ss, _ = _samples_from_args(args)
        dim = args.dim if args.dim is not None else TABLE_DIMS.get(args.signal or "")
        rep = estimate_spectrum(fit(ss, dim))
    else:
        if not args.signal:
            raise UsageError("give --signal, --samples or --model")
        rep = koopman_spectrum(load_signal(args.signal), args.ts)
    if args.format == "json":
        _emit(_dump(rep.to_dict()), args.out)
        return
    lines = ["eigenvalues:"]
    lines += [f"  {z.real:.17g} {z.imag:+.17g}i" for z in rep.eigenvalues]
    lines.append(f"max_abs_imag: {rep.max_abs_imag:.17g}")
    lines.append(f"critical_period: {rep.critical_period!r}")
    if rep.sampling_period is not None:
        lines.append(f"sampling_period: {rep.sampling_period!r}")
        lines.append(f"verdict: {rep.verdict.value}")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_bound(args):
    cfg = ExpSincConfig(args.alpha, args.ts, args.c, args.n1, args.n2)
    val = truncation_bound(cfg, args.energy, args.t)
    if args.format == "json":
        _emit(_dump({"bound": val}), args.out)
    else:
        _emit(f"{val!r}\n", args.out)


def cmd_experiment(args):
    out = args.out or f"results/{args.suite}"
    rep = run_figure_suite(
        args.suite,
        args.signal or None,
        out,
        plots=not args.no_plots,
        N=args.n,
        seed=args.seed,
        trials=args.trials,
        grid_points=args.grid,
        dim=args.dim,
    )
    if args.format == "json":
        Path(out, "report.json").write_text(rep.to_json())
    failed = [r for r in rep.rows if r["status"] != "ok"]
    sys.stderr.write(f"{len(rep.rows)} cells written to {out}/report.csv ({len(failed)} failed)\n")


# --- parser ----------------------------------------------------------------


def _add_common(p, *, signal=True, sampling=True):
    if signal:
        p.add_argument("--signal", help="preset name (" + ", ".join(PRESETS) + ") or JSON file")
    if sampling:
        p.add_argument("--samples", help="SampleSet CSV or JSON file (instead of --signal sampling)")
        p.add_argument("--ts", type=float, help="sampling period [s]")
        p.add_argument("--n", type=int, default=20, help="number of samples")
        p.add_argument("--start", type=float, default=0.0, help="time of the first sample [s]")
        p.add_argument("--snr-db", type=float, dest="snr_db", help="add white noise at this SNR [dB]")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--dim", type=int, help="embedding dimension M")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="koopman-sampling", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="evaluate a signal on a dense grid")
    _add_common(p, sampling=False)
    p.add_argument("--ts", type=float)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="uniformly sample a signal, optionally with noise")
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("identify", help="identify a Koopman model and write it as JSON")
    _add_common(p)
    p.add_argument("--boundary", action="store_true", help="accept negative real DT eigenvalues")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("reconstruct", help="reconstruct a signal from samples")
    _add_common(p)
    p.add_argument("--method", choices=METHODS, default="kr")
    p.add_argument("--model", help="model JSON from `identify` (kr methods)")
    p.add_argument("--alpha", type=float, help="growth rate for exp-sinc")
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--boundary", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("spectrum", help="Koopman spectrum, critical period and aliasing verdict")
    _add_common(p)
    p.add_argument("--model", help="model JSON from `identify`")
    p.add_argument("--from-data", action="store_true", dest="from_data", help="identify from samples of --signal")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound", help="exp-sinc truncation error bound")
    _add_common(p, signal=False, sampling=False)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--ts", type=float, required=True)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("experiment", help="run an experiment suite and write report.csv and plots")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--signal", action="append", help="restrict to these signals (repeatable)")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--out", help="output directory (default: results/<suite>)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-plots", action="store_true", dest="no_plots")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        ap.error(str(exc))
    except AliasingBoundaryError as exc:
        sys.stderr.write(f"aliasing boundary: {exc}\n")
        return EXIT_ALIASING
    except (NumericalFailure, InconsistencyError) as exc:
        sys.stderr.write(f"numerical failure ({type(exc).__name__}): {exc}\n")
        return EXIT_NUMERIC
    except (KoopmanSamplingError, ValueError, FileNotFoundError, KeyError) as exc:
        sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
