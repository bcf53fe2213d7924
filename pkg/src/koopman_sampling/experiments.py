"""Experiment grids: reconstruction error versus method, sampling period and noise level.

Three suites are predefined:

``fig2to5``
    KR against spline, PCHIP and a degree-12 polynomial fit at
    ``T_s`` in {0.2, 0.4, 0.6}.
``fig6to9``
    KR just below and just above the critical period, ``T_s`` in {0.78, 0.79}.
``fig10to13``
    Windowed KR on noisy samples, ``T_s = 0.3``, SNR in {30, 20, 10} dB.

Every cell yields one report row. A failing cell is recorded with its error
kind in ``status`` and the run carries on.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineMethod, baseline_reconstruct
from .errors import KoopmanSamplingError
from .koopman import estimate_spectrum, identify, reconstruct, reconstruct_windowed
from .sampling import SampleSet, add_white_noise, build_hankel, noise_std, sample, select_dimension
from .signals import PRESETS, Signal, koopman_spectrum, load_signal

TABLE_DIMS = {"paper-a": 6, "paper-b": 4, "paper-c": 6, "paper-d": 8}
SUITES = ("fig2to5", "fig6to9", "fig10to13")
REPORT_FIELDS = (
    "signal",
    "method",
    "T_s",
    "snr_db",
    "trial",
    "dim",
    "max_error",
    "rms_error",
    "sample_interp_error",
    "noise_rms",
    "aliasing_verdict",
    "analytic_verdict",
    "status",
)


@dataclass(frozen=True)
class ExperimentSpec:
    signal: str
    periods: tuple[float, ...]
    N: int = 20
    dim: int | None = None
    methods: tuple[str, ...] = ("kr",)
    snr_db: tuple[float, ...] | None = None
    trials: int = 1
    seed: int = 0
    grid_points: int = 1000
    output_dir: str | None = None

    def __post_init__(self):
        if self.grid_points < 100:
            raise ValueError("grid_points must be >= 100")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.snr_db is not None:
            object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))


@dataclass
class Cell:
    """One reconstruction run with its data, for plotting and series output."""

    key: str
    row: dict
    times: np.ndarray | None = None
    truth: np.ndarray | None = None
    recon: np.ndarray | None = None
    samples: SampleSet | None = None


@dataclass
class ExperimentReport:
    rows: list[dict]
    provenance: dict = field(default_factory=dict)

    def sorted_rows(self) -> list[dict]:
        def key(r):
            snr = r["snr_db"]
            return (r["signal"], r["method"], r["T_s"], math.inf if snr is None else -snr, r["trial"])

        return sorted(self.rows, key=key)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in self.sorted_rows():
            w.writerow([_fmt(r[f]) for f in REPORT_FIELDS])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_json(self) -> str:
        rows = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()} for r in self.sorted_rows()]
        return json.dumps({"rows": rows, "provenance": self.provenance}, indent=2, sort_keys=True)

    def find(self, **match) -> list[dict]:
        return [r for r in self.rows if all(r.get(k) == v for k, v in match.items())]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def cell_key(signal: str, method: str, T_s: float, snr_db: float | None = None, trial: int = 0) -> str:
    key = f"{signal}_{method}_T{T_s:g}"
    if snr_db is not None:
        key += f"_snr{snr_db:g}_trial{trial}"
    return key.replace("/", "_")


def _signal_name(signal: str) -> str:
    return signal if signal in PRESETS else Path(signal).stem


def _errors(recon: np.ndarray, truth: np.ndarray) -> tuple[float, float]:
    d = np.abs(recon - truth)
    return float(d.max()), float(np.sqrt(np.mean(d**2)))


def run_cell(
    s: Signal,
    name: str,
    method: str,
    T_s: float,
    N: int,
    *,
    dim: int | None = None,
    snr_db: float | None = None,
    trial: int = 0,
    seed: int = 0,
    grid_points: int = 1000,
) -> Cell:
    """Sample, reconstruct with ``method`` and score against the exact signal.

    With ``snr_db`` set the samples are noisy, the KR model is identified with
    boundary modes allowed and the windowed reconstruction is used; the grid
    then covers ``[0, (N-M) T_s)``.
    """
    row = dict.fromkeys(REPORT_FIELDS)
    row.update(signal=name, method=method, T_s=float(T_s), snr_db=snr_db, trial=int(trial), status="ok")
    key = cell_key(name, method, T_s, snr_db, trial)
    try:
        row["analytic_verdict"] = koopman_spectrum(s, T_s).verdict.value
    except KoopmanSamplingError:
        row["analytic_verdict"] = ""
    cell = Cell(key, row)
    try:
        clean = sample(s, T_s, N)
        ss = clean
        if snr_db is not None:
            ss = add_white_noise(clean, snr_db, seed + trial)
            row["noise_rms"] = noise_std(clean, snr_db)
        cell.samples = ss
        if method == "kr":
            M = dim if dim is not None else select_dimension(ss, K_max=min(12, N // 2)).dim
            row["dim"] = M
            noisy = snr_db is not None
            model = identify(build_hankel(ss, M), T_s, boundary=noisy)
            row["aliasing_verdict"] = estimate_spectrum(model).verdict.value
            if noisy:
                times = np.linspace(0.0, (N - M) * T_s, grid_points, endpoint=False)
                recon = reconstruct_windowed(model, ss, times).values
                at = reconstruct_windowed(model, ss, ss.times[: N - M]).values
                row["sample_interp_error"] = float(np.max(np.abs(at - ss.values[: N - M])))
            else:
                times = np.linspace(0.0, (N - 1) * T_s, grid_points)
                recon = reconstruct(model, times).values
                at = reconstruct(model, ss.times).values
                row["sample_interp_error"] = float(np.max(np.abs(at - ss.values)))
        else:
            bm = BaselineMethod.parse(method)
            row["aliasing_verdict"] = row["analytic_verdict"]
            times = np.linspace(0.0, (N - 1) * T_s, grid_points)
            recon = baseline_reconstruct(bm, ss, times).values
            at = baseline_reconstruct(bm, ss, ss.times).values
            row["sample_interp_error"] = float(np.max(np.abs(at - ss.values)))
        truth = np.asarray(s(times), dtype=float)
        row["max_error"], row["rms_error"] = _errors(recon, truth)
        cell.times, cell.truth, cell.recon = times, truth, recon
    except (KoopmanSamplingError, ArithmeticError, ValueError) as exc:
        row["status"] = type(exc).__name__
        for f in ("max_error", "rms_error", "sample_interp_error"):
            row[f] = math.nan
    return cell


def suite_specs(which: str, signals=None, **overrides) -> list[ExperimentSpec]:
    """Default grid for a named suite, one spec per signal."""
    if which not in SUITES:
        raise ValueError(f"unknown suite {which!r}; choose from {SUITES}")
    signals = list(signals) if signals else list(PRESETS)
    base = {
        "fig2to5": dict(periods=(0.2, 0.4, 0.6), methods=("kr", "spline", "pchip", "polyfit12")),
        "fig6to9": dict(periods=(0.78, 0.79), methods=("kr",)),
        "fig10to13": dict(periods=(0.3,), methods=("kr",), snr_db=(30.0, 20.0, 10.0)),
    }[which]
    specs = []
    for sig in signals:
        kw = dict(base, signal=sig, dim=TABLE_DIMS.get(sig))
        kw.update({k: v for k, v in overrides.items() if v is not None})
        specs.append(ExperimentSpec(**kw))
    return specs


def run_spec(spec: ExperimentSpec) -> list[Cell]:
    s = load_signal(spec.signal)
    name = _signal_name(spec.signal)
    cells = []
    for T in spec.periods:
        for method in spec.methods:
            for snr in spec.snr_db or (None,):
                for trial in range(spec.trials if snr is not None else 1):
                    cells.append(
                        run_cell(
                            s, name, method, T, spec.N,
                            dim=spec.dim, snr_db=snr, trial=trial, seed=spec.seed,
                            grid_points=spec.grid_points,
                        )
                    )
    return cells


def run_figure_suite(which: str, signals=None, output_dir=None, *, plots: bool = True, **overrides) -> ExperimentReport:
    """Run a named suite; with ``output_dir`` also write report, series CSVs and SVG plots."""
    specs = suite_specs(which, signals, **overrides)
    cells = [c for spec in specs for c in run_spec(spec)]
    report = ExperimentReport(
        [c.row for c in cells],
        {
            "suite": which,
            "specs": [asdict(s) for s in specs],
            "package_version": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    )
    if output_dir is not None:
        write_outputs(report, cells, output_dir, plots=plots)
    return report


def series_csv(times, truth, recon) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "truth", "reconstruction", "abs_error"])
    for t, g, r in zip(times, truth, recon):
        w.writerow([f"{t:.17g}", f"{g:.17g}", f"{r:.17g}", f"{abs(r - g):.17g}"])
    return buf.getvalue()


def write_outputs(report: ExperimentReport, cells: list[Cell], output_dir, *, plots: bool = True):
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.to_csv(out / "report.csv")
    (out / "provenance.json").write_text(json.dumps(report.provenance, indent=2, sort_keys=True))
    for c in cells:
        if c.times is None:
            continue
        (out / f"series_{c.key}.csv").write_text(series_csv(c.times, c.truth, c.recon))
        c.samples.to_csv(out / f"samples_{c.key}.csv")
        if plots:
            from .plotting import overlay_svg

            overlay_svg(out / f"{c.key}.svg", c.times, c.truth, c.recon, c.samples, title=c.key)
