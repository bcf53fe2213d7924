"""Uniform sampling, noise injection and the time-delay (Hankel) embedding."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import linalg
from .errors import InsufficientDataError, UndefinedSNRError
from .signals import Signal


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray
    period: float
    start_time: float = 0.0
    snr_db: float | None = None
    seed: int | None = None

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size < 2:
            raise InsufficientDataError("a SampleSet needs at least 2 values")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        if not self.period > 0:
            raise ValueError("sampling period must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "start_time", float(self.start_time))

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            np.array_equal(self.values, other.values)
            and (self.period, self.start_time, self.snr_db, self.seed)
            == (other.period, other.start_time, other.snr_db, other.seed)
        )

    __hash__ = None

    @property
    def N(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.period * np.arange(self.N)

    @property
    def end_time(self) -> float:
        return self.start_time + self.period * (self.N - 1)

    # serialization ------------------------------------------------------
    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        meta = f"# period={self.period!r} start_time={self.start_time!r}"
        if self.snr_db is not None:
            meta += f" snr_db={self.snr_db!r} seed={self.seed!r}"
        buf.write(meta + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.times, self.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "SampleSet":
        """Read CSV text or a path written by :meth:`to_csv` (the comment line is optional)."""
        text = source if "\n" in str(source) else Path(source).read_text()
        lines = text.splitlines()
        meta = {}
        if lines and lines[0].startswith("#"):
            for item in lines[0][1:].split():
                k, _, v = item.partition("=")
                meta[k] = v
            lines = lines[1:]
        rows = list(csv.DictReader(lines))
        t = np.array([float(r["t"]) for r in rows])
        vals = [float(r["value"]) for r in rows]
        period = float(meta["period"]) if "period" in meta else float((t[-1] - t[0]) / (len(t) - 1))
        start = float(meta["start_time"]) if "start_time" in meta else float(t[0])
        snr = meta.get("snr_db")
        seed = meta.get("seed")
        return cls(
            vals,
            period,
            start,
            None if snr in (None, "None") else float(snr),
            None if seed in (None, "None") else int(seed),
        )

    def to_json(self, path=None) -> str:
        text = json.dumps(
            {
                "period": self.period,
                "start_time": self.start_time,
                "snr_db": self.snr_db,
                "seed": self.seed,
                "values": self.values.tolist(),
            }
        )
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_json(cls, source) -> "SampleSet":
        text = source if str(source).lstrip().startswith("{") else Path(source).read_text()
        d = json.loads(text)
        return cls(d["values"], d["period"], d.get("start_time", 0.0), d.get("snr_db"), d.get("seed"))

    @classmethod
    def load(cls, path) -> "SampleSet":
        path = Path(path)
        return cls.from_json(path) if path.suffix == ".json" else cls.from_csv(path)


def sample(s: Signal, T_s: float, N: int, start: float = 0.0) -> SampleSet:
    """``values[k] = s(start + k*T_s)`` for ``k = 0..N-1``."""
    if not T_s > 0:
        raise ValueError("T_s must be positive")
    if N < 2:
        raise InsufficientDataError("need N >= 2 samples")
    t = start + T_s * np.arange(N)
    return SampleSet(np.asarray(s(t), dtype=float), T_s, start)


def add_white_noise(samples: SampleSet, snr_db: float, seed: int) -> SampleSet:
    """Add i.i.d. Gaussian noise so that mean(clean**2) / var(noise) = 10**(snr_db/10).

    ``snr_db = inf`` is the no-noise sentinel and returns ``samples`` unchanged.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return samples
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite or +inf")
    power = float(np.mean(samples.values**2))
    if power == 0.0:
        raise UndefinedSNRError("SNR is undefined for an all-zero signal")
    sd = math.sqrt(power / 10 ** (snr_db / 10))
    rng = np.random.default_rng(seed)
    noisy = samples.values + rng.normal(0.0, sd, samples.N)
    return replace(samples, values=noisy, snr_db=float(snr_db), seed=int(seed))


def noise_std(samples: SampleSet, snr_db: float) -> float:
    """Standard deviation :func:`add_white_noise` uses for ``samples`` (clean) at ``snr_db``."""
    return math.sqrt(float(np.mean(samples.values**2)) / 10 ** (snr_db / 10))


# --- Hankel embedding ----------------------------------------------------


@dataclass(frozen=True)
class HankelPair:
    X: np.ndarray
    Y: np.ndarray
    M: int
    N: int


def _values(ss) -> np.ndarray:
    return ss.values if isinstance(ss, SampleSet) else np.asarray(ss, dtype=float)


def build_hankel(ss, M: int) -> HankelPair:
    """Shifted Hankel matrices ``X[i, j] = v[i+j]`` and ``Y[i, j] = v[i+j+1]``, shape (N-M, M)."""
    v = _values(ss)
    N = v.size
    if M < 1:
        raise ValueError("M must be >= 1")
    if N < 2 * M:
        raise InsufficientDataError(f"need N >= 2M samples (N={N}, M={M})")
    win = np.lib.stride_tricks.sliding_window_view(v, M + 1)[: N - M]
    X = _frozen(win[:, :M])
    Y = _frozen(win[:, 1:])
    return HankelPair(X, Y, M, N)


@dataclass(frozen=True)
class DimensionEstimate:
    dim: int
    singular_values: np.ndarray
    saturated: bool  # count hit K_max: the embedding may be too small
    degenerate: bool  # all-zero samples

    def __int__(self):
        return self.dim


def select_dimension(ss, K_max: int = 12, threshold: float = 1e-10, absolute: bool = False) -> DimensionEstimate:
    """Count singular values of the (N-K_max) x K_max Hankel matrix above the threshold.

    The threshold is relative to the largest singular value unless ``absolute``.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    v = _values(ss)
    X1 = build_hankel(v, K_max).X
    s = linalg.svd(X1)[1]
    if s[0] == 0.0:
        warnings.warn("all-zero samples: embedding dimension is 0", RuntimeWarning, stacklevel=2)
        return DimensionEstimate(0, s, False, True)
    cut = threshold if absolute else threshold * s[0]
    dim = int(np.count_nonzero(s > cut))
    saturated = dim == K_max
    if saturated:
        warnings.warn(
            f"all {K_max} singular values exceed the threshold; increase K_max", RuntimeWarning, stacklevel=2
        )
    return DimensionEstimate(dim, s, saturated, False)
