"""Classical interpolants used as comparison methods.

Cubic spline and PCHIP come from :mod:`scipy.interpolate`. The polynomial fit
is a least-squares solve on a normalized time axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import linalg
from .errors import NumericalFailure, RangeError
from .koopman import ReconstructionSeries
from .sampling import SampleSet

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class BaselineMethod:
    kind: Literal["spline", "pchip", "polyfit"]
    degree: int = 12  # polyfit only
    bc_type: str = "natural"  # spline only; "not-a-knot" also accepted

    def __post_init__(self):
        if self.kind not in ("spline", "pchip", "polyfit"):
            raise ValueError(f"unknown baseline {self.kind!r}")
        if self.kind == "polyfit" and self.degree < 1:
            raise ValueError("polyfit degree must be >= 1")

    @property
    def tag(self) -> str:
        return f"polyfit{self.degree}" if self.kind == "polyfit" else self.kind

    @classmethod
    def parse(cls, tag: str) -> "BaselineMethod":
        """``spline``, ``pchip``, ``polyfit`` or ``polyfit<degree>``."""
        if tag.startswith("polyfit"):
            rest = tag[len("polyfit"):]
            return cls("polyfit", int(rest) if rest else 12)
        return cls(tag)


CUBIC_SPLINE = BaselineMethod("spline")
PCHIP = BaselineMethod("pchip")
POLYFIT12 = BaselineMethod("polyfit", 12)


def _check_range(ss: SampleSet, times: np.ndarray):
    lo, hi = ss.start_time, ss.end_time
    tol = _EDGE_TOL * max(1.0, abs(hi))
    if np.any(times < lo - tol) or np.any(times > hi + tol):
        raise RangeError(f"interpolation times must lie in [{lo}, {hi}]")


def polyfit_coefficients(t, y, degree: int):
    """Least-squares polynomial on ``u = (t - mean) / rms``; returns (coef, mean, rms).

    ``coef`` is in ascending powers of ``u``.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if degree >= t.size:
        raise ValueError(f"degree {degree} needs more than {t.size} samples")
    mu = float(t.mean())
    rms = float(np.sqrt(np.mean((t - mu) ** 2))) or 1.0
    V = np.vander((t - mu) / rms, degree + 1, increasing=True)
    U, s, W = linalg.svd(V)
    r = linalg.numerical_rank(s, max(V.shape) * linalg.EPS)
    if r < degree + 1:
        raise NumericalFailure(f"polynomial design matrix is rank deficient ({r} < {degree + 1})")
    coef = W @ ((U.T @ y) / s)
    return coef, mu, rms


def baseline_reconstruct(method: BaselineMethod, ss: SampleSet, times) -> ReconstructionSeries:
    times = np.asarray(times, dtype=float).reshape(-1)
    t, y = ss.times, ss.values
    if method.kind == "polyfit":
        coef, mu, rms = polyfit_coefficients(t, y, method.degree)
        vals = np.polynomial.polynomial.polyval((times - mu) / rms, coef)
        return ReconstructionSeries(times, vals, method.tag)
    _check_range(ss, times)
    tt = np.clip(times, ss.start_time, ss.end_time)
    if method.kind == "spline":
        f = CubicSpline(t, y, bc_type=method.bc_type)
    else:
        f = PchipInterpolator(t, y)
    return ReconstructionSeries(times, f(tt), method.tag)
