"""Parametric continuous-time signals and their Koopman spectra.

Two families are supported:

* :class:`TermSum` -- finite sums of ``a * t**l * exp(sigma*t) * cos(omega*t + phi)``.
  These span a finite-dimensional Koopman-invariant space whose generator
  spectrum is the set ``sigma +/- i*omega``.
* :class:`CardinalSine` -- ``scale * exp(alpha*t) * sin(c*t)/(c*t)``, a band-limited
  signal with exponential envelope. Its spectrum is the vertical segment
  ``alpha + i[-c, c]``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UnsupportedKindError

MAX_DEGREE = 8
CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class SignalTerm:
    a: float
    l: int = 0
    sigma: float = 0.0
    omega: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.sigma, self.omega, self.phi)):
            raise ValueError("signal term fields must be finite")
        if self.a == 0:
            raise ValueError("amplitude must be nonzero")
        if int(self.l) != self.l or not 0 <= self.l <= MAX_DEGREE:
            raise ValueError(f"degree must be an integer in [0, {MAX_DEGREE}]")
        object.__setattr__(self, "l", int(self.l))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.a * t**self.l * np.exp(self.sigma * t) * np.cos(self.omega * t + self.phi)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        env = np.exp(self.sigma * t)
        arg = self.omega * t + self.phi
        poly_d = self.l * t ** (self.l - 1) if self.l else 0.0
        tl = t**self.l
        return self.a * env * (
            (poly_d + self.sigma * tl) * np.cos(arg) - self.omega * tl * np.sin(arg)
        )


class Signal:
    label: str

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class TermSum(Signal):
    terms: tuple[SignalTerm, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("TermSum needs at least one term")

    def __call__(self, t):
        return sum(term(t) for term in self.terms)

    def derivative(self, t):
        return sum(term.derivative(t) for term in self.terms)


@dataclass(frozen=True)
class CardinalSine(Signal):
    alpha: float
    c: float
    scale: float = 1.0
    label: str = ""

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("CardinalSine needs c > 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        # np.sinc(x) = sin(pi x)/(pi x) with the removable point handled
        return self.scale * np.exp(self.alpha * t) * np.sinc(self.c * t / np.pi)

    @property
    def energy(self) -> float:
        """L2 energy of the band-limited factor ``scale*sin(ct)/(ct)``."""
        return math.pi * self.scale**2 / self.c


def evaluate(s: Signal, t):
    """Exact value(s) of ``s`` at ``t``; returns a float for scalar input."""
    out = s(t)
    return float(out) if np.ndim(out) == 0 else out


# --- spectrum -------------------------------------------------------------


class Verdict(str, enum.Enum):
    NO_ALIASING = "no_aliasing"
    ALIASING = "aliasing"
    CRITICAL = "critical"


def critical_period(max_abs_imag: float) -> float:
    return math.pi / max_abs_imag if max_abs_imag > 0 else math.inf


def aliasing_verdict(T_s: float, T_gamma: float) -> Verdict:
    if abs(T_s - T_gamma) <= CRITICAL_TOL:
        return Verdict.CRITICAL
    return Verdict.NO_ALIASING if T_s < T_gamma else Verdict.ALIASING


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    max_abs_imag: float
    critical_period: float
    sampling_period: float | None = None
    verdict: Verdict | None = None
    continuous: bool = False  # eigenvalues are the endpoints of a vertical band

    @classmethod
    def from_eigenvalues(cls, eigenvalues, T_s=None, *, continuous=False, critical=False):
        w = np.asarray(eigenvalues, dtype=complex)
        mai = float(np.max(np.abs(w.imag), initial=0.0))
        Tg = critical_period(mai)
        verdict = None
        if T_s is not None:
            verdict = Verdict.CRITICAL if critical else aliasing_verdict(T_s, Tg)
        return cls(w, mai, Tg, T_s, verdict, continuous)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "max_abs_imag": self.max_abs_imag,
            "critical_period": self.critical_period,
            "sampling_period": self.sampling_period,
            "verdict": self.verdict.value if self.verdict else None,
            "continuous": self.continuous,
        }


def exponential_form(s: TermSum, tol: float = 1e-14) -> dict[complex, dict[int, complex]]:
    """Rewrite a real term sum as ``sum_k sum_l coef[k][l] * t**l * exp(lambda_k t)``.

    Keys are the distinct complex rates; cosine terms contribute a conjugate pair.
    Coefficients that cancel to below ``tol`` (relative) are dropped.
    """
    if not isinstance(s, TermSum):
        raise UnsupportedKindError(f"{type(s).__name__} has no finite exponential form")
    acc: dict[complex, dict[int, complex]] = {}

    def add(lam, l, coef):
        key = complex(round(lam.real, 12), round(lam.imag, 12))
        acc.setdefault(key, {})
        acc[key][l] = acc[key].get(l, 0) + coef

    for term in s.terms:
        if term.omega == 0:
            add(complex(term.sigma, 0.0), term.l, term.a * math.cos(term.phi) + 0j)
        else:
            half = 0.5 * term.a
            add(complex(term.sigma, term.omega), term.l, half * complex(math.cos(term.phi), math.sin(term.phi)))
            add(complex(term.sigma, -term.omega), term.l, half * complex(math.cos(term.phi), -math.sin(term.phi)))
    scale = max((abs(c) for d in acc.values() for c in d.values()), default=0.0)
    out = {}
    for lam, coefs in acc.items():
        kept = {l: c for l, c in coefs.items() if abs(c) > tol * scale}
        if kept:
            out[lam] = dict(sorted(kept.items()))
    return out


def koopman_spectrum(s: Signal, T_s: float | None = None) -> SpectrumReport:
    """Analytic generator spectrum of ``s`` with the critical period ``pi / max|Im|``."""
    if isinstance(s, CardinalSine):
        ends = [complex(s.alpha, -s.c), complex(s.alpha, s.c)]
        return SpectrumReport.from_eigenvalues(ends, T_s, continuous=True)
    lams = sorted(exponential_form(s), key=lambda z: (z.real, z.imag))
    return SpectrumReport.from_eigenvalues(lams, T_s)


def min_space_dimension(s: Signal) -> int:
    """Dimension of the span of all time shifts of ``s``.

    Each distinct rate contributes ``1 + (highest power of t)``.
    """
    if not isinstance(s, TermSum):
        raise UnsupportedKindError("only TermSum signals span a finite-dimensional space")
    return sum(max(coefs) + 1 for coefs in exponential_form(s).values())


# --- presets and serialization -------------------------------------------

PI = math.pi

PRESETS: dict[str, Signal] = {
    "paper-a": TermSum(
        (
            SignalTerm(-1.0, omega=2.0),
            SignalTerm(1.0, omega=0.5, phi=PI / 2),
            SignalTerm(1.5, omega=4.0, phi=PI / 3),
        ),
        label="paper-a",
    ),
    "paper-b": TermSum(
        (
            SignalTerm(1.0, sigma=-1.0, omega=4.0, phi=PI / 6),
            SignalTerm(1.0, sigma=-0.5, omega=2.0),
        ),
        label="paper-b",
    ),
    "paper-c": TermSum((SignalTerm(1.0, l=1, omega=4.0, phi=PI / 3),), label="paper-c"),
    "paper-d": TermSum((SignalTerm(1.0, l=1, sigma=-1.0, omega=4.0, phi=PI / 3),), label="paper-d"),
}


def signal_from_dict(d: dict) -> Signal:
    kind = d.get("kind", "term_sum")
    label = d.get("label", "")
    if kind == "term_sum":
        terms = [
            SignalTerm(
                float(t["a"]),
                int(t.get("l", 0)),
                float(t.get("sigma", 0.0)),
                float(t.get("omega", 0.0)),
                float(t.get("phi", 0.0)),
            )
            for t in d["terms"]
        ]
        return TermSum(tuple(terms), label=label)
    if kind == "cardinal_sine":
        return CardinalSine(float(d["alpha"]), float(d["c"]), float(d.get("scale", 1.0)), label=label)
    raise UnsupportedKindError(f"unknown signal kind {kind!r}")


def signal_to_dict(s: Signal) -> dict:
    if isinstance(s, TermSum):
        return {
            "label": s.label,
            "kind": "term_sum",
            "terms": [
                {"a": t.a, "l": t.l, "sigma": t.sigma, "omega": t.omega, "phi": t.phi} for t in s.terms
            ],
        }
    if isinstance(s, CardinalSine):
        return {"label": s.label, "kind": "cardinal_sine", "alpha": s.alpha, "c": s.c, "scale": s.scale}
    raise UnsupportedKindError(type(s).__name__)


def load_signal(name_or_path: str) -> Signal:
    """Resolve a preset name (``paper-a`` .. ``paper-d``) or a JSON file path."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    path = Path(name_or_path)
    if not path.exists():
        raise FileNotFoundError(f"no preset or file named {name_or_path!r}")
    d = json.loads(path.read_text())
    d.setdefault("label", path.stem)
    return signal_from_dict(d)
