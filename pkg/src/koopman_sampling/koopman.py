"""Koopman operator-based reconstruction (KR).

Pipeline: time-delay Hankel lifting -> least-squares DT Koopman matrix
``U = pinv(X) @ Y`` -> generator ``L = Log(U) / T_s`` (principal branch) ->
``g(tau) = anchor @ expm(tau L)[:, 0]`` where ``anchor`` holds the first ``M``
samples.

When the embedding dimension exceeds the rank of the data (``M`` larger than
the dimension of the signal's shift-invariant span) ``U`` has an exact kernel
and no logarithm. The generator is then formed on the identified subspace and
the kernel is given the fixed decay ``log(KERNEL_FLOOR) / T_s``. The anchor row
lies in the identified subspace, so the kernel never contributes to the output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import (
    AliasingBoundaryError,
    BranchCutError,
    InconsistencyError,
    InsufficientDataError,
    RangeError,
)
from .sampling import HankelPair, SampleSet, build_hankel, select_dimension
from .signals import SpectrumReport

RANK_TOL = 1e-10
KERNEL_FLOOR = 1e-12
IMAG_TOL = 1e-4
CRITICAL_MARGIN = 1e-6


@dataclass(frozen=True)
class ReconstructionSeries:
    times: np.ndarray
    values: np.ndarray
    method: str
    max_imag_residual: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if t.shape != v.shape:
            raise ValueError("times and values must have equal length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class Diagnostics:
    pinv_residual: float
    branch_margin: float
    rank: int
    log_residual: float
    boundary_modes: int = 0


@dataclass(frozen=True)
class KoopmanModel:
    U_dt: np.ndarray
    L_gen: np.ndarray
    T_s: float
    anchor: np.ndarray
    diagnostics: Diagnostics
    # orthonormal basis of the identified subspace when rank < M, else None
    subspace: np.ndarray | None = field(default=None, repr=False)
    start_time: float = 0.0  # time of the first anchor sample

    @property
    def M(self) -> int:
        return self.U_dt.shape[0]

    def generator_on_subspace(self) -> np.ndarray:
        """Generator restricted to the identified subspace (equals ``L_gen`` at full rank)."""
        if self.subspace is None:
            return self.L_gen
        V = self.subspace
        return V.conj().T @ self.L_gen @ V

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        def mat(A):
            A = np.asarray(A, dtype=complex)
            return [[[z.real, z.imag] for z in row] for row in A]

        d = {
            "T_s": self.T_s,
            "M": self.M,
            "start_time": self.start_time,
            "anchor": self.anchor.tolist(),
            "U_dt": mat(self.U_dt),
            "L_gen": mat(self.L_gen),
            "diagnostics": vars(self.diagnostics).copy(),
        }
        if self.subspace is not None:
            d["subspace"] = mat(self.subspace)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KoopmanModel":
        def mat(rows):
            a = np.array(rows, dtype=float)
            return a[..., 0] + 1j * a[..., 1]

        U = mat(d["U_dt"])
        if np.all(U.imag == 0):
            U = U.real
        return cls(
            U,
            mat(d["L_gen"]),
            float(d["T_s"]),
            np.array(d["anchor"], dtype=float),
            Diagnostics(**d["diagnostics"]),
            mat(d["subspace"]) if "subspace" in d else None,
            float(d.get("start_time", 0.0)),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "KoopmanModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _branch_margin(eigenvalues) -> float:
    w = np.asarray(eigenvalues, dtype=complex)
    w = w[np.abs(w) > 0]
    if w.size == 0:
        return math.pi
    return float(np.min(math.pi - np.abs(np.angle(w))))


def identify(
    hp: HankelPair,
    T_s: float,
    *,
    rank_tol: float = RANK_TOL,
    boundary: bool = False,
    start_time: float = 0.0,
) -> KoopmanModel:
    """Identify the DT Koopman matrix and its generator from a Hankel pair.

    ``boundary=True`` accepts negative real eigenvalues of the DT matrix (typical
    of noise-fitted modes) by placing their logarithm on ``Im = pi``; otherwise
    they raise :class:`AliasingBoundaryError`.
    """
    if not T_s > 0:
        raise ValueError("T_s must be positive")
    X = np.asarray(hp.X, dtype=float)
    Y = np.asarray(hp.Y, dtype=float)
    M = hp.M
    Ux, s, V = linalg.svd(X)
    r = linalg.numerical_rank(s, rank_tol)
    if r == 0:
        raise InsufficientDataError("samples are identically zero; nothing to identify")
    U_dt = (V[:, :r] / s[:r]) @ Ux[:, :r].T @ Y
    y_norm = np.linalg.norm(Y)
    pinv_residual = float(np.linalg.norm(X @ U_dt - Y) / y_norm) if y_norm else 0.0

    # log is taken in the orthonormal right-singular basis: same matrix up to an
    # orthogonal similarity, but far better scaled than raw time-delay coordinates
    Vr = V[:, :r]
    A = Vr.T @ U_dt @ Vr
    eigs = np.linalg.eigvals(A)
    margin = _branch_margin(eigs)
    try:
        logA = linalg.logm_principal(A, boundary=boundary)
    except BranchCutError as exc:
        raise AliasingBoundaryError(
            f"sampling period {T_s} is at or beyond the critical period of the identified dynamics: {exc}"
        ) from exc
    n_boundary = int(linalg.branch_cut_eigenvalues(eigs, float(np.linalg.norm(A, 2))).size)

    L = Vr @ logA @ Vr.T
    if r < M:
        L = L + math.log(KERNEL_FLOOR) * (np.eye(M) - Vr @ Vr.T)
    L = L / T_s
    log_residual = float(
        np.linalg.norm(linalg.expm(T_s * L) - U_dt) / (1.0 + np.linalg.norm(U_dt))
    )
    diag = Diagnostics(pinv_residual, margin, r, log_residual, n_boundary)
    anchor = np.array(X[0], dtype=float)
    return KoopmanModel(U_dt, L, float(T_s), anchor, diag, Vr if r < M else None, float(start_time))


def propagate(model: KoopmanModel, tau: float, *, allow_negative: bool = False) -> np.ndarray:
    """``expm(tau * L_gen)``: the identified Koopman matrix for time shift ``tau``."""
    if tau < 0 and not allow_negative:
        raise RangeError("negative tau requires allow_negative=True")
    return linalg.expm(tau * model.L_gen)


def _finish(times, raw, model: KoopmanModel, method: str) -> ReconstructionSeries:
    raw = np.asarray(raw)
    resid = float(np.max(np.abs(raw.imag), initial=0.0)) if np.iscomplexobj(raw) else 0.0
    vals = raw.real
    scale = 1.0 + float(np.max(np.abs(vals), initial=0.0))
    # boundary modes (Im = pi) leave an expected imaginary part; the real part is
    # the average of the two boundary branches
    if resid > IMAG_TOL * scale and model.diagnostics.boundary_modes == 0:
        raise InconsistencyError(
            f"imaginary residual {resid:.3e} exceeds {IMAG_TOL:g}*{scale:.3e}; "
            "embedding dimension or sampling period is likely wrong"
        )
    return ReconstructionSeries(times, vals, method, resid)


def reconstruct(model: KoopmanModel, times, *, allow_negative: bool = False) -> ReconstructionSeries:
    """``g(t) = anchor @ expm((t - start) L)[:, 0]``; ``start`` is the first sample time."""
    times = np.asarray(times, dtype=float).reshape(-1)
    tau = times - model.start_time
    if np.any(tau < 0) and not allow_negative:
        raise RangeError("times before the first sample require allow_negative=True")
    cols = linalg.expm_many(model.L_gen, tau)[:, :, 0]
    return _finish(times, cols @ model.anchor, model, "kr")


def reconstruct_windowed(model: KoopmanModel, ss: SampleSet, times) -> ReconstructionSeries:
    """Reconstruct from the sample window nearest below each time.

    For ``t = start + k*T_s + tau`` with ``0 <= tau < T_s`` the value is
    ``ss.values[k:k+M] @ expm(tau L)[:, 0]``. Times must lie in
    ``[start, start + (N-M)*T_s]``.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    T, M, N = model.T_s, model.M, ss.N
    if not math.isclose(ss.period, T, rel_tol=1e-12):
        raise ValueError("sample period does not match the model")
    q = (times - ss.start_time) / T
    k = np.floor(q).astype(int)
    near = np.abs(q - np.rint(q)) <= 1e-9
    k[near] = np.rint(q[near]).astype(int)
    tau = np.where(near, 0.0, times - ss.start_time - k * T)
    tau = np.clip(tau, 0.0, None)
    bad = (k < 0) | (k > N - M) | ((k == N - M) & (tau > 0))
    if np.any(bad):
        raise RangeError(
            f"times must lie in [{ss.start_time}, {ss.start_time + (N - M) * T}]; "
            f"got {times[bad][:3]}"
        )
    taus, inv = np.unique(tau, return_inverse=True)
    cols = linalg.expm_many(model.L_gen, taus)[:, :, 0]
    windows = np.lib.stride_tricks.sliding_window_view(ss.values, M)[k]
    raw = np.einsum("ij,ij->i", windows, cols[inv])
    return _finish(times, raw, model, "kr-windowed")


def estimate_spectrum(model: KoopmanModel) -> SpectrumReport:
    """Spectrum of the identified generator with an aliasing verdict for ``model.T_s``.

    At reduced rank only the identified subspace is reported (the kernel decay
    is a numerical placeholder, not a signal mode).
    """
    eigs = np.linalg.eigvals(model.generator_on_subspace())
    critical = model.diagnostics.branch_margin < CRITICAL_MARGIN
    return SpectrumReport.from_eigenvalues(eigs, model.T_s, critical=critical)


def fit(ss: SampleSet, M: int | None = None, *, K_max: int = 12, boundary: bool = False) -> KoopmanModel:
    """Hankel lifting plus :func:`identify`; ``M`` defaults to :func:`select_dimension`."""
    if M is None:
        K = min(K_max, ss.N // 2)
        M = select_dimension(ss, K_max=K).dim
        if M == 0:
            raise InsufficientDataError("samples are identically zero")
    return identify(build_hankel(ss, M), ss.period, boundary=boundary, start_time=ss.start_time)
