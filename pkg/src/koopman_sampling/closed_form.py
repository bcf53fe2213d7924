"""Analytic reconstruction formulas.

* Whittaker (sinc) interpolation and its exponentially weighted variant for
  band-limited signals with an ``exp(alpha t)`` envelope.
* The truncation-error bound for a finite exp-sinc window.
* A PBH / controllability test for whether time delays form a basis.
* The closed-form Koopman reconstruction of polynomial-exponential signals.

Basis convention for polynomial-exponential blocks: for a rate ``lam`` of
degree ``b`` the basis is ordered by descending degree,
``[t**b e^{lam t}, t**(b-1) e^{lam t}, ..., e^{lam t}]``. In that ordering the
shift matrix is lower triangular.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg
from .errors import BasisDegeneracyError, NumericalFailure, PreconditionError
from .koopman import IMAG_TOL, ReconstructionSeries
from .sampling import SampleSet
from .signals import Signal, TermSum, exponential_form

SINC_SERIES_CUTOFF = 1e-8
Q_COND_MAX = 1e12
PBH_RANK_TOL = 1e-10


# --- sinc family -------------------------------------------------------------


def _sinc_pi(u: np.ndarray) -> np.ndarray:
    """``sin(pi u) / (pi u)`` with a two-term series near the removable point.

    The sine is evaluated on ``u - rint(u)`` so the weights vanish exactly at
    nonzero integer ``u``.
    """
    u = np.asarray(u, dtype=float)
    x = math.pi * u
    small = np.abs(x) < SINC_SERIES_CUTOFF
    n = np.rint(u)
    sign = np.where(np.fmod(n, 2.0) == 0.0, 1.0, -1.0)
    num = sign * np.sin(math.pi * (u - n))
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, num / safe)


def _exp_sinc_sum(origin, k, g_k, T_s, alpha, times) -> np.ndarray:
    """Weighted sum over samples taken at ``origin + k*T_s`` (``k`` integer)."""
    times = np.asarray(times, dtype=float).reshape(-1)
    k = np.asarray(k, dtype=float)
    # offsets in units of T_s, measured from integer k so sample instants give exact integers
    u = ((times - origin) / T_s)[:, None] - k[None, :]
    w = _sinc_pi(u)
    if alpha != 0.0:
        w = w * np.exp(alpha * T_s * u)
    return w @ np.asarray(g_k, dtype=float)


def exp_sinc_reconstruct(ss: SampleSet, alpha: float, times) -> ReconstructionSeries:
    """``sum_k g_k e^{alpha (t - t_k)} sinc(pi/T (t - t_k))`` over all available samples.

    Also covers signals of the form ``g(0) + t*g0(t)`` with ``g0`` band-limited,
    which share the same interpolation formula.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    vals = _exp_sinc_sum(ss.start_time, np.arange(ss.N), ss.values, ss.period, float(alpha), times)
    return ReconstructionSeries(times, vals, "sinc" if alpha == 0 else "exp-sinc")


def sinc_reconstruct(ss: SampleSet, times) -> ReconstructionSeries:
    """Finite Whittaker interpolation; exactly ``exp_sinc_reconstruct`` with ``alpha = 0``."""
    return exp_sinc_reconstruct(ss, 0.0, times)


@dataclass(frozen=True)
class ExpSincConfig:
    alpha: float
    T_s: float
    c: float
    n_left: int
    n_right: int

    def __post_init__(self):
        if not (self.T_s > 0 and self.c > 0):
            raise ValueError("T_s and c must be positive")
        if self.n_left < 0 or self.n_right < 0:
            raise ValueError("window sizes must be nonnegative")
        if self.c * self.T_s >= math.pi:
            raise PreconditionError(f"need c*T_s < pi, got {self.c * self.T_s}")


def truncation_bound(cfg: ExpSincConfig, E: float, t) -> np.ndarray | float:
    """Upper bound on the error of the exp-sinc sum truncated to ``n_left + n_right + 1`` terms.

    ``E`` is the L2 energy of the band-limited factor.
    """
    if not E > 0:
        raise PreconditionError("energy E must be positive")
    if cfg.c * cfg.T_s >= math.pi:
        raise PreconditionError("need c*T_s < pi")
    if cfg.n_left == 0 or cfg.n_right == 0:
        return np.inf if np.ndim(t) == 0 else np.full(np.shape(t), np.inf)
    t = np.asarray(t, dtype=float)
    out = (
        2.0
        * math.sqrt(E * cfg.c / math.pi)
        * np.exp(cfg.alpha * t)
        * np.abs(np.sin(math.pi * t / cfg.T_s))
        / (math.pi * (math.pi - cfg.c * cfg.T_s))
        * (1.0 / cfg.n_left + 1.0 / cfg.n_right)
    )
    return float(out) if out.ndim == 0 else out


def window_center(t, T_s: float) -> np.ndarray:
    """Nearest sample index to ``t`` (ties to even)."""
    return np.rint(np.asarray(t, dtype=float) / T_s).astype(int)


def truncated_exp_sinc(s: Signal, cfg: ExpSincConfig, times) -> np.ndarray:
    """Exp-sinc sum of exact samples of ``s`` over the window ``K(t)-n_left .. K(t)+n_right``."""
    times = np.asarray(times, dtype=float).reshape(-1)
    offs = np.arange(-cfg.n_left, cfg.n_right + 1)
    out = np.empty_like(times)
    for i, t in enumerate(times):
        k = window_center(t, cfg.T_s) + offs
        out[i] = _exp_sinc_sum(0.0, k, s(k * cfg.T_s), cfg.T_s, cfg.alpha, [t])[0]
    return out


# --- PBH test ----------------------------------------------------------------


@dataclass(frozen=True)
class PBHResult:
    passes: bool
    controllability_rank: int
    pbh_passes: bool
    # (eigenvalue, rank of [lam I - U, a]) for every eigenvalue of U
    pbh_ranks: tuple[tuple[complex, int], ...]
    M: int

    @property
    def disagreement(self) -> bool:
        return self.passes != self.pbh_passes

    def __bool__(self):
        return self.passes


def controllability_matrix(U, a) -> np.ndarray:
    U = np.asarray(U)
    v = np.asarray(a).reshape(-1)
    cols = [v]
    for _ in range(U.shape[0] - 1):
        cols.append(U @ cols[-1])
    return np.column_stack(cols)


def pbh_time_delay_test(U_M, a, rel_tol: float = PBH_RANK_TOL) -> PBHResult:
    """Check that ``a, U a, ..., U^{M-1} a`` span the whole space.

    Two equivalent tests are run: the rank of the controllability matrix
    (columns normalized before the SVD) and, for every eigenvalue ``lam`` of
    ``U``, the rank of ``[lam I - U, a]``. ``passes`` follows the first.
    """
    U = linalg._as_square(U_M, "U_M")
    M = U.shape[0]
    a = np.asarray(a).reshape(-1)
    if a.size != M:
        raise ValueError(f"a must have length {M}")
    K = controllability_matrix(U, a)
    norms = np.linalg.norm(K, axis=0)
    if np.all(norms == 0):
        ctrl_rank = 0
    else:
        Kn = K / np.where(norms > 0, norms, 1.0)
        ctrl_rank = linalg.numerical_rank(linalg.svd(Kn)[1], rel_tol)
    ranks = []
    for lam in linalg.eig(U).eigenvalues:
        B = np.column_stack([lam * np.eye(M) - U, a])
        ranks.append((complex(lam), linalg.numerical_rank(linalg.svd(B)[1], rel_tol)))
    pbh_ok = all(r == M for _, r in ranks)
    return PBHResult(ctrl_rank == M, ctrl_rank, pbh_ok, tuple(ranks), M)


# --- polynomial-exponential closed form --------------------------------------


@dataclass(frozen=True)
class PolyExpStructure:
    """``g(t) = sum_k sum_l coefficients[k][l] * t**l * exp(eigenvalues[k] t)``.

    ``coefficients[k]`` is indexed by ascending power ``l = 0..degrees[k]``.
    """

    eigenvalues: tuple[complex, ...]
    degrees: tuple[int, ...]
    coefficients: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        lam = tuple(complex(z) for z in self.eigenvalues)
        deg = tuple(int(b) for b in self.degrees)
        coefs = tuple(np.asarray(c, dtype=complex).reshape(-1) for c in self.coefficients)
        if not (len(lam) == len(deg) == len(coefs)) or not lam:
            raise ValueError("eigenvalues, degrees and coefficients must be non-empty and aligned")
        if len(set(lam)) != len(lam):
            raise ValueError("eigenvalues must be distinct")
        for b, c in zip(deg, coefs):
            if b < 0 or c.size != b + 1:
                raise ValueError("coefficients[k] must have degrees[k] + 1 entries")
            if c[b] == 0:
                raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "coefficients", coefs)

    @property
    def M(self) -> int:
        return sum(b + 1 for b in self.degrees)

    @classmethod
    def from_signal(cls, s: TermSum) -> "PolyExpStructure":
        form = exponential_form(s)
        lams, degs, coefs = [], [], []
        for lam in sorted(form, key=lambda z: (z.real, z.imag)):
            d = form[lam]
            b = max(d)
            c = np.zeros(b + 1, dtype=complex)
            for l, v in d.items():
                c[l] = v
            lams.append(lam)
            degs.append(b)
            coefs.append(c)
        return cls(tuple(lams), tuple(degs), tuple(coefs))

    def coefficient_vector(self) -> np.ndarray:
        """Coordinates of ``g`` in the degree-descending basis."""
        return np.concatenate([c[::-1] for c in self.coefficients])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for lam, c in zip(self.eigenvalues, self.coefficients):
            out = out + np.polynomial.polynomial.polyval(t, c) * np.exp(lam * t)
        return out


def build_poly_exp_koopman_block(lam: complex, b: int, tau: float) -> np.ndarray:
    """Shift matrix of ``[t**b, ..., 1] * e^{lam t}`` over time ``tau``.

    Entry ``(r, s)`` with ``r >= s`` is ``C(b-s, r-s) * tau**(r-s) * e^{lam tau}``.
    """
    if b < 0:
        raise ValueError("b must be >= 0")
    B = np.zeros((b + 1, b + 1), dtype=complex)
    e = np.exp(complex(lam) * tau)
    for s in range(b + 1):
        for r in range(s, b + 1):
            B[r, s] = math.comb(b - s, r - s) * tau ** (r - s) * e
    return B


def poly_exp_generator_block(lam: complex, b: int) -> np.ndarray:
    """Generator ``G`` with ``expm(tau G) == build_poly_exp_koopman_block(lam, b, tau)``."""
    G = complex(lam) * np.eye(b + 1, dtype=complex)
    for s in range(b):
        G[s + 1, s] = b - s
    return G


def poly_exp_koopman_matrix(st: PolyExpStructure, tau: float) -> np.ndarray:
    return scipy.linalg.block_diag(
        *(build_poly_exp_koopman_block(lam, b, tau) for lam, b in zip(st.eigenvalues, st.degrees))
    )


def shifted_coefficients(st: PolyExpStructure, tau: float) -> np.ndarray:
    """Coordinates of ``g(. + tau)`` in the degree-descending basis."""
    parts = []
    for lam, b, a in zip(st.eigenvalues, st.degrees, st.coefficients):
        e = np.exp(lam * tau)
        col = np.empty(b + 1, dtype=complex)
        for p in range(b + 1):
            q = b - p
            col[p] = sum(math.comb(l, q) * a[l] * tau ** (l - q) for l in range(q, b + 1)) * e
        parts.append(col)
    return np.concatenate(parts)


def transition_matrix(st: PolyExpStructure, T_s: float) -> np.ndarray:
    """``Q`` with columns ``shifted_coefficients(st, j*T_s)``, ``j = 0..M-1``."""
    return np.column_stack([shifted_coefficients(st, j * T_s) for j in range(st.M)])


def poly_exp_closed_form(st: PolyExpStructure, ss: SampleSet, times) -> ReconstructionSeries:
    """``g(t) = g0 Q^{-1} U^{t - start} a`` using the first ``M`` samples ``g0``.

    ``a`` is the coefficient vector of the signal shifted to the first sample
    time. Requires ``T_s`` below the critical period and a time-delay basis
    (PBH test); raises :class:`BasisDegeneracyError` if ``Q`` is too
    ill-conditioned to invert.
    """
    M, T = st.M, ss.period
    if ss.N < M:
        raise PreconditionError(f"need at least M={M} samples, got {ss.N}")
    max_imag = max(abs(z.imag) for z in st.eigenvalues)
    if max_imag > 0 and T >= math.pi / max_imag:
        raise PreconditionError(f"T_s={T} is not below the critical period {math.pi / max_imag}")
    a = shifted_coefficients(st, ss.start_time)
    Q = transition_matrix(st, T)
    # the coordinates are a', so Q must be built for the shifted signal as well
    if ss.start_time != 0.0:
        Q = poly_exp_koopman_matrix(st, ss.start_time) @ Q
    cond = float(np.linalg.cond(Q))
    if not cond <= Q_COND_MAX:
        raise BasisDegeneracyError(f"cond(Q) = {cond:.3e} exceeds {Q_COND_MAX:g}")
    if not pbh_time_delay_test(poly_exp_koopman_matrix(st, T), a).passes:
        raise PreconditionError("time delays do not form a basis (PBH test failed)")
    row = np.linalg.solve(Q.T, ss.values[:M].astype(complex))  # g0 Q^{-1}
    times = np.asarray(times, dtype=float).reshape(-1)
    raw = np.array([row @ (poly_exp_koopman_matrix(st, t - ss.start_time) @ a) for t in times])
    resid = float(np.max(np.abs(raw.imag), initial=0.0))
    vals = raw.real
    scale = 1.0 + float(np.max(np.abs(vals), initial=0.0))
    if resid > IMAG_TOL * scale:
        raise NumericalFailure(f"imaginary residual {resid:.3e} in closed-form reconstruction")
    return ReconstructionSeries(times, vals, "poly-exp", resid)
