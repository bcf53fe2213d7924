"""Dense matrix kernels: SVD, pseudoinverse, eigendecomposition, expm, principal logm.

Matrices are plain numpy arrays. The heavy lifting is delegated to LAPACK
(through numpy) and to scipy's Pade-based ``expm`` / inverse
scaling-and-squaring ``logm``; this module adds the contracts the rest of the
package relies on: finiteness checks, a branch-cut test for the logarithm, a
principal-strip certificate and consistent error types.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BranchCutError, NumericalFailure

EPS = np.finfo(float).eps
BRANCH_CUT_TOL = 1e-12


def _as_matrix(A, name="A") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalFailure(f"{name} has non-finite entries")
    return A


def _as_square(A, name="A") -> np.ndarray:
    A = _as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def real_part(x, scale: float | None = None, tol: float = 1e-8):
    """Return ``x.real`` after checking the discarded imaginary part is negligible.

    The residual is compared against ``tol * scale`` where ``scale`` defaults to
    ``max(1, max|x|)``.
    """
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        return x
    if scale is None:
        scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
    resid = float(np.max(np.abs(x.imag), initial=0.0))
    if resid > tol * scale:
        raise NumericalFailure(f"imaginary residual {resid:.3e} exceeds {tol:.1e}*{scale:.3e}")
    return x.real


def svd(A):
    """Thin SVD ``A = U @ diag(s) @ V.conj().T`` with ``s`` sorted descending."""
    A = _as_matrix(A)
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return U, s, Vh.conj().T


def numerical_rank(s, rel_tol: float) -> int:
    s = np.asarray(s)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def pinv(A, rel_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values below ``rel_tol * s_max`` are dropped."""
    A = _as_matrix(A)
    if rel_tol is None:
        rel_tol = max(A.shape) * EPS
    if rel_tol < 0:
        raise ValueError("rel_tol must be nonnegative")
    U, s, V = svd(A)
    r = numerical_rank(s, rel_tol)
    if r == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=A.dtype)
    return (V[:, :r] / s[:r]) @ U[:, :r].conj().T


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    # 2-norm condition number of the eigenvector matrix; inf/huge for defective input
    condition_estimate: float

    @property
    def ill_conditioned(self) -> bool:
        return not self.condition_estimate < 1e8

    def residuals(self, A) -> np.ndarray:
        A = np.asarray(A)
        V = self.eigenvectors
        return np.linalg.norm(A @ V - V * self.eigenvalues, axis=0)


def eig(A) -> EigenDecomposition:
    A = _as_square(A)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition did not converge: {exc}") from exc
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(V)) if V.size else 1.0
    if not np.isfinite(cond):
        cond = np.inf
    return EigenDecomposition(w, V, cond)


def expm(A) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade core)."""
    A = _as_square(A)
    if A.size == 0:
        return np.eye(0, dtype=A.dtype)
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = scipy.linalg.expm(A)
        except FloatingPointError as exc:
            raise NumericalFailure(f"expm overflow: {exc}") from exc
    if not np.all(np.isfinite(E)):
        raise NumericalFailure("expm produced non-finite entries")
    return E


def branch_cut_eigenvalues(eigenvalues, scale: float = 1.0, tol: float = BRANCH_CUT_TOL):
    """Eigenvalues within ``tol * max(1, scale)`` of the closed negative real axis."""
    w = np.asarray(eigenvalues, dtype=complex)
    t = tol * max(1.0, scale)
    on_cut = (np.abs(w.imag) <= t) & (w.real <= t)
    return w[on_cut]


def logm_principal(A, *, boundary: bool = False) -> np.ndarray:
    """Principal matrix logarithm; the spectrum of the result lies in |Im z| < pi.

    An eigenvalue on ``(-inf, 0]`` (within 1e-12 relative) has no principal
    logarithm and raises :class:`BranchCutError`. With ``boundary=True`` strictly
    negative eigenvalues are accepted and mapped to ``log|mu| + i*pi`` (the
    closure of the principal branch); zero eigenvalues still raise.

    Always returns a complex array.
    """
    A = _as_square(A)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = float(np.linalg.norm(A, 2))
    w = np.linalg.eigvals(A)
    bad = branch_cut_eigenvalues(w, scale)
    if bad.size:
        if not boundary or np.any(np.abs(bad) <= BRANCH_CUT_TOL * max(1.0, scale)):
            raise BranchCutError(
                f"eigenvalue(s) {np.round(bad, 14)} on the closed negative real axis; "
                "principal logarithm undefined"
            )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            L, _ = scipy.linalg.logm(A, disp=False)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f"logm failed: {exc}") from exc
    L = np.asarray(L, dtype=complex)
    if not np.all(np.isfinite(L)):
        raise NumericalFailure("logm produced non-finite entries")
    if bad.size:
        # scipy puts negative real eigenvalues on +i*pi already; nothing to fix
        return L
    wl = np.linalg.eigvals(L)
    if np.any(np.abs(wl.imag) >= np.pi + 1e-9 * max(1.0, np.max(np.abs(wl)))):
        raise NumericalFailure("logm result is outside the principal strip")
    return L


def expm_many(A, taus) -> np.ndarray:
    """``expm(tau * A)`` for every ``tau``; returns an array of shape (len(taus), n, n)."""
    A = _as_square(A)
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if taus.size == 0:
        return np.zeros((0,) + A.shape, dtype=A.dtype)
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = scipy.linalg.expm(taus[:, None, None] * A[None])
        except FloatingPointError as exc:
            raise NumericalFailure(f"expm overflow: {exc}") from exc
    if not np.all(np.isfinite(E)):
        raise NumericalFailure("expm produced non-finite entries")
    return E
