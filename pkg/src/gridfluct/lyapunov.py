"""Continuous-time Lyapunov equation solvers.

Two algorithmically independent backends solve A Q + Q A^T + W = 0:

* :func:`lyapunov_solve` -- Bartels-Stewart via a real Schur decomposition
  (scipy's LAPACK-backed implementation), the production path;
* :func:`lyapunov_solve_kron` -- dense Kronecker vectorisation, kept as an
  oracle for cross-checking the primary path on small systems.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InstabilityError, ShapeError

HURWITZ_MARGIN = 1e-12


def _validate(a: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    w = np.atleast_2d(np.asarray(w, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"A must be square, got shape {a.shape}")
    if w.shape != a.shape:
        raise ShapeError(f"W shape {w.shape} does not match A shape {a.shape}")
    if np.abs(w - w.T).max() > 1e-9 * max(1.0, np.abs(w).max()):
        raise ShapeError("W must be symmetric")
    return a, w


def assert_hurwitz(a: np.ndarray, margin: float = HURWITZ_MARGIN) -> float:
    """Return max Re(eig(A)), raising InstabilityError unless it is < -margin."""
    spectral_abscissa = float(np.linalg.eigvals(a).real.max())
    if spectral_abscissa >= -margin:
        raise InstabilityError(
            f"matrix is not Hurwitz: max real part of eigenvalues is {spectral_abscissa:.3e}"
        )
    return spectral_abscissa


def lyapunov_solve(a, w, *, check_hurwitz: bool = True) -> np.ndarray:
    """Solve A Q + Q A^T + W = 0 by Bartels-Stewart.

    Args:
        a: square Hurwitz matrix.
        w: symmetric positive semi-definite matrix of matching size.
        check_hurwitz: verify the stability precondition (the equation has a
            unique PSD solution only for Hurwitz A).

    Returns:
        The symmetric solution Q.

    Raises:
        InstabilityError: if A has an eigenvalue with real part >= -1e-12.
        ShapeError: on dimension mismatch or non-symmetric W.
    """
    a, w = _validate(a, w)
    if check_hurwitz:
        assert_hurwitz(a)
    q = scipy.linalg.solve_continuous_lyapunov(a, -w)
    return 0.5 * (q + q.T)


def lyapunov_solve_kron(a, w, *, check_hurwitz: bool = True) -> np.ndarray:
    """Solve A Q + Q A^T + W = 0 via (I (x) A + A (x) I) vec(Q) = -vec(W).

    Dense oracle; memory grows like n^4, so keep n modest (<= ~60).
    """
    a, w = _validate(a, w)
    if check_hurwitz:
        assert_hurwitz(a)
    n = a.shape[0]
    eye = np.eye(n)
    system = np.kron(eye, a) + np.kron(a, eye)
    q = np.linalg.solve(system, -w.reshape(-1)).reshape(n, n)
    return 0.5 * (q + q.T)


def lyapunov_residual(a, q, w) -> float:
    """Relative residual ||A Q + Q A^T + W|| / max(1, ||W||) (Frobenius)."""
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    return float(
        np.linalg.norm(a @ q + q @ a.T + w) / max(1.0, np.linalg.norm(w))
    )
