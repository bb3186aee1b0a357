"""Small dense symmetric eigenproblems by cyclic Jacobi rotations.

The matrices met in this package are d x d with d tiny (2 or 3 in practice),
often in large batches (one per sampled measure). The solver below operates
on stacks of matrices of shape ``(..., d, d)`` so a whole batch is rotated at
once.
"""

from __future__ import annotations

import numpy as np

OFFDIAG_TOL = 1e-14


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(a[..., mask] ** 2, axis=-1))


def jacobi_eigh(a, tol: float = OFFDIAG_TOL, max_sweeps: int = 64, vectors: bool = False):
    """Eigen-decomposition of symmetric matrices by cyclic Jacobi sweeps.

    Parameters
    ----------
    a : array_like, shape (..., d, d)
        Symmetric matrices. Only the symmetric part is used.
    tol : float
        Sweeps stop once the Frobenius norm of the off-diagonal part of every
        matrix in the batch is at most ``tol``.
    max_sweeps : int
        Hard cap on the number of full cyclic sweeps.
    vectors : bool
        Also accumulate eigenvectors.

    Returns
    -------
    eigenvalues : ndarray, shape (..., d)
        Sorted ascending.
    eigenvectors : ndarray, shape (..., d, d)
        Only when ``vectors`` is set; column ``k`` belongs to eigenvalue ``k``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    d = a.shape[-1]
    v = np.broadcast_to(np.eye(d), a.shape).copy() if vectors else None

    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(a) <= tol):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[..., p, q]
                nz = apq != 0.0
                if not np.any(nz):
                    continue
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    theta = (a[..., q, q] - a[..., p, p]) / (2.0 * apq)
                    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(nz & np.isfinite(t), t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_, s_ = c[..., None], s[..., None]

                col_p = a[..., :, p].copy()
                col_q = a[..., :, q].copy()
                a[..., :, p] = c_ * col_p - s_ * col_q
                a[..., :, q] = s_ * col_p + c_ * col_q
                row_p = a[..., p, :].copy()
                row_q = a[..., q, :].copy()
                a[..., p, :] = c_ * row_p - s_ * row_q
                a[..., q, :] = s_ * row_p + c_ * row_q

                if vectors:
                    vp = v[..., :, p].copy()
                    vq = v[..., :, q].copy()
                    v[..., :, p] = c_ * vp - s_ * vq
                    v[..., :, q] = s_ * vp + c_ * vq

    w = np.diagonal(a, axis1=-2, axis2=-1)
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    if not vectors:
        return w
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def smallest_eigenvalue(a) -> np.ndarray:
    """Smallest eigenvalue of each symmetric matrix in ``a``."""
    return jacobi_eigh(a)[..., 0]
