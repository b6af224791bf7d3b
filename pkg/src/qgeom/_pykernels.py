"""Pure numpy fallback for the distance kernels.

Mirrors :mod:`qgeom._ckernels` function for function.  The Jacobi sweep is
vectorised over the batch; the Wolfe loop runs per point in Python.
"""
from __future__ import annotations

import numpy as np

from .minnorm import MinNormNotConverged, min_norm_point

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def hermitian_eigvalsh(re, im, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Ascending eigenvalues of a batch of Hermitian matrices (N, d, d)."""
    A = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    A = A.copy()
    N, d, _ = A.shape
    iu = np.triu_indices(d, 1)
    rows = np.arange(N)
    for _ in range(max_sweeps):
        off = 2.0 * np.sum(np.abs(A[:, iu[0], iu[1]]) ** 2, axis=1)
        active = off > tol * tol
        if not active.any():
            break
        idx = rows[active]
        B = A[idx]
        for p in range(d):
            for q in range(p + 1, d):
                apq = B[:, p, q]
                r = np.abs(apq)
                nz = r > 0.0
                if not nz.any():
                    continue
                ph = np.where(nz, np.conj(apq) / np.where(nz, r, 1.0), 1.0)
                # A <- D^H A D with D = diag(.., ph at q, ..)
                B[:, :, q] *= ph[:, None]
                B[:, q, :] *= np.conj(ph)[:, None]
                app = B[:, p, p].real
                aqq = B[:, q, q].real
                rr = np.where(nz, r, 1.0)
                theta = (aqq - app) / (2.0 * rr)
                t = np.sign(theta + (theta == 0)) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = B[:, :, p].copy()
                colq = B[:, :, q].copy()
                B[:, :, p] = c[:, None] * colp - s[:, None] * colq
                B[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = B[:, p, :].copy()
                rowq = B[:, q, :].copy()
                B[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                B[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                B[:, p, q] = 0.0
                B[:, q, p] = 0.0
        A[idx] = B
    else:
        off = 2.0 * np.sum(np.abs(A[:, iu[0], iu[1]]) ** 2, axis=1)
        bad = int(np.sum(off > tol * tol))
        if bad:
            raise ArithmeticError(f"Jacobi eigensolver did not converge for {bad} matrices")
    return np.sort(np.real(np.diagonal(A, axis1=1, axis2=2)), axis=1)


def project_simplex(X) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = X.shape[1]
    u = -np.sort(-X, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    j = np.arange(1, d + 1)
    cond = u - css / j > 0
    rho = d - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(X.shape[0]), rho - 1] / rho
    return np.maximum(X - tau[:, None], 0.0)


def coords_to_hermitian(coords, d: int):
    """Real and imaginary parts of I/d + sum_i x_i B_i for a batch of coordinates."""
    X = np.atleast_2d(np.asarray(coords, dtype=float))
    N = X.shape[0]
    re = np.zeros((N, d, d))
    im = np.zeros((N, d, d))
    re[:, np.arange(d), np.arange(d)] = 1.0 / d
    j, k = np.triu_indices(d, 1)
    h = len(j)
    v = X[:, :h] * _INV_SQRT2
    re[:, j, k] += v
    re[:, k, j] += v
    w = X[:, h:2 * h] * _INV_SQRT2
    im[:, j, k] -= w
    im[:, k, j] += w
    for l in range(1, d):
        dg = X[:, 2 * h + l - 1] / np.sqrt(l * (l + 1))
        re[:, np.arange(l), np.arange(l)] += dg[:, None]
        re[:, l, l] -= l * dg
    return re, im


def statespace_distances(coords, d: int, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Hilbert-Schmidt distance from I/d + sum x_i B_i to the density matrices."""
    X = np.atleast_2d(np.asarray(coords, dtype=float))
    if X.shape[1] != d * d - 1:
        raise ValueError("coordinate dimension must be d^2 - 1")
    re, im = coords_to_hermitian(X, d)
    lam = hermitian_eigvalsh(re, im, tol, max_sweeps)
    return np.linalg.norm(lam - project_simplex(lam), axis=1)


def polytope_distances(points, vertices, tol: float = 1e-12, max_iter: int = 100_000,
                       weight_tol: float = 1e-15) -> np.ndarray:
    """Distance from each row of ``points`` to conv(vertices) via Wolfe's algorithm."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    V = np.asarray(vertices, dtype=float)
    if X.shape[1] != V.shape[1]:
        raise ValueError("points and vertices differ in dimension")
    out = np.empty(X.shape[0])
    for i, y in enumerate(X):
        try:
            x, _, _ = min_norm_point(V - y, tol=tol, max_iter=max_iter, weight_tol=weight_tol)
        except MinNormNotConverged as exc:
            raise ArithmeticError("min-norm iteration cap exceeded") from exc
        out[i] = np.sqrt(x @ x)
    return out
