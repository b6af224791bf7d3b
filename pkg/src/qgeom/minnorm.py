"""Wolfe's minimum-norm-point algorithm for the convex hull of a point set."""
from __future__ import annotations

import numpy as np


class MinNormNotConverged(RuntimeError):
    """Raised when the iteration cap is hit; carries the best bounds found."""

    def __init__(self, msg, point, gap):
        super().__init__(msg)
        self.point = point
        self.gap = gap


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the min-norm point of aff(rows of Q)."""
    k = Q.shape[0]
    K = np.empty((k + 1, k + 1))
    K[:k, :k] = Q @ Q.T
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    K[k, k] = 0.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(P, tol: float = 1e-12, max_iter: int = 100_000, weight_tol: float = 1e-15):
    """Point of minimum Euclidean norm in conv(P).

    Parameters
    ----------
    P : array (m, n)
        Points spanning the hull.
    tol : float
        Stop when the Wolfe duality gap ``|x|^2 - min_j <x, p_j>`` drops below
        ``tol * max_j |p_j|^2``.  The gap bounds ``|x - x*|^2``.

    Returns
    -------
    x : ndarray (n,)
    weights : dict index -> convex weight
    gap : float
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("need a non-empty (m, n) point array")
    norms = np.einsum("ij,ij->i", P, P)
    scale = max(float(norms.max()), 1e-300)
    j = int(np.argmin(norms))
    S = [j]
    lam = np.array([1.0])
    x = P[j].copy()
    gap = np.inf
    for _ in range(max_iter):
        g = P @ x
        j = int(np.argmin(g))
        gap = float(x @ x - g[j])
        if gap <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_minimizer(P[S])
            if np.all(alpha > weight_tol):
                lam = alpha
                break
            mask = alpha <= weight_tol
            ratios = lam[mask] / (lam[mask] - alpha[mask])
            theta = float(np.min(ratios)) if ratios.size else 1.0
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (alpha - lam)
            keep = lam > weight_tol
            # always drop at least one point so the minor cycle terminates
            if keep.all():
                keep[int(np.argmin(lam))] = False
            S = [s for s, kflag in zip(S, keep) if kflag]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]
    else:
        raise MinNormNotConverged("min-norm point iteration cap exceeded", x, gap)
    return x, dict(zip(S, lam)), max(gap, 0.0)


def distance_to_hull(y, P, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Euclidean distance from ``y`` to conv(P)."""
    P = np.asarray(P, dtype=float)
    x, _, _ = min_norm_point(P - np.asarray(y, dtype=float), tol=tol, max_iter=max_iter)
    return float(np.linalg.norm(x))
