"""Hit-or-miss estimation of eps-neighbourhood volumes and Steiner-coefficient fits.

Points are drawn uniformly from the ball of radius ``R + eps`` around the
origin, which contains the eps-neighbourhood of every body here.  A point is
a hit when its distance to the body is at most ``eps + HIT_TOL``.

Random numbers come from Philox.  The key is derived from ``seed``, and
samples are cut into fixed blocks of ``BLOCK`` draws whose counter encodes
the block index.  Block results are integer hit counts, so the estimate does
not depend on how blocks are spread over workers.

Hermitian coordinates
---------------------
A trace-one Hermitian d x d matrix is written ``I/d + sum_i x_i B_i`` with the
orthonormal (Hilbert-Schmidt) traceless basis, in this order:

* ``(E_jk + E_kj)/sqrt(2)`` for j < k, row-major;
* ``(-i E_jk + i E_kj)/sqrt(2)`` for j < k, row-major;
* ``(E_00 + ... + E_{l-1,l-1} - l E_ll)/sqrt(l(l+1))`` for l = 1..d-1.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import cpolytope, kernels, statespace
from .mathkernel import Body, ball_volume

BLOCK = 1 << 16
_COND_LIMIT = 1e12
# distances below this count as zero; the oracles are exact only to roundoff
HIT_TOL = 1e-9


class OracleKind(enum.Enum):
    STATE_SPACE = "statespace"
    COMPLEMENTARITY_POLYTOPE = "polytope"
    SPHERICAL_CONE = "cone"
    BALL = "ball"

    @property
    def body(self) -> Optional[Body]:
        return {"statespace": Body.STATE_SPACE, "polytope": Body.COMPLEMENTARITY_POLYTOPE,
                "cone": Body.SPHERICAL_CONE}.get(self.value)


# --- projections ---------------------------------------------------------------

def project_to_probability_simplex(x) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum y = 1}; accepts a vector or a batch of rows."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("coordinates must be finite")
    out = kernels.project_simplex(np.atleast_2d(x))
    return out[0] if x.ndim == 1 else out


def gellmann_basis(d: int) -> np.ndarray:
    """The (d^2-1, d, d) orthonormal traceless Hermitian basis described in the module doc."""
    n = d * d - 1
    re, im = kernels.coords_to_hermitian(np.eye(n), d)
    return re + 1j * im - np.eye(d) / d


def coords_to_matrix(x, d: int) -> np.ndarray:
    """I/d + sum x_i B_i as a complex matrix (or a batch)."""
    x = np.asarray(x, dtype=float)
    re, im = kernels.coords_to_hermitian(np.atleast_2d(x), d)
    H = re + 1j * im
    return H[0] if x.ndim == 1 else H


def matrix_to_coords(A) -> np.ndarray:
    """Inverse of :func:`coords_to_matrix` for a trace-one Hermitian matrix."""
    A = np.asarray(A, dtype=complex)
    d = A.shape[-1]
    B = gellmann_basis(d)
    return np.real(np.einsum("kij,...ji->...k", B, A))


def distance_to_statespace(x, d: Optional[int] = None) -> np.ndarray | float:
    """Distance from I/d + sum x_i B_i to S_d (coordinates of length d^2-1)."""
    x = np.asarray(x, dtype=float)
    if d is None:
        d = int(round(math.sqrt(x.shape[-1] + 1)))
    out = kernels.statespace_distances(np.atleast_2d(x), d)
    return float(out[0]) if x.ndim == 1 else out


def distance_to_cpolytope(x, d: int) -> np.ndarray | float:
    """Distance to P_d in R^{(d+1)(d-1)}, vertex ``(i, j)`` stored at row ``i*d + j``."""
    x = np.asarray(x, dtype=float)
    V = cpolytope.PolytopeModel(d).vertices
    out = kernels.polytope_distances(np.atleast_2d(x), V)
    return float(out[0]) if x.ndim == 1 else out


def _cone_distances(X: np.ndarray, R: float) -> np.ndarray:
    # closest point of {y >= 0, |y| <= R}: clip to the orthant, then pull onto the ball
    Y = np.maximum(X, 0.0)
    nrm = np.linalg.norm(Y, axis=1)
    scale = np.where(nrm > R, R / np.where(nrm > 0, nrm, 1.0), 1.0)
    return np.linalg.norm(X - Y * scale[:, None], axis=1)


# --- oracles -------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionOracle:
    """Distance oracle for a body contained in the origin-centred ball of radius ``circumradius``."""

    kind: OracleKind
    d: int
    ambient: int
    circumradius: float
    _dist: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    @property
    def body(self) -> Optional[Body]:
        return self.kind.body

    def distances(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.ambient:
            raise ValueError(f"expected points in R^{self.ambient}, got {X.shape[1]} coordinates")
        return self._dist(X)

    def steiner_truth(self) -> Optional[tuple]:
        """Closed-form (a_0, a_1, a_2, a_3), or None where no closed form is wired in."""
        D = self.ambient
        if self.kind is OracleKind.STATE_SPACE:
            t = statespace.intrinsic_table(self.d)
        elif self.kind is OracleKind.COMPLEMENTARITY_POLYTOPE:
            t = cpolytope.intrinsic_table(self.d)
        elif self.kind is OracleKind.BALL:
            r = self.circumradius
            return tuple(float(ball_volume(D)) * math.comb(D, k) * r ** (D - k) for k in range(4))
        else:
            return None
        return tuple(float(t.Vtilde(D - k)) for k in range(4))

    @classmethod
    def statespace(cls, d: int) -> "ProjectionOracle":
        if d < 2:
            raise ValueError("d must be >= 2")
        return cls(OracleKind.STATE_SPACE, d, d * d - 1, math.sqrt((d - 1) / d),
                   lambda X: kernels.statespace_distances(X, d))

    @classmethod
    def polytope(cls, d: int) -> "ProjectionOracle":
        if d < 2:
            raise ValueError("d must be >= 2")
        V = np.ascontiguousarray(cpolytope.PolytopeModel(d).vertices)
        return cls(OracleKind.COMPLEMENTARITY_POLYTOPE, d, V.shape[1],
                   math.sqrt((d - 1) / d), lambda X: kernels.polytope_distances(X, V))

    @classmethod
    def cone(cls, d: int, dim: int) -> "ProjectionOracle":
        if d < 2 or dim < 1:
            raise ValueError("need d >= 2 and dim >= 1")
        R = math.sqrt((d - 1) / d)
        return cls(OracleKind.SPHERICAL_CONE, d, dim, R, lambda X: _cone_distances(X, R))

    @classmethod
    def ball(cls, radius: float = 1.0 / math.sqrt(2.0), dim: int = 3) -> "ProjectionOracle":
        if radius <= 0 or dim < 1:
            raise ValueError("need radius > 0 and dim >= 1")
        return cls(OracleKind.BALL, 0, dim, float(radius),
                   lambda X: np.maximum(np.linalg.norm(X, axis=1) - radius, 0.0))

    @classmethod
    def for_body(cls, body: str, d: int, dim: Optional[int] = None) -> "ProjectionOracle":
        body = body.lower()
        if body == "statespace":
            return cls.statespace(d)
        if body == "polytope":
            return cls.polytope(d)
        if body == "cone":
            return cls.cone(d, d * d - 1 if dim is None else dim)
        if body == "ball":
            return cls.ball(math.sqrt((d - 1) / d), 3 if dim is None else dim)
        raise ValueError(f"unknown body {body!r}")


# --- estimation ------------------------------------------------------------------

@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    epsilon: float
    hits: int
    box_volume: float

    @property
    def hit_fraction(self) -> float:
        return self.hits / self.samples


def _philox_key(seed: int, stream: int) -> np.ndarray:
    return np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, stream]).generate_state(2, np.uint64)


def _block_points(key, block: int, count: int, n: int, radius: float) -> np.ndarray:
    bitgen = np.random.Philox(key=key, counter=np.array([0, 0, 0, block], dtype=np.uint64))
    rng = np.random.Generator(bitgen)
    g = rng.standard_normal((count, n))
    u = rng.random(count)
    g *= (radius * u ** (1.0 / n) / np.linalg.norm(g, axis=1))[:, None]
    return g


def estimate_neighborhood_volume(oracle: ProjectionOracle, epsilon: float, samples: int,
                                 seed: int, jobs: int = 1, stream: int = 0) -> MCEstimate:
    """Hit-or-miss estimate of vol(K_eps).

    ``stream`` separates independent estimates that share a seed (one per grid point).
    """
    if epsilon < 0 or not math.isfinite(epsilon):
        raise ValueError("epsilon must be finite and >= 0")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = oracle.ambient
    radius = oracle.circumradius + epsilon
    key = _philox_key(int(seed), int(stream))
    nblocks = -(-samples // BLOCK)

    def run(b: int) -> int:
        count = min(BLOCK, samples - b * BLOCK)
        X = _block_points(key, b, count, n, radius)
        return int(np.count_nonzero(oracle.distances(X) <= epsilon + HIT_TOL))

    if jobs > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hits = sum(pool.map(run, range(nblocks)))
    else:
        hits = sum(run(b) for b in range(nblocks))
    box = float(ball_volume(n)) * radius ** n
    p = hits / samples
    return MCEstimate(p * box, math.sqrt(p * (1.0 - p) / samples) * box, samples, int(seed),
                      float(epsilon), hits, box)


# --- Steiner fit -------------------------------------------------------------------

class IllConditionedFit(ArithmeticError):
    """The weighted design matrix is too close to singular."""


@dataclass
class SteinerFit:
    coefficients: np.ndarray      # a_0..a_3
    covariance: np.ndarray        # 4 x 4 block
    eps_grid: np.ndarray
    residual: float               # weighted chi^2 of the final fit
    degree: int
    all_coefficients: np.ndarray = field(repr=False)
    estimates: list = field(default_factory=list, repr=False)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))

    def predict(self, eps) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(eps, dtype=float), self.all_coefficients)

    def z_scores(self, truth: Sequence[float]) -> np.ndarray:
        return (self.coefficients - np.asarray(truth, dtype=float)) / self.stderr


def default_eps_grid(circumradius: float, points: int = 12, lo: float = 0.02,
                     hi: float = 0.5) -> np.ndarray:
    return np.geomspace(lo * circumradius, hi * circumradius, points)


def fit_steiner_from_estimates(estimates: Sequence[MCEstimate], ambient: int,
                               degree: Optional[int] = None) -> SteinerFit:
    """Inverse-variance weighted polynomial fit of vol(K_eps) against eps.

    Weights are refitted once from the smoothed curve so that they do not
    correlate with the noise of each point.
    """
    eps = np.array([e.epsilon for e in estimates], dtype=float)
    y = np.array([e.value for e in estimates], dtype=float)
    box = np.array([e.box_volume for e in estimates], dtype=float)
    N = np.array([e.samples for e in estimates], dtype=float)
    if len(np.unique(eps)) != len(eps):
        raise ValueError("grid values must be distinct")
    if degree is None:
        degree = min(ambient, len(eps) - 2)
    if degree < 3 or degree >= len(eps):
        raise ValueError("need at least degree+1 > 4 grid points")
    scale = float(eps.max())
    X = np.vander(eps / scale, degree + 1, increasing=True)

    def solve(p):
        # Laplace-adjusted fraction keeps weights finite when every sample hits (or misses)
        pa = np.clip(p, 1.0 / (N + 2.0), 1.0 - 1.0 / (N + 2.0))
        W = N / (pa * (1.0 - pa) * box ** 2)
        Xw = X * np.sqrt(W)[:, None]
        col = np.linalg.norm(Xw, axis=0)
        Xs = Xw / col
        cond = np.linalg.cond(Xs)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise IllConditionedFit(f"weighted design condition number {cond:.3g}")
        beta_s = np.linalg.lstsq(Xs, y * np.sqrt(W), rcond=None)[0]
        R = np.linalg.qr(Xs, mode="r")
        Rinv = np.linalg.inv(R)
        cov = (Rinv @ Rinv.T) / np.outer(col, col)
        return beta_s / col, cov, W

    beta, cov, W = solve(y / box)
    beta, cov, W = solve((X @ beta) / box)
    chi2 = float(np.sum(W * (y - X @ beta) ** 2))
    unscale = scale ** -np.arange(degree + 1, dtype=float)
    coeffs = beta * unscale
    cov = cov * np.outer(unscale, unscale)
    return SteinerFit(coeffs[:4].copy(), cov[:4, :4].copy(), eps, chi2, degree, coeffs,
                      list(estimates))


def fit_steiner_coefficients(oracle: ProjectionOracle, eps_grid=None, samples_per_point: int = 10 ** 6,
                             seed: int = 0, jobs: int = 1, degree: Optional[int] = None) -> SteinerFit:
    """Estimate vol(K_eps) on each grid point (independent streams) and fit a_0..a_3."""
    grid = default_eps_grid(oracle.circumradius) if eps_grid is None else np.asarray(eps_grid, float)
    if grid.ndim != 1 or len(grid) < 8:
        raise ValueError("need a grid of at least 8 epsilon values")
    if np.any(grid <= 0) or len(np.unique(grid)) != len(grid):
        raise ValueError("grid values must be distinct and positive")
    est = [estimate_neighborhood_volume(oracle, float(e), samples_per_point, seed, jobs, stream=i)
           for i, e in enumerate(grid)]
    return fit_steiner_from_estimates(est, oracle.ambient, degree)


__all__ = [
    "BLOCK", "HIT_TOL", "OracleKind", "ProjectionOracle", "MCEstimate", "SteinerFit", "IllConditionedFit",
    "project_to_probability_simplex", "gellmann_basis", "coords_to_matrix", "matrix_to_coords",
    "distance_to_statespace", "distance_to_cpolytope", "estimate_neighborhood_volume",
    "fit_steiner_from_estimates", "fit_steiner_coefficients", "default_eps_grid",
]
