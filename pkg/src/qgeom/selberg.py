"""Selberg-type integrals of Laguerre type and their simplex versions.

The closed forms are checked against :func:`simplex_quadrature`, a brute
force integrator over the standard simplex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathkernel import LogReal, log_gamma


@dataclass(frozen=True)
class SelbergParams:
    """Parameters of ``int x_1^2..x_k^2 x_{k+1}..x_m prod x_i^(alpha-1) prod (x_i-x_j)^(2 gamma)``.

    ``n = 1`` is accepted as the degenerate one-variable case (no
    Vandermonde factor); it shows up in the d=2 state-space assembly.
    """

    n: int
    alpha: float
    gamma: float
    k: int = 0
    m: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha!r}")
        if self.n > 1:
            bound = -min(1.0 / self.n, self.alpha / (self.n - 1))
            if not self.gamma > bound:
                raise ValueError(f"gamma must exceed {bound}, got {self.gamma!r}")
        if not (0 <= self.k <= self.m <= self.n):
            raise ValueError(f"need 0 <= k <= m <= n, got k={self.k}, m={self.m}, n={self.n}")

    @property
    def degree(self) -> float:
        """Homogeneity degree of the integrand."""
        n, a, g = self.n, self.alpha, self.gamma
        return self.m + self.k + n * (a - 1.0 + g * (n - 1))


def _log_bare_selberg(n: int, alpha: float, gamma: float) -> float:
    total = 0.0
    for j in range(n):
        total += log_gamma(1.0 + (1 + j) * gamma) + log_gamma(alpha + j * gamma) - log_gamma(1.0 + gamma)
    return total


def _moment_prefactor(p: SelbergParams) -> LogReal:
    # empty products (k = 0, m = 0) are 1
    out = LogReal.one()
    n, a, g = p.n, p.alpha, p.gamma
    for j in range(1, p.k + 1):
        out = out * (a + 1.0 + g * (2 * n - p.m - j))
    for j in range(1, p.m + 1):
        out = out * (a + g * (n - j))
    return out


def selberg_laguerre(p: SelbergParams) -> LogReal:
    """``int_{[0,inf)^n} x_1^2..x_k^2 x_{k+1}..x_m Phi(x) dx`` in closed form."""
    return _moment_prefactor(p) * LogReal(1, _log_bare_selberg(p.n, p.alpha, p.gamma))


def simplex_integral_via_exponential(h_degree: float, exponential_value: LogReal, n: int) -> LogReal:
    """Convert ``int_{[0,inf)^n} e^{-sum x} h`` into ``int_{simplex} h``.

    For ``h`` homogeneous of degree ``h_degree`` the two differ by the factor
    ``sqrt(n) / Gamma(n + h_degree)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h_degree < 0:
        raise ValueError("homogeneity degree must be >= 0")
    exponential_value = LogReal._coerce(exponential_value)
    return exponential_value * LogReal(1, 0.5 * math.log(n) - log_gamma(n + h_degree))


def simplex_selberg(p: SelbergParams) -> LogReal:
    """Selberg-type integral over the standard simplex in R^n (induced measure)."""
    log_den = log_gamma(p.m + p.k + p.n * (p.alpha + p.gamma * (p.n - 1)))
    log_val = 0.5 * math.log(p.n) - log_den + _log_bare_selberg(p.n, p.alpha, p.gamma)
    return _moment_prefactor(p) * LogReal(1, log_val)


# --- brute-force oracle ---------------------------------------------------

def selberg_integrand(p: SelbergParams, x: np.ndarray) -> np.ndarray:
    """Evaluate the integrand at points ``x`` of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape[:-1])
    n = p.n
    for i in range(p.k):
        out *= x[..., i] ** 2
    for i in range(p.k, p.m):
        out *= x[..., i]
    if p.alpha != 1.0:
        out *= np.prod(x ** (p.alpha - 1.0), axis=-1)
    if p.gamma != 0.0:
        for i in range(n):
            for j in range(i + 1, n):
                out *= np.abs(x[..., i] - x[..., j]) ** (2.0 * p.gamma)
    return out


def _collapsed_nodes(n: int, order: int):
    """Gauss-Legendre nodes on the simplex in R^n via collapsed coordinates.

    Returns points (N, n) and weights (N,) for the induced (n-1)-dim measure.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    pts = np.ones((1, 1))
    wts = np.ones(1)
    # x_1 = u_1, x_2 = (1-u_1) u_2, ..., x_n = remaining mass
    rem = np.ones(1)
    coords = np.zeros((1, 0))
    for _ in range(n - 1):
        u = t[None, :]
        new = rem[:, None] * u
        wts = (wts[:, None] * w[None, :] * rem[:, None]).ravel()
        coords = np.concatenate(
            [np.repeat(coords, order, axis=0), new.reshape(-1, 1)], axis=1)
        rem = (rem[:, None] * (1.0 - u)).ravel()
    pts = np.concatenate([coords, rem[:, None]], axis=1)
    return pts, wts * math.sqrt(n)


def simplex_quadrature(func, n: int, order: int = 24) -> float:
    """Integrate ``func(points)`` over the standard simplex in R^n.

    Tensor Gauss-Legendre in collapsed coordinates; exact for polynomials of
    degree < 2*order - n + 1 in each collapsed variable.
    """
    if n == 1:
        return float(func(np.ones((1, 1)))[0])
    pts, wts = _collapsed_nodes(n, order)
    return float(np.dot(wts, func(pts)))


def simplex_monte_carlo(func, n: int, samples: int = 10_000_000, seed: int = 0,
                        chunk: int = 1_000_000):
    """Monte-Carlo integral over the standard simplex; returns (value, stderr)."""
    rng = np.random.default_rng(seed)
    vol = math.sqrt(n) / math.factorial(n - 1)
    s1 = 0.0
    s2 = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = rng.dirichlet(np.ones(n), size=m)
        f = func(x)
        s1 += float(f.sum())
        s2 += float((f * f).sum())
        done += m
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return vol * mean, vol * math.sqrt(var / samples)


def selberg_oracle(p: SelbergParams, order: int | None = None, samples: int = 10_000_000, seed: int = 0,
                   method: str = "auto"):
    """Numerical value of :func:`simplex_selberg` for small ``n``.

    ``method="auto"`` uses collapsed Gauss-Legendre quadrature (exact for the
    polynomial integrands with integer parameters) up to n = 4; ``"mc"`` forces
    Dirichlet-sampling Monte Carlo.  Returns (value, stderr); stderr is 0 for
    quadrature.
    """
    f = lambda x: selberg_integrand(p, x)
    if p.n > 4:
        raise ValueError("oracle only supports n <= 4")
    if method == "mc":
        return simplex_monte_carlo(f, p.n, samples, seed)
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if order is None:
        # collapsed variables carry the total degree plus the Jacobian powers
        order = max(24, math.ceil((p.k + p.m + p.n * (p.alpha - 1) + p.gamma * p.n * (p.n - 1)
                                   + p.n) / 2) + 2)
    return simplex_quadrature(f, p.n, order), 0.0
