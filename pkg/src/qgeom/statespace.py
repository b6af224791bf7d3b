"""Closed-form intrinsic volumes of the quantum state space S_d.

S_d is the set of d x d density matrices with the Hilbert-Schmidt metric,
a convex body of dimension D = d^2 - 1.  The four lowest Steiner
coefficients of its epsilon-neighbourhood have closed forms in terms of
products Gamma(1)...Gamma(d); the last two are reassembled here from
simplex Selberg integrals as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .mathkernel import (Body, BodyDims, IntrinsicVolumeTable, LogReal, ball_volume,
                         log_gamma, log_gamma_product, normalize_table)
from .selberg import SelbergParams, simplex_selberg

_LOG_2PI = math.log(2.0 * math.pi)


def _check_d(d: int) -> BodyDims:
    return BodyDims(d)


def _log_unitary_orbit(d: int) -> float:
    return 0.5 * d * (d - 1) * _LOG_2PI


def flag_manifold_volume(d: int) -> LogReal:
    """Volume of U(d)/U(1)^d: ``(2 pi)^(d(d-1)/2) / (1! 2! ... (d-1)!)``."""
    _check_d(d)
    return LogReal(1, _log_unitary_orbit(d) - log_gamma_product(2, d))


def volume(d: int) -> LogReal:
    """vol_D(S_d) = sqrt(d) (2pi)^(d(d-1)/2) Gamma(1)...Gamma(d) / Gamma(d^2)."""
    _check_d(d)
    return LogReal(1, 0.5 * math.log(d) + _log_unitary_orbit(d)
                   + log_gamma_product(1, d) - log_gamma(d * d))


def surface(d: int) -> LogReal:
    """vol_{D-1}(boundary S_d)."""
    _check_d(d)
    return LogReal(1, 0.5 * math.log(d - 1) + _log_unitary_orbit(d)
                   + log_gamma_product(1, d + 1) - log_gamma(d) - log_gamma(d * d - 1))


def p2_at_zero(d: int) -> LogReal:
    """Second derivative at 0 of eps -> vol_D(S_{d,eps})."""
    _check_d(d)
    return LogReal(1, math.log(d - 1) + 1.5 * math.log(d) + _log_unitary_orbit(d)
                   + log_gamma_product(1, d) - log_gamma(d * d - 2))


def p3_at_zero(d: int) -> LogReal:
    """Third derivative at 0 of eps -> vol_D(S_{d,eps})."""
    _check_d(d)
    return LogReal(1, math.log(d) + 1.5 * math.log(d - 1) + _log_unitary_orbit(d)
                   + log_gamma_product(1, d + 1) - log_gamma(d) - log_gamma(d * d - 3))


@dataclass(frozen=True)
class StateSpaceVolumes:
    dims: BodyDims
    vol_D: LogReal
    surface: LogReal
    p2_at_0: LogReal
    p3_at_0: LogReal
    table: IntrinsicVolumeTable


def intrinsic_table(d: int) -> IntrinsicVolumeTable:
    """V_N and unnormalized V_N of S_d for N = D, D-1, D-2, D-3."""
    dims = _check_d(d)
    D = dims.D
    raw = {
        D: volume(d),
        D - 1: surface(d),
        # Steiner coefficient a_k = p^(k)(0) / k!
        D - 2: p2_at_zero(d) / 2,
        D - 3: p3_at_zero(d) / 6,
    }
    return normalize_table(raw, dims, Body.STATE_SPACE)


def statespace_volumes(d: int) -> StateSpaceVolumes:
    dims = _check_d(d)
    return StateSpaceVolumes(dims, volume(d), surface(d), p2_at_zero(d), p3_at_zero(d),
                             intrinsic_table(d))


# --- Selberg reassembly -------------------------------------------------

def volume_via_selberg(d: int) -> LogReal:
    """vol(S_d) = (1/d!) flag_vol * int_{simplex} prod (x_i - x_j)^2."""
    _check_d(d)
    inner = simplex_selberg(SelbergParams(d, 1.0, 1.0, 0, 0))
    return flag_manifold_volume(d) * inner / math.factorial(d)


def p2_via_selberg(d: int) -> LogReal:
    """Second derivative rebuilt from the facet integral of the eigenvalue density."""
    _check_d(d)
    facet = simplex_selberg(SelbergParams(d - 1, 2.0, 1.0, 0, d - 2))
    factor = d * 2.0 * math.sqrt(d * (d - 1))
    return flag_manifold_volume(d) * facet * factor / math.factorial(d)


def p3_via_selberg(d: int) -> LogReal:
    """Third derivative rebuilt from two facet Selberg integrals.

    The second integral carries the factor (d - 2) and is skipped at d = 2,
    where its parameters would also be out of range.
    """
    _check_d(d)
    total = 2.0 * d * simplex_selberg(SelbergParams(d - 1, 1.0, 1.0, d - 2, d - 2))
    if d > 2:
        total = total + 4.0 * d * (d - 2) * simplex_selberg(SelbergParams(d - 1, 2.0, 1.0, 0, d - 3))
    return flag_manifold_volume(d) * total * d / math.factorial(d)


# --- eigenvalue density ---------------------------------------------------

def eigen_density(x) -> float:
    """f_d(x) = prod_{i<j} (x_i - x_j)^2, the eigenvalue density on the simplex."""
    x = np.asarray(x, dtype=float)
    out = 1.0
    for i, j in combinations(range(x.shape[-1]), 2):
        out = out * (x[..., i] - x[..., j]) ** 2
    return out


def bloch_ball_table() -> dict:
    """Intrinsic volumes of the 3-ball of radius 1/sqrt(2), i.e. of S_2."""
    r = 1.0 / math.sqrt(2.0)
    return {3: 4.0 / 3.0 * math.pi * r ** 3, 2: 2.0 * math.pi * r * r, 1: 4.0 * r, 0: 1.0}


# Full Steiner polynomial vol_8(S_{3,eps}) as published (coefficients of eps^0..eps^8).
# Only the constant term disagrees with the volume formula: it carries 5040 where
# the closed form gives 2520.  Both versions are kept.
_PI3, _PI4 = math.pi ** 3, math.pi ** 4
_S3, _S2 = math.sqrt(3.0), math.sqrt(2.0)
PUBLISHED_D3_STEINER = (
    _S3 * _PI3 / 5040, _S2 * _PI3 / 105, _PI3 / (5 * _S3), 2 * _S2 * _PI3 / 5,
    _S3 * _PI3 / 4 + _PI4 / 3, 3 * _PI3 / _S2, 3 * _S3 * _PI3 / 8 + _PI4 / 3,
    18 * _S2 * _PI3 / 35, _PI4 / 24,
)
D3_STEINER = (_S3 * _PI3 / 2520,) + PUBLISHED_D3_STEINER[1:]


def d3_neighbourhood_volume(eps: float, published: bool = False) -> float:
    """vol_8 of the eps-neighbourhood of S_3 from the stored polynomial."""
    coeffs = PUBLISHED_D3_STEINER if published else D3_STEINER
    return math.fsum(c * eps ** k for k, c in enumerate(coeffs))


__all__ = [
    "StateSpaceVolumes", "flag_manifold_volume", "volume", "surface", "p2_at_zero",
    "p3_at_zero", "PUBLISHED_D3_STEINER", "D3_STEINER",
    "d3_neighbourhood_volume", "intrinsic_table", "statespace_volumes", "volume_via_selberg",
    "p2_via_selberg", "p3_via_selberg", "eigen_density", "bloch_ball_table", "ball_volume",
]
