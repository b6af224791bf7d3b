"""Trivial-requirement checks on prescribed overlap matrices and the
spherical-cone exclusion analysis.

A prescription ``M[j, k] = |<psi_j, psi_k>|^2`` for n unit vectors in C^d
can only be realised if ``G = M - J/d`` is the Gram matrix of n vectors of
squared length ``1 - 1/d`` spanning at most ``d^2 - 1`` dimensions.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import cpolytope, statespace
from .mathkernel import LogReal, ball_volume, BodyDims

TOL_PSD = 1e-9
TOL_RANK = 1e-8


class PrescriptionError(ValueError):
    """Malformed prescription input."""


@dataclass
class PrescriptionMatrix:
    d: int
    M: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        if self.M.ndim != 2 or self.M.shape[0] != self.M.shape[1]:
            raise PrescriptionError(f"M must be square, got shape {self.M.shape}")
        if not np.all(np.isfinite(self.M)):
            raise PrescriptionError("M has non-finite entries")
        if not np.allclose(self.M, self.M.T, rtol=0.0, atol=1e-12):
            raise PrescriptionError("M must be symmetric")
        if int(self.d) != self.d or self.d < 2:
            raise PrescriptionError(f"d must be an integer >= 2, got {self.d!r}")

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def G(self) -> np.ndarray:
        return self.M - np.full_like(self.M, 1.0 / self.d)


@dataclass
class GramReport:
    n: int
    d: int
    diag_ok: bool
    nonneg_ok: bool
    psd_ok: bool
    min_eigenvalue: float
    psd_threshold: float
    rank: int
    rank_threshold: float
    rank_ok: bool
    sum_total: float
    sum_bound: float
    sum_ok: bool
    gram_vectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def all_ok(self) -> bool:
        return self.diag_ok and self.nonneg_ok and self.psd_ok and self.rank_ok and self.sum_ok

    def failures(self) -> list:
        names = [("diag", self.diag_ok), ("nonneg", self.nonneg_ok), ("psd", self.psd_ok),
                 ("rank", self.rank_ok), ("sum_bound", self.sum_ok)]
        return [n for n, ok in names if not ok]

    def to_dict(self, include_vectors: bool = False) -> dict:
        out = {
            "schema": "qgeom/1",
            "kind": "gram_report",
            "n": self.n,
            "d": self.d,
            "diag_ok": self.diag_ok,
            "nonneg_ok": self.nonneg_ok,
            "psd_ok": self.psd_ok,
            "min_eigenvalue": self.min_eigenvalue,
            "psd_threshold": self.psd_threshold,
            "rank": self.rank,
            "rank_threshold": self.rank_threshold,
            "rank_ok": self.rank_ok,
            "sum_bound": {"total": self.sum_total, "bound": self.sum_bound, "ok": self.sum_ok},
            "all_ok": self.all_ok,
            "failures": self.failures(),
        }
        if include_vectors and self.gram_vectors is not None:
            out["gram_vectors"] = self.gram_vectors.tolist()
        return out


def sum_bound(p: PrescriptionMatrix, tol: float = 1e-9) -> tuple:
    """(sum of M, n^2/d, sum >= n^2/d - tol)."""
    total = float(np.sum(p.M))
    bound = p.n * p.n / p.d
    return total, bound, total >= bound - tol * max(1.0, bound)


def check_trivial_requirements(p: PrescriptionMatrix, tol_psd: float = TOL_PSD,
                               tol_rank: float = TOL_RANK, entry_tol: float = 1e-12) -> GramReport:
    G = p.G
    n = p.n
    diag_ok = bool(np.all(np.abs(np.diag(p.M) - 1.0) <= entry_tol))
    nonneg_ok = bool(np.all(p.M >= -entry_tol))
    evals, evecs = np.linalg.eigh(G)
    lam_min = float(evals[0])
    scale = float(np.max(np.abs(G))) if n else 0.0
    psd_threshold = -tol_psd * n * scale
    psd_ok = lam_min >= psd_threshold
    lam_max = float(evals[-1])
    rank_threshold = tol_rank * lam_max if lam_max > 0 else 0.0
    rank = int(np.sum(evals > rank_threshold)) if lam_max > 0 else 0
    rank_ok = rank <= p.d * p.d - 1
    total, bound, sum_ok = sum_bound(p)
    vectors = None
    if psd_ok:
        keep = evals > rank_threshold
        vectors = evecs[:, keep] * np.sqrt(evals[keep])
    return GramReport(n, p.d, diag_ok, nonneg_ok, psd_ok, lam_min, psd_threshold, rank,
                      rank_threshold, rank_ok, total, bound, sum_ok, vectors)


def structured_spectrum(a: float, b: float, n: int) -> tuple:
    """Eigenvalues of aI + bJ (n x n): a + nb once and a with multiplicity n-1."""
    return a + n * b, a


# --- generators -----------------------------------------------------------

def sic_prescription(d: int) -> PrescriptionMatrix:
    n = d * d
    M = np.full((n, n), 1.0 / (d + 1))
    np.fill_diagonal(M, 1.0)
    return PrescriptionMatrix(d, M, f"SIC({d})")


def mub_prescription(d: int) -> PrescriptionMatrix:
    n = d * (d + 1)
    M = np.full((n, n), 1.0 / d)
    for r in range(d + 1):
        M[r * d:(r + 1) * d, r * d:(r + 1) * d] = np.eye(d)
    return PrescriptionMatrix(d, M, f"MUB({d})")


def ortho_prescription(d: int, n: int) -> PrescriptionMatrix:
    return PrescriptionMatrix(d, np.eye(n), f"OrthoSet({d},{n})")


def generate_prescription(kind: str, d: int, n: Optional[int] = None) -> PrescriptionMatrix:
    kind = kind.lower()
    if kind == "sic":
        return sic_prescription(d)
    if kind == "mub":
        return mub_prescription(d)
    if kind in ("ortho", "orthoset"):
        return ortho_prescription(d, d if n is None else n)
    raise ValueError(f"unknown prescription kind {kind!r}")


# --- I/O --------------------------------------------------------------------

def load_prescription(path, d: Optional[int] = None) -> PrescriptionMatrix:
    """Read ``{"d": int, "M": [[...]]}`` JSON or a square CSV grid (``d`` required)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PrescriptionError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PrescriptionError(f"malformed JSON in {path}: {exc}") from exc
        if not isinstance(obj, dict) or "M" not in obj:
            raise PrescriptionError('JSON prescription needs an "M" field')
        dd = obj.get("d", d)
        if dd is None:
            raise PrescriptionError('JSON prescription needs "d" (or pass --d)')
        try:
            M = np.array(obj["M"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise PrescriptionError(f"M is not a numeric matrix: {exc}") from exc
        return PrescriptionMatrix(int(dd), M, path.stem)
    if d is None:
        raise PrescriptionError("CSV prescriptions need d supplied separately")
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    try:
        M = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise PrescriptionError(f"non-numeric CSV entry: {exc}") from exc
    return PrescriptionMatrix(d, M, path.stem)


# --- spherical cones ---------------------------------------------------------

@dataclass(frozen=True)
class ConeFamily:
    d: int
    k: int

    def __post_init__(self):
        BodyDims(self.d)
        if not 0 <= self.k <= 3:
            raise ValueError("k must be in 0..3")

    @property
    def dim(self) -> int:
        return self.d * self.d - 1 - self.k

    @property
    def circumradius(self) -> float:
        return math.sqrt((self.d - 1) / self.d)


def cone_intrinsic_volume(f: ConeFamily) -> LogReal:
    """Top intrinsic volume (= volume) of the positive-orthant part of the radius-R_d ball."""
    n = f.dim
    return ball_volume(n) * LogReal(1, n * math.log(f.circumradius) - n * math.log(2.0))


def _statespace_V(d: int):
    t = statespace.intrinsic_table(d)
    D = d * d - 1
    return {k: t.V(D - k) for k in range(4)}


@dataclass(frozen=True)
class ExclusionRow:
    k: int
    N: int
    cone: LogReal
    state: LogReal
    excluded: bool


def exclusion_report(d: int) -> list:
    """Compare V_{D-k}(C_{d,D-k}) with V_{D-k}(S_d); excluded iff the cone is strictly larger."""
    S = _statespace_V(d)
    rows = []
    for k in range(4):
        c = cone_intrinsic_volume(ConeFamily(d, k))
        rows.append(ExclusionRow(k, d * d - 1 - k, c, S[k], c > S[k]))
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    N: int
    polytope: LogReal
    state: LogReal
    ratio: LogReal
    flagged: bool


def compare_polytope_statespace(d: int, rel_slack: float = 1e-12) -> list:
    """V_N(P_d) against V_N(S_d); a row is flagged when the polytope exceeds the state space.

    ``rel_slack`` absorbs rounding in the exact tie V_0 = 1 at d = 2.
    """
    P = cpolytope.intrinsic_table(d)
    S = statespace.intrinsic_table(d)
    rows = []
    for N in P.orders():
        ratio = P.V(N) / S.V(N)
        rows.append(ComparisonRow(N, P.V(N), S.V(N), ratio, ratio.logmag > math.log1p(rel_slack)))
    return rows
