"""The complementarity polytope P_d and its first four intrinsic volumes.

P_d is the convex hull of d+1 mutually orthogonal copies of a regular
(d-1)-simplex with edge sqrt(2), centred at the origin of R^{(d+1)(d-1)}.
A face is named by the vertex sets omitted from each copy,
``(S_1, ..., S_{d+1})``; it is a proper face iff every S_i is non-empty
and not all of them are the full index set.  Every face is a simplex.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .mathkernel import (Body, BodyDims, IntrinsicVolumeTable, LogReal, log_factorial,
                         normalize_table, spherical_triangle_area)
from .minnorm import min_norm_point


class FaceKind(enum.Enum):
    FACET = "facet"
    CODIM_TWO = "codim2"
    CODIM_THREE_TYPE1 = "codim3_type1"
    CODIM_THREE_TYPE2 = "codim3_type2"

    @property
    def codim(self) -> int:
        return {"facet": 1, "codim2": 2}.get(self.value, 3)


@dataclass(frozen=True)
class SimplexFrame:
    d: int
    vertices: np.ndarray
    inradius: float
    circumradius: float


def inradius(j: int) -> float:
    return 1.0 / math.sqrt(j * (j - 1))


def circumradius(j: int) -> float:
    return math.sqrt((j - 1) / j)


def build_simplex(d: int) -> SimplexFrame:
    """Origin-centred regular (d-1)-simplex with edge sqrt(2), lower-triangular coordinates."""
    BodyDims(d)
    V = np.zeros((d, d - 1))
    for row in range(d - 1):
        sub = row + 2  # coordinate row uses r_sub / R_sub
        V[0, row] = -inradius(sub)
        for j in range(2, d + 1):
            if sub == j:
                V[j - 1, row] = circumradius(sub)
            elif sub > j:
                V[j - 1, row] = -inradius(sub)
    return SimplexFrame(d, V, inradius(d), circumradius(d))


def det_M(k: int, d: int) -> float:
    """Determinant of the trailing (d-k) block of the simplex frame: prod_{j>k} R_j = sqrt(k/d)."""
    return math.sqrt(k / d)


def _normalize_descriptor(descriptor, d):
    out = tuple(frozenset(s) for s in descriptor)
    if len(out) != d + 1:
        raise ValueError(f"descriptor needs {d + 1} omitted-vertex sets")
    for s in out:
        if not s or not s <= set(range(d)):
            raise ValueError(f"omitted-vertex sets must be non-empty subsets of 0..{d - 1}")
    if all(len(s) == d for s in out):
        raise ValueError("descriptor omits every vertex")
    return out


def descriptor_codim(descriptor) -> int:
    """Codimension of F(S_1, ..., S_{d+1}) in P_d: sum |S_i| - d."""
    return sum(len(s) for s in descriptor) - (len(descriptor) - 1)


def descriptor_kind(descriptor) -> FaceKind:
    sizes = sorted((len(s) for s in descriptor), reverse=True)
    codim = descriptor_codim(descriptor)
    if codim == 1:
        return FaceKind.FACET
    if codim == 2:
        return FaceKind.CODIM_TWO
    if codim == 3:
        return FaceKind.CODIM_THREE_TYPE1 if sizes[0] == 3 else FaceKind.CODIM_THREE_TYPE2
    raise ValueError(f"no kind for codimension {codim}")


def representative(kind: FaceKind, d: int):
    """F(..) representatives: {1},{1},...; {1,2},{1},...; {1,2,3},{1},...; {1,2},{1,2},{1},..."""
    base = [frozenset({0})] * (d + 1)
    if kind is FaceKind.CODIM_TWO:
        base[0] = frozenset({0, 1})
    elif kind is FaceKind.CODIM_THREE_TYPE1:
        if d < 3:
            raise ValueError("codim-3 faces of type 1 need d >= 3")
        base[0] = frozenset({0, 1, 2})
    elif kind is FaceKind.CODIM_THREE_TYPE2:
        base[0] = base[1] = frozenset({0, 1})
    return tuple(base)


# --- descriptor formulas --------------------------------------------------

def descriptor_inverse_sq_distance(descriptor, d: int) -> float:
    """1/dist(0, F)^2 as the sum over blocks of 1/r(d, |S_i|)^2 (empty blocks skipped)."""
    total = 0.0
    for s in descriptor:
        k = len(s)
        if k < d:
            total += d * (d - k) / k
    return total


def descriptor_log_cone_volume(descriptor, d: int) -> float:
    """log vol(conv({0} u F)) = log(prod det M_{|S_i|} / (dim F + 1)!)."""
    D = d * d - 1
    n = D - descriptor_codim(descriptor) + 1
    logdet = sum(0.5 * math.log(len(s) / d) for s in descriptor if len(s) < d)
    return logdet - log_factorial(n)


def descriptor_log_face_volume(descriptor, d: int) -> float:
    D = d * d - 1
    n = D - descriptor_codim(descriptor) + 1
    return (math.log(n) + descriptor_log_cone_volume(descriptor, d)
            + 0.5 * math.log(descriptor_inverse_sq_distance(descriptor, d)))


# --- closed forms ----------------------------------------------------------

def closed_form_volume(d: int) -> LogReal:
    """sqrt(d)^(d+1) / (d^2-1)!"""
    BodyDims(d)
    return LogReal(1, 0.5 * (d + 1) * math.log(d) - log_factorial(d * d - 1))


def closed_form_surface(d: int) -> LogReal:
    """sqrt(d)^(d+2) sqrt(d^2-1) / (d^2-2)!"""
    BodyDims(d)
    return LogReal(1, 0.5 * (d + 2) * math.log(d) + 0.5 * math.log(d * d - 1)
                   - log_factorial(d * d - 2))


def face_counts(d: int) -> tuple:
    """(f_{D-2}, f^(1)_{D-3}, f^(2)_{D-3})."""
    BodyDims(d)
    f2 = (d + 1) * math.comb(d, 2) * d ** d
    f31 = (d + 1) * math.comb(d, 3) * d ** d
    f32 = math.comb(d + 1, 2) * d ** (d - 1) * math.comb(d, 2) ** 2
    return f2, f31, f32


def facet_count(d: int) -> int:
    return d ** (d + 1)


def angles(d: int) -> tuple:
    """(alpha, beta): angles between facet normals differing in one resp. two blocks."""
    BodyDims(d)
    alpha = math.acos(1.0 - d / (d * d - 1))
    beta = math.acos(1.0 - 2.0 * d / (d * d - 1))
    return alpha, beta


def face_origin_distance(kind: FaceKind, d: int) -> float:
    """Closed-form distance from the origin to the representative face of ``kind``."""
    BodyDims(d)
    if kind is FaceKind.FACET:
        sq = 1.0 / (d * (d - 1) * (d + 1))
    elif kind is FaceKind.CODIM_TWO:
        sq = 2.0 / (d * (2 * d * d - d - 2))
    elif kind is FaceKind.CODIM_THREE_TYPE1:
        if d < 3:
            raise ValueError("codim-3 faces of type 1 need d >= 3")
        sq = 1.0 / (d * (d * d - 2.0 * d / 3.0 - 1.0))
    else:
        sq = 1.0 / (d * (d * d - d - 1))
    return math.sqrt(sq)


def cone_volume_over_face(kind: FaceKind, d: int) -> LogReal:
    """vol(conv({0} u F)) from block determinants of the simplex frame."""
    BodyDims(d)
    D = d * d - 1
    half_log_d = 0.5 * (d + 1) * math.log(d)
    if kind is FaceKind.FACET:
        return LogReal(1, (d + 1) * math.log(det_M(1, d)) - log_factorial(D))
    if kind is FaceKind.CODIM_TWO:
        return LogReal(1, 0.5 * math.log(2) - log_factorial(D - 1) - half_log_d)
    if kind is FaceKind.CODIM_THREE_TYPE1:
        if d < 3:
            raise ValueError("codim-3 faces of type 1 need d >= 3")
        return LogReal(1, 0.5 * math.log(3) - log_factorial(D - 2) - half_log_d)
    return LogReal(1, math.log(2) - log_factorial(D - 2) - half_log_d)


def face_volume(kind: FaceKind, d: int) -> LogReal:
    """(dim F + 1) * cone volume / distance."""
    D = d * d - 1
    n = D - kind.codim + 1
    return cone_volume_over_face(kind, d) * n / face_origin_distance(kind, d)


def normal_cone_measures(d: int) -> tuple:
    """vol_k(N(F) n B^k) for the codim-2 face and both codim-3 face types.

    The codim-3 cones are a spherical equilateral triangle with side alpha
    and a quadrilateral split into two (alpha, alpha, beta) triangles;
    the cone over a spherical region of area A has volume A/3.
    """
    alpha, beta = angles(d)
    m2 = 0.5 * alpha
    m31 = spherical_triangle_area(alpha, alpha, alpha) / 3.0
    m32 = 2.0 * spherical_triangle_area(alpha, alpha, beta) / 3.0
    return m2, m31, m32


def normal_cone_measures_arctan(d: int) -> tuple:
    """The same measures written with the half-angle tangent products expanded."""
    a, b = angles(d)
    m31 = 4.0 / 3.0 * math.atan(math.sqrt(math.tan(0.75 * a) * math.tan(0.25 * a) ** 3))
    m32 = 8.0 / 3.0 * math.atan(math.sqrt(
        math.tan(0.5 * a + 0.25 * b) * math.tan(0.5 * a - 0.25 * b) * math.tan(0.25 * b) ** 2))
    return 0.5 * a, m31, m32


def vtilde_Dm2(d: int) -> LogReal:
    """Unnormalized V_{D-2}(P_d)."""
    BodyDims(d)
    alpha, _ = angles(d)
    return LogReal(1, 0.5 * math.log(2 * d * d - d - 2) + math.log(d * d - 1)
                   + (0.5 * d + 1) * math.log(d) + math.log(alpha)
                   - math.log(4) - log_factorial(d * d - 3))


def vtilde_Dm3(d: int) -> LogReal:
    """Unnormalized V_{D-3}(P_d); the type-1 term vanishes at d = 2."""
    BodyDims(d)
    _, m31, m32 = normal_cone_measures_arctan(d)
    t1 = 0.75 * m31  # arctan(...) = (3/4) m31
    t2 = 0.375 * m32  # arctan(...) = (3/8) m32
    lf = log_factorial(d * d - 4)
    second = LogReal(1, math.log(2) + 0.5 * math.log(d * d - d - 1) + math.log(d * d - 1)
                     + math.log(d - 1) + (0.5 * d + 2) * math.log(d) + math.log(t2)
                     - math.log(3) - lf)
    if d == 2:
        return second
    first = LogReal(1, math.log(2) + 0.5 * math.log(3 * d * d - 2 * d - 3) + math.log(d * d - 1)
                    + math.log(d - 2) + (0.5 * d + 1) * math.log(d) + math.log(t1)
                    - math.log(9) - lf)
    return first + second


@dataclass(frozen=True)
class FaceData:
    kind: FaceKind
    count: int
    face_volume: LogReal
    origin_distance: float
    normal_cone_measure: float


def face_table(d: int) -> list:
    """FaceData for facets, codim-2 faces and (for d >= 3) both codim-3 kinds."""
    f2, f31, f32 = face_counts(d)
    m2, m31, m32 = normal_cone_measures(d)
    rows = [FaceData(FaceKind.FACET, facet_count(d), face_volume(FaceKind.FACET, d),
                     face_origin_distance(FaceKind.FACET, d), 1.0),
            FaceData(FaceKind.CODIM_TWO, f2, face_volume(FaceKind.CODIM_TWO, d),
                     face_origin_distance(FaceKind.CODIM_TWO, d), m2)]
    if d >= 3:
        rows.append(FaceData(FaceKind.CODIM_THREE_TYPE1, f31,
                             face_volume(FaceKind.CODIM_THREE_TYPE1, d),
                             face_origin_distance(FaceKind.CODIM_THREE_TYPE1, d), m31))
    rows.append(FaceData(FaceKind.CODIM_THREE_TYPE2, f32, face_volume(FaceKind.CODIM_THREE_TYPE2, d),
                         face_origin_distance(FaceKind.CODIM_THREE_TYPE2, d), m32))
    return rows


def assemble_vtilde(d: int, codim: int) -> LogReal:
    """Sum over face kinds of count * face volume * normal-cone measure."""
    total = LogReal.zero()
    for row in face_table(d):
        if row.kind.codim == codim:
            total = total + row.face_volume * row.count * row.normal_cone_measure
    return total


def intrinsic_table(d: int) -> IntrinsicVolumeTable:
    dims = BodyDims(d)
    D = dims.D
    raw = {D: closed_form_volume(d), D - 1: closed_form_surface(d),
           D - 2: vtilde_Dm2(d), D - 3: vtilde_Dm3(d)}
    return normalize_table(raw, dims, Body.COMPLEMENTARITY_POLYTOPE)


# --- explicit model --------------------------------------------------------

class PolytopeModel:
    """Explicit coordinates of P_d; vertex (i, j) = e_i (x) v_j is row ``i*d + j``."""

    def __init__(self, d: int):
        self.dims = BodyDims(d)
        self.d = d
        self.D = self.dims.D
        self.simplex = build_simplex(d)

    @cached_property
    def vertices(self) -> np.ndarray:
        d = self.d
        V = np.zeros(((d + 1) * d, self.D))
        for i in range(d + 1):
            V[i * d:(i + 1) * d, i * (d - 1):(i + 1) * (d - 1)] = self.simplex.vertices
        return V

    @property
    def circumradius(self) -> float:
        return self.simplex.circumradius

    def face_vertex_indices(self, descriptor) -> list:
        desc = _normalize_descriptor(descriptor, self.d)
        return [i * self.d + j for i, s in enumerate(desc) for j in range(self.d) if j not in s]

    def face_vertices(self, descriptor) -> np.ndarray:
        return self.vertices[self.face_vertex_indices(descriptor)]

    def facet_normal(self, js) -> np.ndarray:
        """Outer unit normal of the facet omitting vertex js[i] from block i."""
        d = self.d
        u = -self.simplex.vertices / self.simplex.circumradius
        w = np.zeros(self.D)
        for i, j in enumerate(js):
            w[i * (d - 1):(i + 1) * (d - 1)] = u[j]
        return w / math.sqrt(d + 1)

    def enumerate_faces(self, codim: int, allow_large: bool = False):
        """All descriptors of the given codimension (only d <= 3 unless forced)."""
        d = self.d
        if d > 3 and not allow_large:
            raise ValueError("full face enumeration is limited to d <= 3")
        subsets_by_size = {k: [frozenset(c) for c in itertools.combinations(range(d), k)]
                           for k in range(1, d + 1)}
        target = d + codim
        for sizes in itertools.product(range(1, d + 1), repeat=d + 1):
            if sum(sizes) != target or all(s == d for s in sizes):
                continue
            for combo in itertools.product(*(subsets_by_size[s] for s in sizes)):
                yield combo

    def numeric_origin_distance(self, descriptor, tol: float = 1e-11,
                                max_iter: int = 100_000) -> float:
        """Distance from the origin to the face, by min-norm iteration over its vertices."""
        x, _, _ = min_norm_point(self.face_vertices(descriptor), tol=tol, max_iter=max_iter)
        return float(np.linalg.norm(x))

    def numeric_face_volume(self, descriptor) -> float:
        """Simplex volume from the Gram determinant of edge vectors."""
        P = self.face_vertices(descriptor)
        E = P[1:] - P[0]
        k = E.shape[0]
        G = E @ E.T
        sign, logdet = np.linalg.slogdet(G)
        if k == 0:
            return 1.0
        return math.exp(0.5 * logdet - log_factorial(k))

    def numeric_cone_volume(self, descriptor) -> float:
        P = self.face_vertices(descriptor)
        _, logdet = np.linalg.slogdet(P @ P.T)
        return math.exp(0.5 * logdet - log_factorial(P.shape[0]))

    def containing_facets(self, descriptor):
        """Facet index tuples js with js[i] in S_i for all i."""
        desc = _normalize_descriptor(descriptor, self.d)
        return list(itertools.product(*(sorted(s) for s in desc)))


def polytope_table(d: int) -> IntrinsicVolumeTable:
    return intrinsic_table(d)
