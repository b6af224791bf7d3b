import math

import numpy as np
import pytest
from scipy.optimize import minimize

from qgeom import montecarlo as mc, statespace
from qgeom.cpolytope import FaceKind, PolytopeModel, face_origin_distance


# --- projections -----------------------------------------------------------------

def test_simplex_projection_examples():
    assert np.allclose(mc.project_to_probability_simplex([1 / 3] * 3), [1 / 3] * 3)
    assert np.allclose(mc.project_to_probability_simplex([2.0, 0.0, 0.0]), [1, 0, 0])
    y = mc.project_to_probability_simplex([2.0, -1.0])
    assert np.allclose(y, [1, 0]) and np.linalg.norm(np.array([2, -1]) - y) == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        mc.project_to_probability_simplex([np.nan, 1.0])


def test_simplex_projection_vs_qp():
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = rng.normal(size=4) * 2
        cons = [{"type": "eq", "fun": lambda y: y.sum() - 1}]
        res = minimize(lambda y: np.sum((y - x) ** 2), np.full(4, 0.25), bounds=[(0, None)] * 4,
                       constraints=cons, method="SLSQP", options={"ftol": 1e-14})
        assert np.allclose(mc.project_to_probability_simplex(x), res.x, atol=1e-6)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_basis_orthonormal(d):
    B = mc.gellmann_basis(d)
    G = np.einsum("aij,bji->ab", B, B)
    assert np.allclose(G, np.eye(d * d - 1), atol=1e-14)
    assert np.allclose(np.trace(B, axis1=1, axis2=2), 0)
    assert np.allclose(B, B.conj().transpose(0, 2, 1))
    x = np.random.default_rng(d).normal(size=d * d - 1)
    assert np.allclose(mc.matrix_to_coords(mc.coords_to_matrix(x, d)), x)


def test_statespace_distance_examples():
    for d in (2, 3, 5):
        assert mc.distance_to_statespace(np.zeros(d * d - 1), d) == pytest.approx(0, abs=1e-15)
    x = mc.matrix_to_coords(np.diag([2.0, -1.0]))
    assert mc.distance_to_statespace(x) == pytest.approx(math.sqrt(2), abs=1e-12)
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        assert mc.distance_to_statespace(mc.matrix_to_coords(rho), d) == pytest.approx(0, abs=1e-12)
        n = rho - np.eye(d) / d
        n /= np.linalg.norm(n)
        for eps in (1e-3, 0.1, 0.7):
            x = mc.matrix_to_coords(rho + eps * n)
            assert abs(mc.distance_to_statespace(x, d) - eps) <= 1e-12


def _closest_state(x, d):
    H = mc.coords_to_matrix(x, d)
    lam, U = np.linalg.eigh(H)
    p = mc.project_to_probability_simplex(lam)
    return mc.matrix_to_coords((U * p) @ U.conj().T)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_statespace_idempotent_and_lipschitz(d):
    rng = np.random.default_rng(20 + d)
    X = rng.normal(size=(200, d * d - 1))
    P = np.array([_closest_state(x, d) for x in X])
    assert np.max(mc.distance_to_statespace(P, d)) <= 1e-9
    dX = mc.distance_to_statespace(X, d)
    assert np.allclose(dX, np.linalg.norm(X - P, axis=1), atol=1e-10)
    Y = X + rng.normal(size=X.shape) * 0.3
    assert np.all(np.abs(dX - mc.distance_to_statespace(Y, d)) <= np.linalg.norm(X - Y, axis=1) + 1e-12)


def test_polytope_distance_examples():
    for d in (2, 3):
        m = PolytopeModel(d)
        assert mc.distance_to_cpolytope(np.zeros(m.D), d) == pytest.approx(0, abs=1e-12)
        assert mc.distance_to_cpolytope(2 * m.vertices[0], d) == pytest.approx(m.circumradius, abs=1e-10)
        n = m.facet_normal([0] * (d + 1))
        h = face_origin_distance(FaceKind.FACET, d)
        for t in (0.0, 0.05, 0.4):
            assert mc.distance_to_cpolytope((h + t) * n, d) == pytest.approx(t, abs=1e-10)


def test_polytope_distance_vs_qp_d2():
    V = PolytopeModel(2).vertices
    rng = np.random.default_rng(8)
    for _ in range(10):
        y = rng.normal(size=3)
        cons = [{"type": "eq", "fun": lambda w: w.sum() - 1}]
        res = minimize(lambda w: np.sum((w @ V - y) ** 2), np.full(6, 1 / 6), bounds=[(0, 1)] * 6,
                       constraints=cons, method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
        assert mc.distance_to_cpolytope(y, 2) == pytest.approx(math.sqrt(res.fun), abs=1e-5)


@pytest.mark.parametrize("d", [2, 3])
def test_polytope_lipschitz(d):
    rng = np.random.default_rng(40 + d)
    D = d * d - 1
    X = rng.normal(size=(150, D)) * 0.7
    Y = X + rng.normal(size=X.shape) * 0.2
    dx, dy = mc.distance_to_cpolytope(X, d), mc.distance_to_cpolytope(Y, d)
    assert np.all(dx >= 0)
    assert np.all(np.abs(dx - dy) <= np.linalg.norm(X - Y, axis=1) + 1e-9)


def test_cone_oracle():
    o = mc.ProjectionOracle.cone(2, 3)
    R = o.circumradius
    assert o.distances([[0.1, 0.1, 0.1]])[0] == 0
    assert o.distances([[-1.0, 0.0, 0.0]])[0] == pytest.approx(1.0)
    assert o.distances([[2 * R, 0.0, 0.0]])[0] == pytest.approx(R)
    assert o.steiner_truth() is None
    est = mc.estimate_neighborhood_volume(o, 0.0, 400_000, seed=2)
    ref = math.pi * R ** 3 / 6
    assert abs(est.value - ref) <= 3 * est.stderr


# --- estimation --------------------------------------------------------------------

def test_s2_volume():
    o = mc.ProjectionOracle.statespace(2)
    e = mc.estimate_neighborhood_volume(o, 0.0, 10 ** 6, seed=1)
    ref = math.pi * math.sqrt(2) / 3
    assert abs(e.value - ref) <= max(3 * e.stderr, 1e-12)
    assert e.stderr == pytest.approx(math.sqrt(e.hit_fraction * (1 - e.hit_fraction) / e.samples) * e.box_volume)


def test_p2_volume():
    o = mc.ProjectionOracle.polytope(2)
    e = mc.estimate_neighborhood_volume(o, 0.0, 10 ** 6, seed=1)
    assert abs(e.value - math.sqrt(2) / 3) <= 3 * e.stderr


def test_s3_against_expansion():
    o = mc.ProjectionOracle.statespace(3)
    e = mc.estimate_neighborhood_volume(o, 0.1, 10 ** 6, seed=3)
    assert abs(e.value - statespace.d3_neighbourhood_volume(0.1)) <= 3 * e.stderr


def test_determinism_across_jobs():
    o = mc.ProjectionOracle.statespace(3)
    a = mc.estimate_neighborhood_volume(o, 0.05, 300_000, seed=9, jobs=1)
    b = mc.estimate_neighborhood_volume(o, 0.05, 300_000, seed=9, jobs=4)
    c = mc.estimate_neighborhood_volume(o, 0.05, 300_000, seed=9, jobs=1)
    assert a == b == c
    assert a != mc.estimate_neighborhood_volume(o, 0.05, 300_000, seed=10)


@pytest.mark.parametrize("body,eps", [("statespace2", 0.05), ("polytope", 0.05), ("statespace3", 0.02)])
def test_unbiased_over_seeds(body, eps):
    if body == "polytope":
        o = mc.ProjectionOracle.polytope(2)
        truth = sum(c * eps ** k for k, c in enumerate(o.steiner_truth()))
    elif body == "statespace2":
        o = mc.ProjectionOracle.statespace(2)
        truth = sum(c * eps ** k for k, c in enumerate(o.steiner_truth()))
    else:
        o = mc.ProjectionOracle.statespace(3)
        truth = statespace.d3_neighbourhood_volume(eps)
    ests = [mc.estimate_neighborhood_volume(o, eps, 100_000, seed=s) for s in range(10)]
    mean = np.mean([e.value for e in ests])
    pooled = math.sqrt(sum(e.stderr ** 2 for e in ests)) / len(ests)
    # S_2 at any eps is all hits: exact up to roundoff
    assert abs(mean - truth) <= max(3 * pooled, 1e-12)


def test_validation():
    o = mc.ProjectionOracle.ball()
    with pytest.raises(ValueError):
        mc.estimate_neighborhood_volume(o, -0.1, 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_neighborhood_volume(o, 0.1, 0, 0)
    with pytest.raises(ValueError):
        mc.fit_steiner_coefficients(o, [0.1, 0.2, 0.3], 100)
    with pytest.raises(ValueError):
        mc.fit_steiner_coefficients(o, [0.1] * 8, 100)
    with pytest.raises(ValueError):
        o.distances(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        mc.ProjectionOracle.for_body("torus", 2)


# --- Steiner fits ------------------------------------------------------------------

def _check_fit(oracle, truth, seed=0):
    fit = mc.fit_steiner_coefficients(oracle, samples_per_point=10 ** 6, seed=seed)
    z = fit.z_scores(truth)
    assert np.all(np.abs(z) <= 3), z
    assert np.all(fit.predict(fit.eps_grid) >= 0)
    assert fit.covariance.shape == (4, 4) and len(fit.eps_grid) == 12
    return fit


def test_fit_ball():
    r = 1 / math.sqrt(2)
    truth = (math.pi * math.sqrt(2) / 3, 2 * math.pi, 2 * math.sqrt(2) * math.pi, 4 * math.pi / 3)
    o = mc.ProjectionOracle.ball(r, 3)
    assert np.allclose(o.steiner_truth(), truth)
    _check_fit(o, truth, seed=5)


def test_fit_s2():
    truth = (math.pi * math.sqrt(2) / 3, 2 * math.pi, 2 * math.sqrt(2) * math.pi, 4 * math.pi / 3)
    o = mc.ProjectionOracle.statespace(2)
    assert np.allclose(o.steiner_truth(), truth)
    _check_fit(o, truth, seed=6)


def test_fit_p2():
    truth = (math.sqrt(2) / 3, 2 * math.sqrt(3), 6 * math.acos(1 / 3), 4 * math.pi / 3)
    o = mc.ProjectionOracle.polytope(2)
    assert np.allclose(o.steiner_truth(), truth)
    _check_fit(o, truth, seed=7)


def test_fit_from_estimates_ill_conditioned():
    ests = [mc.MCEstimate(1.0 + e, 0.01, 1000, 0, e, 500, 2.0) for e in np.linspace(1, 1 + 1e-9, 12)]
    with pytest.raises(mc.IllConditionedFit):
        mc.fit_steiner_from_estimates(ests, 10)
