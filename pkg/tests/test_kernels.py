import math

import numpy as np
import pytest

from qgeom import kernels
from qgeom.cpolytope import PolytopeModel

BACKENDS = ["python"]
try:
    kernels.backend("compiled")
    BACKENDS.append("compiled")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def K(request):
    return kernels.backend(request.param)


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.backend("fortran")


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_eigvalsh_against_numpy(K, d):
    rng = np.random.default_rng(d)
    A = rng.normal(size=(300, d, d)) + 1j * rng.normal(size=(300, d, d))
    A = A + A.conj().transpose(0, 2, 1)
    assert np.allclose(K.hermitian_eigvalsh(A.real, A.imag), np.linalg.eigvalsh(A), atol=1e-12)


def test_eigvalsh_diagonal_and_degenerate(K):
    A = np.zeros((2, 3, 3))
    A[0] = np.diag([3.0, -1.0, 2.0])
    A[1] = np.ones((3, 3))
    ev = K.hermitian_eigvalsh(A, np.zeros_like(A))
    assert np.allclose(ev[0], [-1, 2, 3]) and np.allclose(ev[1], [0, 0, 3], atol=1e-13)


def test_eigvalsh_nonconvergence(K):
    rng = np.random.default_rng(0)
    A = rng.normal(size=(5, 6, 6))
    A = A + A.transpose(0, 2, 1)
    with pytest.raises(ArithmeticError):
        K.hermitian_eigvalsh(A, np.zeros_like(A), max_sweeps=1)


def test_project_simplex(K):
    x = np.array([[2.0, -1.0], [0.5, 0.5], [2.0, 0.0]])
    y = K.project_simplex(x)
    assert np.allclose(y, [[1, 0], [0.5, 0.5], [1, 0]])
    rng = np.random.default_rng(1)
    X = rng.normal(size=(500, 5)) * 2
    Y = K.project_simplex(X)
    assert np.allclose(Y.sum(axis=1), 1) and np.all(Y >= 0)
    # KKT: y = max(x - tau, 0) with one tau per row
    for xr, yr in zip(X, Y):
        tau = (xr - yr)[yr > 0]
        assert np.ptp(tau) < 1e-12
        assert np.all(xr[yr == 0] <= tau[0] + 1e-12)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    C, P = kernels.backend("compiled"), kernels.backend("python")
    rng = np.random.default_rng(4)
    for d in (2, 3, 4):
        X = rng.normal(size=(500, d * d - 1)) * 0.5
        assert np.allclose(C.statespace_distances(X, d), P.statespace_distances(X, d), atol=1e-12)
        V = PolytopeModel(d).vertices
        Y = rng.normal(size=(300, V.shape[1])) * 0.6
        assert np.allclose(C.polytope_distances(Y, V), P.polytope_distances(Y, V), atol=1e-11)


def test_statespace_distance_reference(K):
    rng = np.random.default_rng(5)
    d = 3
    X = rng.normal(size=(200, 8)) * 0.5
    re, im = kernels.coords_to_hermitian(X, d)
    lam = np.linalg.eigvalsh(re + 1j * im)
    ref = np.linalg.norm(lam - K.project_simplex(lam), axis=1)
    assert np.allclose(K.statespace_distances(X, d), ref, atol=1e-12)
    with pytest.raises(ValueError):
        K.statespace_distances(X, 2)


def test_polytope_distance_dimension_check(K):
    V = PolytopeModel(2).vertices
    with pytest.raises(ValueError):
        K.polytope_distances(np.zeros((1, 4)), V)
