import json
import math

import numpy as np
import pytest

from qgeom import feasibility as fz
from qgeom.mathkernel import ball_volume


def test_sic2_report():
    p = fz.sic_prescription(2)
    assert p.M.shape == (4, 4)
    r = fz.check_trivial_requirements(p)
    assert r.all_ok and r.rank == 3
    evals = np.linalg.eigvalsh(p.G)
    assert np.allclose(sorted(evals), [0, 2 / 3, 2 / 3, 2 / 3], atol=1e-12)


@pytest.mark.parametrize("d", range(2, 7))
def test_orthoset_fails(d):
    r = fz.check_trivial_requirements(fz.ortho_prescription(d, d + 1))
    assert not r.psd_ok
    assert r.min_eigenvalue == pytest.approx(-1 / d, abs=1e-10)
    assert "psd" in r.failures()


def test_orthonormal_basis_passes():
    for d in range(2, 6):
        r = fz.check_trivial_requirements(fz.generate_prescription("ortho", d))
        assert r.all_ok and r.rank == d - 1


def test_sum_bound_examples():
    for d in range(2, 6):
        total, bound, ok = fz.sum_bound(fz.mub_prescription(d))
        assert ok and total == pytest.approx(bound, rel=1e-14)
    n = 5
    total, bound, ok = fz.sum_bound(fz.PrescriptionMatrix(3, np.ones((n, n))))
    assert total == n * n and ok
    assert fz.sum_bound(fz.sic_prescription(2))[:2] == pytest.approx((8.0, 8.0))


def test_generators():
    m = fz.generate_prescription("mub", 2).M
    assert m.shape == (6, 6)
    for r in range(3):
        assert np.array_equal(m[2 * r:2 * r + 2, 2 * r:2 * r + 2], np.eye(2))
    assert np.count_nonzero(m == 0.5) == 36 - 12
    s = fz.generate_prescription("sic", 3).M
    assert s.shape == (9, 9) and np.allclose(s[~np.eye(9, dtype=bool)], 0.25)
    assert np.array_equal(fz.generate_prescription("ortho", 4, 4).M, np.eye(4))
    with pytest.raises(ValueError):
        fz.generate_prescription("nope", 2)


def test_structured_spectrum_matches_dense():
    for n, a, b in ((4, 2 / 3, 0.0), (7, 1.0, -1 / 3), (12, 0.3, 0.05)):
        M = a * np.eye(n) + b * np.ones((n, n))
        top, rest = fz.structured_spectrum(a, b, n)
        ev = np.linalg.eigvalsh(M)
        assert sorted(ev) == pytest.approx(sorted([top] + [rest] * (n - 1)), abs=1e-12)


@pytest.mark.parametrize("d", range(2, 6))
def test_gram_vectors(d):
    for p in (fz.sic_prescription(d), fz.mub_prescription(d)):
        r = fz.check_trivial_requirements(p)
        assert r.all_ok
        X = r.gram_vectors
        assert np.allclose(X @ X.T, p.M - 1 / d, atol=1e-10)
        assert np.allclose(np.sum(X * X, axis=1), 1 - 1 / d, atol=1e-10)


def test_report_json():
    r = fz.check_trivial_requirements(fz.sic_prescription(2))
    obj = r.to_dict(include_vectors=True)
    assert obj["schema"] == "qgeom/1" and obj["all_ok"] is True
    json.dumps(obj)


def test_validation():
    with pytest.raises(fz.PrescriptionError):
        fz.PrescriptionMatrix(2, np.array([[1, 0.2], [0.3, 1]]))
    with pytest.raises(fz.PrescriptionError):
        fz.PrescriptionMatrix(2, np.ones((2, 3)))
    with pytest.raises(fz.PrescriptionError):
        fz.PrescriptionMatrix(2, np.array([[1, np.nan], [np.nan, 1]]))
    with pytest.raises(fz.PrescriptionError):
        fz.PrescriptionMatrix(1, np.eye(2))
    r = fz.check_trivial_requirements(fz.PrescriptionMatrix(2, np.array([[0.5, -0.1], [-0.1, 1.0]])))
    assert not r.diag_ok and not r.nonneg_ok


def test_load(tmp_path):
    p = tmp_path / "sic.json"
    p.write_text(json.dumps({"d": 2, "M": fz.sic_prescription(2).M.tolist()}))
    assert fz.check_trivial_requirements(fz.load_prescription(p)).all_ok
    c = tmp_path / "m.csv"
    c.write_text("1,0.5\n0.5,1\n")
    assert fz.load_prescription(c, 2).n == 2
    with pytest.raises(fz.PrescriptionError):
        fz.load_prescription(c)
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(fz.PrescriptionError):
        fz.load_prescription(bad)
    with pytest.raises(fz.PrescriptionError):
        fz.load_prescription(tmp_path / "missing.json")


def test_cone_volume_examples():
    v = fz.cone_intrinsic_volume(fz.ConeFamily(2, 0))
    assert float(v) == pytest.approx(math.pi / (12 * math.sqrt(2)), rel=1e-14)
    assert float(v) == pytest.approx(4 / 3 * math.pi * (1 / math.sqrt(2)) ** 3 / 8, rel=1e-14)
    for d in range(2, 9):
        for k in range(4):
            f = fz.ConeFamily(d, k)
            ref = ball_volume(f.dim) * f.circumradius ** f.dim / 2 ** f.dim
            assert fz.cone_intrinsic_volume(f).rel_diff(ref) < 1e-12
    with pytest.raises(ValueError):
        fz.ConeFamily(2, 4)


def test_exclusion_d6_and_larger():
    assert all(r.excluded for r in fz.exclusion_report(6))
    for d in range(7, 13):
        assert all(r.excluded for r in fz.exclusion_report(d))


def test_exclusion_sign_persists():
    base = {r.k: r.excluded for r in fz.exclusion_report(6)}
    for d in range(7, 13):
        assert {r.k: r.excluded for r in fz.exclusion_report(d)} == base


def test_exclusion_d5():
    rows = {r.k: r for r in fz.exclusion_report(5)}
    assert not rows[3].excluded
    assert rows[0].excluded and rows[1].excluded
    # k = 2 is not excluded either: V_22(C) < V_22(S_5) (ratio about 0.863)
    assert not rows[2].excluded
    assert float(rows[2].cone / rows[2].state) == pytest.approx(0.863, abs=1e-3)


def test_compare():
    for d in range(2, 9):
        assert not any(r.flagged for r in fz.compare_polytope_statespace(d))
    rows = {r.N: r for r in fz.compare_polytope_statespace(2)}
    assert float(rows[3].ratio) == pytest.approx(1 / math.pi, rel=1e-13)
    assert float(rows[0].ratio) == pytest.approx(1.0, rel=1e-13)
    assert len(rows) == 4
