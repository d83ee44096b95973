import csv
import io
import json

import cvxpy as cp
import mpmath
import numpy as np
import pytest

import hcs


def random_spectrum(dims, k, seed):
    rng = np.random.default_rng(seed)
    m = 2 ** len(dims)
    x = np.zeros(tuple(dims) + (m,))
    flat = x.reshape(-1, m)
    for g in rng.choice(flat.shape[0], size=k, replace=False):
        flat[g] = rng.uniform(-1, 1, m)
    return x


def test_generators_square_to_minus_one():
    for j in range(3):
        e = [0.0] * 8
        e[1 << j] = 1.0
        assert hcs.multiply(e, e) == pytest.approx([-1.0] + [0.0] * 7)
    i12 = hcs.multiply([0, 1, 0, 0], [0, 0, 1, 0])
    assert i12 == pytest.approx([0, 0, 0, 1])


def test_matrix_iso_is_a_homomorphism():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=8), rng.normal(size=8)
    lhs = hcs.matrix_iso(hcs.multiply(list(a), list(b)))
    rhs = hcs.matrix_iso(list(a)) @ hcs.matrix_iso(list(b))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    np.testing.assert_allclose(hcs.matrix_iso(hcs.conjugate(list(a))), hcs.matrix_iso(list(a)).T, atol=1e-12)


def test_transform_round_trip_and_bad_shape():
    x = np.random.default_rng(1).normal(size=(4, 3, 2, 8))
    np.testing.assert_allclose(hcs.inverse(hcs.forward(x)), x, atol=1e-12)
    with pytest.raises(ValueError):
        hcs.forward(np.zeros((4, 3)))


def test_acquisition_rows_are_orthonormal():
    s = hcs.pcs([4, 4, 2], 0.75, 0.5, "S4", hcs.Approach.A2, 5)
    op = hcs.AcquisitionOperator(s)
    a = op.dense_matrix()
    assert a.shape == (s.sampled_count, s.pixel_count * 8)
    np.testing.assert_allclose(a @ a.T, np.eye(a.shape[0]), atol=1e-12)
    x = np.random.default_rng(2).normal(size=(4, 4, 2, 8))
    np.testing.assert_allclose(op.apply(x), a @ x.ravel(), atol=1e-12)


def test_schedule_json_round_trip():
    s = hcs.rpd([4, 4, 2], "S2", hcs.Approach.A1, 9)
    assert hcs.SamplingSchedule.from_json(s.to_json()) == s
    assert json.loads(s.to_json())["dims"] == [4, 4, 2]


def test_uniform_has_zero_coherence():
    r = hcs.mu_hypercomplex(hcs.uniform([4, 4, 4]), traditional=True)
    assert r["mu_h"] <= 1e-10
    assert r["traditional_mu"] <= 1e-10


@pytest.mark.parametrize("seed", [0, 1])
def test_solver_matches_convex_oracle(seed):
    # An undersampled problem where the minimizer is not the planted spectrum,
    # so agreement exercises the optimizer rather than exact recovery.
    s = hcs.pcs([3, 3, 2], 0.5, 0.5, "S4", hcs.Approach.A2, 20 + seed)
    op = hcs.AcquisitionOperator(s)
    x0 = random_spectrum([3, 3, 2], 6, seed)
    y = op.apply(x0)
    w = np.asarray(hcs.normalization_weights(s))
    res = hcs.solve_ph1(op, y, weights=list(w))
    assert res["converged"]

    a = op.dense_matrix()
    z = cp.Variable(a.shape[1])
    groups = cp.reshape(z, (s.pixel_count, 8), order="C")
    prob = cp.Problem(cp.Minimize(w @ cp.norm(groups, 2, axis=1)), [a @ z == y])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    assert prob.status == cp.OPTIMAL
    assert res["weighted_objective"] == pytest.approx(prob.value, rel=1e-6)
    np.testing.assert_allclose(res["estimate"].ravel(), z.value, atol=1e-4)


def test_t_cdf_matches_mpmath():
    mpmath.mp.dps = 40
    for df in (1, 2.5, 4, 13, 60):
        for t in (-5.0, -1.1, -0.2, 0.7, 2.2, 9.0):
            ref = mpmath.quad(
                lambda u: mpmath.gamma((df + 1) / 2) / (mpmath.sqrt(df * mpmath.pi) * mpmath.gamma(df / 2))
                * (1 + u * u / df) ** (-(df + 1) / 2),
                [-mpmath.inf, 0, t],
            )
            assert abs(hcs.student_t_cdf(t, df) - float(ref)) < 1e-12
    for a, b, x in ((0.5, 0.5, 0.3), (2.0, 7.5, 0.25), (12.0, 3.0, 0.8)):
        assert abs(hcs.incomplete_beta(a, b, x) - float(mpmath.betainc(a, b, 0, x, regularized=True))) < 1e-12


def test_qq_identity():
    v = list(np.random.default_rng(4).normal(size=50))
    assert all(a == b for a, b in hcs.qq_pairs(v, v))
    assert hcs.quantile([1.0, 2.0, 3.0, 4.0], 0.5) == pytest.approx(2.5)


def test_experiment_is_deterministic_and_validated():
    cfg = json.dumps({"dims": [8, 8], "n_monte": 3, "deltas": [0.5, 1.0], "series": ["nus"]})
    out1, status1 = hcs.run_experiment(cfg, "sweep")
    out2, _ = hcs.run_experiment(cfg, "sweep")
    assert status1 == 0
    assert out1 == out2
    rows = list(csv.DictReader(io.StringIO(out1)))
    assert [float(r["delta_i"]) for r in rows] == [0.5, 1.0]
    assert float(rows[-1]["mean_mu_h"]) <= 1e-10
    with pytest.raises(ValueError, match=r"\$\.n_monte"):
        hcs.run_experiment(json.dumps({"n_monte": "many"}), "sweep")
