import json
import math

import numpy as np
import pytest

import spatialecon as se

EDGES = [("1", "2", 1.0), ("1", "4", 1.0), ("2", "3", 1.0),
         ("2", "5", 1.0), ("3", "4", 1.0), ("4", "5", 1.0)]


def worked_w():
    return se.row_normalize(se.from_edges(EDGES, symmetrize=True, ids=["1", "2", "3", "4", "5"]))


def test_row_normalized_rows_sum_to_one():
    w = worked_w()
    assert w.size == 5
    assert np.allclose(w.row_sums(), 1.0)
    assert w.normalization == se.Normalization.row


def test_spatial_lag_matches_hand_product():
    w = worked_w()
    x = np.array([[3, 120], [4, 140], [1, 200], [8, 70], [5, 250]], dtype=float)
    assert np.allclose(se.spatial_lag(w, x), w.dense() @ x)


def test_checkerboard_moran():
    w = worked_w()
    r = se.morans_i(w, np.array([0.0, 1.0, 0.0, 1.0, 0.0]), permutations=99, seed=1)
    assert r["statistic"] == pytest.approx(-1.0, abs=1e-12)


def test_log_det_against_numpy():
    w = worked_w()
    sign, ref = np.linalg.slogdet(np.eye(5) - 0.6 * w.dense())
    assert sign > 0
    assert se.log_det(0.6, w) == pytest.approx(ref, abs=1e-10)
    assert se.log_det(0.6, w) == pytest.approx(math.log(0.4) + math.log(1.6), abs=1e-10)


def test_multiplier_matrix_is_inverse():
    w = worked_w()
    s = se.multiplier_matrix(0.6, w)
    assert np.allclose(s @ (np.eye(5) - 0.6 * w.dense()), np.eye(5))


def test_fit_and_impacts_round_trip():
    w = se.row_normalize(se.rook_lattice(10, 10))
    y, x = se.simulate("sar", w, beta=np.array([1.0, -1.0]), rho=0.4, seed=11)
    sar = se.fit("sar", y, x, w)
    ols = se.fit("ols", y, x)
    assert 0.0 < sar.rho < 0.9
    assert sar.loglik > ols.loglik
    stat, df, p = se.lr_test(ols, sar)
    assert df == 1 and stat > 0 and 0 <= p <= 1
    summary = json.loads(se.impacts(sar, w))
    first = summary["impacts"][0]
    assert first["total"] == pytest.approx(sar.beta[0] / (1 - sar.rho), rel=1e-9)
    assert set(se.lm_tests(ols, w)) == {"lm_lag", "lm_err", "robust_lm_lag", "robust_lm_err"}


def test_errors_carry_code():
    w = se.rook_lattice(3, 3)
    y = np.arange(9, dtype=float)
    with pytest.raises(se.SpatialEconError, match="RequiresNormalizedW"):
        se.fit("sar", y, np.cos(y).reshape(-1, 1), w)
