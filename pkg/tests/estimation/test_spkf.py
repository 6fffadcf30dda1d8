import numpy as np
import pytest

from electrode_soh.errors import ConfigurationError, CovarianceDegenerateError, NumericalDegeneracyError
from electrode_soh.estimation.spkf import (
    FilterState,
    NoiseConfig,
    gain_and_update,
    jittered_cholesky,
    output_prediction,
    predict_covariance,
    predict_state,
    sigma_points,
    weights,
)
from electrode_soh.model.eecm import EecmState, step_state
from electrode_soh.model.ocp import affine_ocp
from electrode_soh.model.tables import HalfCellParamTable


@pytest.mark.parametrize("h", [1.0, np.sqrt(3.0), 2.5])
def test_weights_sum_to_one(h):
    wm, wc = weights(h)
    assert wm.size == 7
    assert wm.sum() == pytest.approx(1.0)
    np.testing.assert_array_equal(wm, wc)


def test_spread_must_be_positive():
    with pytest.raises(ConfigurationError):
        weights(0.0)
    with pytest.raises(ConfigurationError):
        NoiseConfig(measurement=0.0)


def test_sigma_points_reproduce_mean_and_covariance():
    rng = np.random.default_rng(2)
    m = rng.normal(size=3)
    L = rng.normal(size=(3, 3))
    cov = L @ L.T + 0.1 * np.eye(3)
    h = np.sqrt(3.0)
    wm, wc = weights(h)
    points = sigma_points(m, cov, h)
    assert points.shape == (7, 3)
    np.testing.assert_allclose(wm @ points, m, atol=1e-12)
    d = points - m
    np.testing.assert_allclose((wc[:, None] * d).T @ d, cov, atol=1e-12)


def test_unit_covariance_points():
    m = np.array([0.1, 0.2, 0.3])
    points = sigma_points(m, np.eye(3), 1.0)
    np.testing.assert_allclose(points[1:4], m + np.eye(3))
    np.testing.assert_allclose(points[4:], m - np.eye(3))


def test_mean_prediction_matches_the_circuit_model(pack):
    state = EecmState(vc1p=0.01, vc2p=-0.002, vc1n=0.004, vc2n=0.003, thp=0.42, thn=0.61)
    nxt = step_state(state, pack, pack.esoh, 3.2, 1.0)

    pos = FilterState("positive", [state.vc1p, state.vc2p, state.thp], np.eye(3))
    neg = FilterState("negative", [state.vc1n, state.vc2n, state.thn], np.eye(3))
    xp, _ = predict_state(pos, pack.table_positive, pack.esoh.qp, pack.esoh.eta, 3.2, 1.0)
    xn, _ = predict_state(neg, pack.table_negative, pack.esoh.qn, pack.esoh.eta, 3.2, 1.0)
    np.testing.assert_allclose(xp, [nxt.vc1p, nxt.vc2p, nxt.thp], rtol=0, atol=1e-12)
    np.testing.assert_allclose(xn, [nxt.vc1n, nxt.vc2n, nxt.thn], rtol=0, atol=1e-12)


def test_covariance_prediction():
    A = np.diag([0.5, 0.9, 1.0])
    out = predict_covariance(np.eye(3), A, np.diag([1e-3, 1e-3, 1e-6]))
    np.testing.assert_allclose(np.diag(out), [0.251, 0.811, 1.000001])
    np.testing.assert_array_equal(out, out.T)


def test_collapsed_points_predict_their_own_output(pack):
    m = np.array([0.0, 0.0, 0.5])
    points = np.tile(m, (7, 1))
    wm, _ = weights(np.sqrt(3.0))
    curves = (pack.ocp_negative, pack.ocp_positive)
    tables = (pack.table_negative, pack.table_positive)
    Y, yhat = output_prediction("positive", points, np.array([0.0, 0.0, 0.5]), curves, tables, 1.0, wm)
    assert yhat == pytest.approx(Y[0])
    assert np.all(Y == Y[0])


def test_no_cross_covariance_means_no_correction():
    m = np.array([0.01, 0.0, 0.4])
    points = np.tile(m, (7, 1))
    _, wc = weights(np.sqrt(3.0))
    cov = np.diag([1e-6, 1e-6, 1e-3])
    updated = gain_and_update("positive", m, cov, points, np.full(7, 3.8), 3.8, 3.9, wc, 4e-6)
    np.testing.assert_array_equal(updated.xhat, m)
    np.testing.assert_allclose(updated.cov, cov)


def test_nonpositive_innovation_variance_raises():
    m = np.zeros(3)
    _, wc = weights(np.sqrt(3.0))
    with pytest.raises(NumericalDegeneracyError):
        gain_and_update("positive", m, np.eye(3), np.tile(m, (7, 1)), np.zeros(7), 0.0, 0.0, wc, -1.0)


def test_indefinite_covariance_raises():
    with pytest.raises(CovarianceDegenerateError):
        jittered_cholesky(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(CovarianceDegenerateError):
        sigma_points(np.zeros(3), np.diag([1.0, -1.0, 1.0]), 1.0)


def test_jitter_rescues_a_semidefinite_matrix():
    S, work = jittered_cholesky(np.diag([1.0, 1.0, 0.0]))
    assert np.all(np.isfinite(S))
    assert work[2, 2] > 0


def test_linear_output_reduces_to_kalman_filter():
    pos_curve = affine_ocp("positive", 4.2, -0.8)
    neg_curve = affine_ocp("negative", 0.6, -0.5)
    pos_table = HalfCellParamTable.constant("positive", 0.008, 0.01, 2000.0, 0.005, 20000.0)
    neg_table = HalfCellParamTable.constant("negative", 0.02, 0.006, 5000.0, 0.004, 40000.0)
    curves, tables = (neg_curve, pos_curve), (neg_table, pos_table)
    q = {"positive": 6.0, "negative": 5.0}
    table = {"positive": pos_table, "negative": neg_table}
    H = {"positive": np.array([-1.0, -1.0, -0.8]), "negative": np.array([-1.0, -1.0, 0.5])}
    noise = NoiseConfig(process=[1e-8, 1e-8, 1e-9], measurement=1e-5)

    rng = np.random.default_rng(4)
    current = rng.normal(0.0, 3.0, size=1000)
    measured = 3.5 + rng.normal(0.0, 0.01, size=1000)

    cov0 = np.diag([1e-6, 1e-6, 1e-3])
    spkf = {"positive": FilterState("positive", [0, 0, 0.4], cov0), "negative": FilterState("negative", [0, 0, 0.6], cov0)}
    kf = {e: (fs.xhat.copy(), fs.cov.copy()) for e, fs in spkf.items()}

    for k in range(1, 1000):
        u_prev, u, y = current[k - 1], current[k], measured[k]

        means, covs = {}, {}
        for e in ("positive", "negative"):
            means[e], A = predict_state(spkf[e], table[e], q[e], 1.0, u_prev, 1.0)
            covs[e] = predict_covariance(spkf[e].cov, A, noise.process)
        for e in ("positive", "negative"):
            other = means["negative" if e == "positive" else "positive"]
            points = sigma_points(means[e], covs[e], noise.h)
            Y, yhat = output_prediction(e, points, other, curves, tables, u, noise.wm)
            spkf[e] = gain_and_update(e, means[e], covs[e], points, Y, yhat, y, noise.wc, noise.measurement)

        kf_pred = {}
        for e in ("positive", "negative"):
            x, P = kf[e]
            A = np.diag([np.exp(-1.0 / (table[e].r1[0] * table[e].c1[0])), np.exp(-1.0 / (table[e].r2[0] * table[e].c2[0])), 1.0])
            B = np.array(
                [
                    table[e].r1[0] * (1 - A[0, 0]),
                    table[e].r2[0] * (1 - A[1, 1]),
                    (1.0 if e == "positive" else -1.0) / (3600.0 * q[e]),
                ]
            )
            kf_pred[e] = (A @ x + B * u_prev, A @ P @ A.T + noise.process)

        def voltage(xp, xn):
            vp = 4.2 - 0.8 * xp[2] - xp[0] - xp[1] - pos_table.r0[0] * u
            vn = 0.6 - 0.5 * xn[2] + xn[0] + xn[1] + neg_table.r0[0] * u
            return vp - vn

        yhat_kf = voltage(kf_pred["positive"][0], kf_pred["negative"][0])
        for e in ("positive", "negative"):
            x, P = kf_pred[e]
            S = H[e] @ P @ H[e] + noise.measurement
            K = P @ H[e] / S
            kf[e] = (x + K * (y - yhat_kf), P - S * np.outer(K, K))

        for e in ("positive", "negative"):
            np.testing.assert_allclose(spkf[e].xhat, kf[e][0], rtol=0, atol=1e-6)
            np.testing.assert_allclose(spkf[e].cov, kf[e][1], rtol=0, atol=1e-6)
