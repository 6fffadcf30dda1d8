import numpy as np
import pytest

from electrode_soh.errors import EstimationFailure
from electrode_soh.estimation.awtls import (
    AwtlsAccumulator,
    PairHarvester,
    estimate_capacity,
    harvest_pairs,
    merit,
    push_pair,
)


def _fill(pairs, var_x=1e-4, var_y=1e-4, gamma=1.0):
    acc = AwtlsAccumulator(gamma=gamma)
    for x, y in pairs:
        acc = push_pair(acc, x, y, var_x, var_y)
    return acc


def test_single_pair_gives_its_slope():
    est = estimate_capacity(_fill([(1.0, 5.0)]))
    assert est.q == pytest.approx(5.0, abs=1e-9)


def test_minimum_rounding_below_zero_still_gives_an_estimate():
    exact = _fill([(1.0, 5.0)])
    c1, c2, c3, c4, c5, c6 = exact.moments
    # constant term shaved by a few ulps: the exact fit now evaluates slightly negative
    acc = AwtlsAccumulator(gamma=1.0, moments=(c1, c2, c3 - 1e-6, c4, c5, c6), count=1)
    assert merit(acc, 5.0) < 0

    est = estimate_capacity(acc)
    assert est.q == pytest.approx(5.0, rel=1e-9)
    assert np.isfinite(est.sigma)


def test_single_noisy_pairs_always_give_their_slope():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = rng.uniform(0.05, 0.9) * rng.choice([-1.0, 1.0])
        q = rng.uniform(0.5, 10.0)
        var_x = 10.0 ** rng.uniform(-6, -2)
        var_y = 10.0 ** rng.uniform(-6, -2)
        acc = push_pair(AwtlsAccumulator(gamma=1.0), x, q * x, var_x, var_y)
        assert estimate_capacity(acc).q == pytest.approx(q, rel=1e-7)


def test_exact_collinear_pairs():
    acc = AwtlsAccumulator(gamma=1.0)
    for x, y, vx, vy in [(0.2, 1.0, 1e-4, 1e-3), (0.5, 2.5, 4e-4, 1e-4), (-0.3, -1.5, 1e-5, 1e-2)]:
        acc = push_pair(acc, x, y, vx, vy)
    assert estimate_capacity(acc).q == pytest.approx(5.0, abs=1e-9)
    assert merit(acc, 5.0) == pytest.approx(0.0, abs=1e-6)


def test_moments_are_plain_sums_without_forgetting():
    pairs = [(0.2, 1.1, 1e-4, 2e-3), (-0.4, -1.9, 3e-4, 1e-3)]
    forward = AwtlsAccumulator(gamma=1.0)
    backward = AwtlsAccumulator(gamma=1.0)
    for p in pairs:
        forward = push_pair(forward, *p)
    for p in reversed(pairs):
        backward = push_pair(backward, *p)
    np.testing.assert_allclose(forward.moments, backward.moments, rtol=1e-15)

    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    vx = np.array([p[2] for p in pairs])
    vy = np.array([p[3] for p in pairs])
    expected = [
        np.sum(x * x / vy),
        np.sum(x * y / vy),
        np.sum(y * y / vy),
        np.sum(x * x / vx),
        np.sum(x * y / vx),
        np.sum(y * y / vx),
    ]
    np.testing.assert_allclose(forward.moments, expected, rtol=1e-12)


def test_forgetting_discounts_old_pairs():
    acc = push_pair(push_pair(AwtlsAccumulator(gamma=0.5), 1.0, 5.0, 1.0, 1.0), 1.0, 5.0, 1.0, 1.0)
    assert acc.moments[0] == pytest.approx(1.5)


def test_small_pairs_are_discarded():
    acc = _fill([(0.5, 2.4)])
    after = push_pair(acc, 0.01, 0.05, 1e-4, 1e-4)
    assert after.moments == acc.moments
    assert after.count == acc.count
    assert after.discarded == 1


def test_equal_variances_match_total_least_squares():
    rng = np.random.default_rng(8)
    x = rng.uniform(-0.8, 0.8, size=30)
    x = x[np.abs(x) > 0.05]
    y = 5.0 * x + rng.normal(0.0, 0.05, size=x.size)
    x = x + rng.normal(0.0, 0.01, size=x.size)
    acc = _fill(zip(x, y), var_x=1e-3, var_y=1e-3)

    _, _, vt = np.linalg.svd(np.column_stack([x, y]))
    normal = vt[-1]
    q_tls = -normal[0] / normal[1]
    assert estimate_capacity(acc).q == pytest.approx(q_tls, rel=1e-8)


def test_estimate_is_the_merit_minimum():
    rng = np.random.default_rng(11)
    grid = np.linspace(0.5, 15.0, 20001)
    for _ in range(20):
        n = rng.integers(2, 12)
        acc = AwtlsAccumulator(gamma=1.0)
        for _ in range(n):
            x = rng.choice([-1, 1]) * rng.uniform(0.1, 0.9)
            y = 6.0 * x + rng.normal(0.0, 0.05)
            acc = push_pair(acc, x + rng.normal(0.0, 0.01), y, rng.uniform(1e-5, 1e-3), rng.uniform(1e-4, 1e-2))
        est = estimate_capacity(acc)
        assert merit(acc, est.q) <= np.min(merit(acc, grid)) * (1 + 1e-9) + 1e-15
        assert est.sigma > 0


def test_more_evidence_tightens_sigma():
    pairs = [(0.3, 1.52), (-0.5, -2.46), (0.7, 3.55)]
    once = estimate_capacity(_fill(pairs))
    twice = estimate_capacity(_fill(pairs + pairs))
    assert twice.q == pytest.approx(once.q, rel=1e-10)
    assert twice.sigma == pytest.approx(once.sigma / np.sqrt(2.0), rel=1e-6)


def test_seeded_accumulator_returns_the_prior():
    acc = AwtlsAccumulator.seeded(4.8, 1e-4, 1e-2)
    assert acc.count == 1
    assert estimate_capacity(acc).q == pytest.approx(4.8, abs=1e-9)


def test_invalid_inputs():
    with pytest.raises(EstimationFailure):
        estimate_capacity(AwtlsAccumulator())
    with pytest.raises(ValueError):
        push_pair(AwtlsAccumulator(), 0.5, 2.5, 0.0, 1e-4)
    with pytest.raises(ValueError):
        AwtlsAccumulator(gamma=0.0)
    with pytest.raises(ValueError):
        PairHarvester(window_s=0.0)


def test_one_hour_discharge_harvests_both_electrodes():
    t = np.arange(3601.0)
    thp = 0.1 + 0.8 * t / 3600.0
    thn = 0.9 - 0.8 * t / 3600.0
    current = np.full(t.size, 5.0)
    pairs = harvest_pairs(t, thp, thn, current, 3600.0, current_noise_std=0.01)

    assert [p.electrode for p in pairs] == ["positive", "negative"]
    pos, neg = pairs
    assert (pos.t_start, pos.t_end) == (0.0, 3600.0)
    assert pos.dtheta == pytest.approx(0.8)
    assert pos.dah == pytest.approx(5.0)
    assert neg.dtheta == pytest.approx(-0.8)
    assert neg.dah == pytest.approx(-5.0)
    assert pos.var_y == pytest.approx(1e-4)
    assert pos.dah / pos.dtheta == pytest.approx(neg.dah / neg.dtheta)


def test_harvester_windows_do_not_overlap():
    harvester = PairHarvester(window_s=10.0)
    emitted = []
    for k in range(31):
        emitted.append(len(harvester.push(float(k), 0.5, 0.5, 1e-6, 1e-6, 1.0, 1.0 if k else 0.0)))
    assert sum(emitted) == 6
    assert [k for k, n in enumerate(emitted) if n] == [10, 20, 30]
