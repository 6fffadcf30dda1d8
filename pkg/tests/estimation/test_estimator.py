import numpy as np
import pandas as pd
import pytest

from electrode_soh.config.estimator import Estimator
from electrode_soh.estimation.estimator import (
    ESTIMATE_COLUMNS,
    ElectrodeSohEstimator,
    discharge_equivalent_end,
    score_run,
)
from electrode_soh.io.records import CyclingRecord
from electrode_soh.truth.profiles import ProfileSpec, SegmentSpec
from electrode_soh.truth.simulator import simulate_trajectory


def _records(traj):
    return [CyclingRecord(t, i, v) for t, i, v in zip(traj.t, traj.current, traj.voltage)]


@pytest.fixture(scope="module")
def drive(pack):
    profile = ProfileSpec(
        segments=[SegmentSpec(kind="drive", magnitude=2.0, duration_s=600), SegmentSpec(kind="rest", duration_s=120)],
        noise_std=0.0,
        seed=2,
    )
    return simulate_trajectory(pack, pack.esoh, profile, init_soc=0.7)


def test_one_row_per_sample(pack, drive):
    est = ElectrodeSohEstimator(pack, Estimator(INIT_SOC=0.7))
    rows = list(est.run(_records(drive)))
    assert len(rows) == len(drive) == est.samples
    assert tuple(rows[0].as_row()) == ESTIMATE_COLUMNS
    assert all(np.isfinite(r.thp) and np.isfinite(r.soc) for r in rows)


def test_first_sample_solves_windows_and_reports(pack, drive):
    est = ElectrodeSohEstimator(pack, Estimator(INIT_SOC=0.7))
    est.step(_records(drive)[0])
    events = est.take_events()
    assert len(events.windows) == 1 and len(events.health) == 1
    assert events.windows[0]["flag"] == 0
    assert est.take_events().windows == []


def test_runs_are_deterministic(pack, drive):
    a = [r.as_row() for r in ElectrodeSohEstimator(pack, Estimator(INIT_SOC=0.6)).run(_records(drive))]
    b = [r.as_row() for r in ElectrodeSohEstimator(pack, Estimator(INIT_SOC=0.6)).run(_records(drive))]
    assert a == b


def test_exact_model_and_start_track_the_truth(pack, drive):
    cfg = Estimator(INIT_SOC=0.7, INIT_COVARIANCE=[1e-6, 1e-6, 1e-6])
    rows = list(ElectrodeSohEstimator(pack, cfg).run(_records(drive)))
    thp = np.array([r.thp for r in rows])
    thn = np.array([r.thn for r in rows])
    assert np.max(np.abs(thp - drive.thp)) < 1e-3
    assert np.max(np.abs(thn - drive.thn)) < 1e-3


def test_time_must_not_go_backwards(pack):
    est = ElectrodeSohEstimator(pack)
    est.step(CyclingRecord(10.0, 0.0, 3.7))
    with pytest.raises(ValueError):
        est.step(CyclingRecord(9.0, 0.0, 3.7))


def test_degenerate_covariance_resets_and_continues(pack):
    est = ElectrodeSohEstimator(pack, Estimator(INIT_COVARIANCE=[-1.0, 1e-6, 1e-2]))
    rows = [est.step(CyclingRecord(float(k), 1.0, 3.7)) for k in range(3)]
    assert [r.resets for r in rows] == [2, 4, 6]
    assert all(np.isfinite(r.thp) for r in rows)


def _exact_estimates(drive):
    esoh = drive.esoh
    return pd.DataFrame(
        {
            "t_s": drive.t,
            "soc": drive.soc,
            "thp": drive.thp,
            "thn": drive.thn,
            "qp_ah": esoh.qp,
            "qn_ah": esoh.qn,
            "thp0": esoh.thp0,
            "thp100": esoh.thp100,
            "thn0": esoh.thn0,
            "thn100": esoh.thn100,
        }
    )


def test_truth_equal_estimates_score_zero(pack, drive):
    score = score_run(_exact_estimates(drive), drive.truth(), drive.esoh, pack.esoh)
    assert all(v == pytest.approx(0.0, abs=1e-12) for v in score.to_dict().values())


def test_scoring_can_stop_at_a_checkpoint(pack, drive):
    estimates = _exact_estimates(drive)
    estimates.loc[estimates["t_s"] > 300.0, "soc"] += 0.1

    whole = score_run(estimates, drive.truth(), drive.esoh, pack.esoh)
    early = score_run(estimates, drive.truth(), drive.esoh, pack.esoh, tail_fraction=0.0, until_s=300.0)
    assert whole.soc_err_pp == pytest.approx(10.0)
    assert early.soc_err_pp == pytest.approx(0.0, abs=1e-12)


def test_discharge_equivalent_counts_only_discharge():
    t = [0.0, 1800.0, 3600.0, 5400.0]
    current = [2.0, -3.0, 2.0, 0.0]
    assert discharge_equivalent_end(t, current, 2.0) == 5400.0
    assert discharge_equivalent_end(t, current, 1.0) == 1800.0
    assert discharge_equivalent_end(t, current, 2.5) is None
    assert discharge_equivalent_end([0.0], [5.0], 1.0) is None


def test_score_needs_shared_timestamps(pack, drive):
    estimates = pd.DataFrame({"t_s": [-1.0], "soc": [0.5], "thp": [0.5], "thn": [0.5]})
    with pytest.raises(ValueError):
        score_run(estimates, drive.truth(), drive.esoh, pack.esoh)
