import json
from pathlib import Path

import numpy as np
import pytest

from electrode_soh.config.simulation import Simulation
from electrode_soh.errors import ConfigurationError
from electrode_soh.model.tables import ELEMENTS
from electrode_soh.truth.profiles import ProfileSpec, SegmentSpec, generate_profile
from electrode_soh.truth.simulator import Scenario, build_truth, load_scenario, perturb_pack, simulate_trajectory

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def _profile(*segments, noise_std=0.0, seed=0):
    return ProfileSpec(segments=list(segments), dt=1.0, noise_std=noise_std, seed=seed)


def test_noise_free_measurements_equal_truth(pack):
    traj = simulate_trajectory(pack, pack.esoh, _profile(SegmentSpec(kind="drive", magnitude=2.0, duration_s=300)))
    np.testing.assert_array_equal(traj.voltage, traj.voltage_true)
    assert len(traj) == 300


def test_rest_keeps_sol_constant(pack):
    traj = simulate_trajectory(pack, pack.esoh, _profile(SegmentSpec(kind="rest", duration_s=100)), init_soc=0.6)
    assert np.all(traj.thp == traj.thp[0])
    assert np.all(traj.thn == traj.thn[0])
    assert traj.soc[0] == pytest.approx(0.6)
    assert traj.voltage_true[0] == pytest.approx(pack.ocv(0.6))


def test_noise_level(pack):
    traj = simulate_trajectory(
        pack, pack.esoh, _profile(SegmentSpec(kind="rest", duration_s=20000), noise_std=1e-3, seed=3), init_soc=0.5
    )
    assert np.std(traj.voltage - traj.voltage_true) == pytest.approx(1e-3, rel=0.1)


def test_charge_stops_at_termination(pack):
    seg = SegmentSpec(kind="cc", magnitude=-5.0, duration_s=3 * 3600, termination_v=4.0)
    traj = simulate_trajectory(pack, pack.esoh, _profile(seg), init_soc=0.5)
    assert traj.voltage_true[-1] >= 4.0
    assert np.all(traj.voltage_true[:-1] < 4.0)
    assert traj.terminated == (0,)
    assert len(traj) < 3 * 3600


def test_discharge_stops_at_termination(pack):
    seg = SegmentSpec(kind="cc", magnitude=5.0, duration_s=3 * 3600, termination_v=3.3)
    traj = simulate_trajectory(pack, pack.esoh, _profile(seg, SegmentSpec(kind="rest", duration_s=60)), init_soc=0.5)
    stop = int(np.argmax(traj.current == 0.0))
    assert traj.voltage_true[stop - 1] <= 3.3
    assert np.all(traj.voltage_true[: stop - 1] > 3.3)
    assert len(traj) == stop + 60


def test_empty_profile_simulates_nothing(pack):
    traj = simulate_trajectory(pack, pack.esoh, _profile())
    assert len(traj) == 0
    assert list(traj.measurements().columns) == ["t_s", "current_a", "voltage_v"]


def test_scenario_defaults_come_from_simulation_section():
    scenario = Scenario.from_dict({"profile": {"segments": []}}, defaults=Simulation(MISMATCH=0.05, NOISE_STD=2e-3))
    assert scenario.mismatch == 0.05
    assert scenario.profile.noise_std == 2e-3
    assert scenario.cutoffs == (2.0, 4.4)
    assert scenario.degradation.is_fresh


def test_scenario_rejects_bad_documents(tmp_path):
    with pytest.raises(ConfigurationError):
        Scenario.from_dict({"profile": {}, "colour": "red"})
    with pytest.raises(ConfigurationError):
        Scenario.from_dict({"name": "no profile"})
    with pytest.raises(ConfigurationError):
        Scenario.from_dict({"profile": {}, "init_soc": 1.5})
    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "missing.json")
    listed = tmp_path / "list.json"
    listed.write_text(json.dumps([1, 2]))
    with pytest.raises(ConfigurationError):
        load_scenario(listed)


def test_shipped_scenarios_load():
    aged = load_scenario(SCENARIOS / "aged_lam20_lam10_lli16.json")
    assert (aged.degradation.lam_p, aged.degradation.lam_n, aged.degradation.lli) == (20.0, 10.0, 16.0)
    assert aged.profile.repeat == 5

    fresh = load_scenario(SCENARIOS / "bol_fresh.json")
    assert fresh.degradation.is_fresh

    empty = load_scenario(SCENARIOS / "zero_duration.json")
    assert len(generate_profile(empty.profile)) == 0


def test_perturbation_stays_in_band(pack):
    assert perturb_pack(pack, 0.0, np.random.default_rng(0)) is pack
    perturbed = perturb_pack(pack, 0.1, np.random.default_rng(0))
    for electrode in ("negative", "positive"):
        for name in ELEMENTS:
            ratio = perturbed.table(electrode).element(name) / pack.table(electrode).element(name)
            assert np.all(ratio >= 0.9 - 1e-12) and np.all(ratio <= 1.1 + 1e-12)
    assert not np.allclose(perturbed.table_positive.r0, pack.table_positive.r0)


def test_truth_cell_is_aged_and_reproducible(pack, short_scenario):
    scenario = load_scenario(short_scenario)
    first = build_truth(pack, scenario)
    second = build_truth(pack, scenario)
    assert first.esoh.qp == pytest.approx(0.95 * pack.esoh.qp)
    assert first.esoh.qn == pytest.approx(0.97 * pack.esoh.qn)
    np.testing.assert_array_equal(first.pack.table_negative.c2, second.pack.table_negative.c2)
    assert first.pack.esoh is first.esoh
