import numpy as np
import pytest

from electrode_soh.errors import ConfigurationError
from electrode_soh.model.esoh import EsohParams, capacity_from_geometry, soc_from_sol, sol_from_soc, useful_capacity

TABLE_B = EsohParams(qp=7.424, qn=5.828, thp0=0.987, thp100=0.27, thn0=0.008, thn100=0.9214)


def test_soc_endpoints():
    assert soc_from_sol(TABLE_B, TABLE_B.thn0) == 0.0
    assert soc_from_sol(TABLE_B, TABLE_B.thn100) == pytest.approx(1.0)


def test_round_trip_is_identity():
    soc = np.linspace(0.0, 1.0, 101)
    _, thn = sol_from_soc(TABLE_B, soc)
    np.testing.assert_allclose(soc_from_sol(TABLE_B, thn), soc, atol=1e-12)


def test_sol_from_soc_moves_electrodes_in_opposite_directions():
    thp, thn = sol_from_soc(TABLE_B, 1.0)
    assert thp == pytest.approx(0.27)
    assert thn == pytest.approx(0.9214)


def test_degenerate_window_is_a_configuration_error():
    flat = EsohParams(qp=5.0, qn=5.0, thp0=0.9, thp100=0.2, thn0=0.5, thn100=0.5)
    with pytest.raises(ConfigurationError):
        soc_from_sol(flat, 0.5)
    with pytest.raises(ConfigurationError):
        sol_from_soc(flat, 0.5)


def test_validate_checks_invariants():
    TABLE_B.validate(balance_tol=None)
    with pytest.raises(ConfigurationError):
        TABLE_B.with_capacities(-1.0, 5.0).validate(balance_tol=None)
    with pytest.raises(ConfigurationError):
        TABLE_B.with_windows(0.2, 0.9, 0.008, 0.9214).validate(balance_tol=None)
    with pytest.raises(ConfigurationError):
        TABLE_B.with_capacities(9.0, 5.828).validate()


def test_useful_capacity_per_electrode():
    assert useful_capacity(TABLE_B, "positive") == pytest.approx(7.424 * 0.717)
    assert useful_capacity(TABLE_B, "negative") == pytest.approx(5.828 * 0.9134)


def test_capacity_from_geometry():
    assert capacity_from_geometry(0.75, 8.52e-5, 0.1027, 33133) == pytest.approx(5.828, abs=1e-3)
    assert capacity_from_geometry(0.665, 7.56e-5, 0.1027, 63104) == pytest.approx(8.732, abs=1e-3)
    with pytest.raises(ValueError):
        capacity_from_geometry(0.75, 8.52e-5, 0.0, 33133)


def test_dict_round_trip():
    assert EsohParams.from_dict(TABLE_B.to_dict()) == TABLE_B
    with pytest.raises(ConfigurationError):
        EsohParams.from_dict({"qp_ah": 1.0})
