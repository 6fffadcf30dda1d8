import numpy as np
import pytest

from electrode_soh.characterization.fitter import (
    FitResult,
    canonical_order,
    fit_half_cell,
    reference_elements,
    synthesize_hppc,
)
from electrode_soh.characterization.dataset import HppcDataset
from electrode_soh.config.fitting import Fitting
from electrode_soh.errors import FittingError
from electrode_soh.commands.handlers.fit import reference_errors
from electrode_soh.model.tables import ELEMENTS, HalfCellParamTable, interpolate_rc

SMALL = dict(POPULATION=10, GENERATIONS=20)


@pytest.fixture(scope="module")
def data(pack):
    return synthesize_hppc(pack, "positive", Fitting(BREAKPOINTS=[0.4, 0.5, 0.6]))


def test_equal_seeds_give_equal_fits(pack, data):
    cfg = Fitting(**SMALL)
    a = fit_half_cell(data, pack.ocp_positive, pack.esoh.qp, cfg, seed=3, breakpoints=[0.5])
    b = fit_half_cell(data, pack.ocp_positive, pack.esoh.qp, cfg, seed=3, breakpoints=[0.5])
    np.testing.assert_array_equal(a.r0, b.r0)
    np.testing.assert_array_equal(a.c2, b.c2)
    assert a.j1 == b.j1
    assert a.summary()["optimizer"]["seed"] == 3
    assert a.r1[0] * a.c1[0] <= a.r2[0] * a.c2[0]


def test_flat_data_is_unfittable(pack):
    t = np.arange(200.0)
    flat = HppcDataset("positive", t, np.zeros(200), np.full(200, 3.8), np.full(200, 0.5))
    with pytest.raises(FittingError) as excinfo:
        fit_half_cell(flat, pack.ocp_positive, pack.esoh.qp, Fitting(**SMALL), breakpoints=[0.4, 0.5])
    assert excinfo.value.uncovered == (0.4, 0.5)


def test_unreached_breakpoint_is_named(pack, data):
    with pytest.raises(FittingError) as excinfo:
        fit_half_cell(data, pack.ocp_positive, pack.esoh.qp, Fitting(**SMALL), breakpoints=[0.5, 0.9])
    assert excinfo.value.uncovered == (0.9,)
    assert "0.90" in str(excinfo.value)


def test_wrong_electrode_or_mode(pack, data):
    with pytest.raises(FittingError):
        fit_half_cell(data, pack.ocp_negative, pack.esoh.qn, Fitting(**SMALL), breakpoints=[0.5])
    with pytest.raises(FittingError):
        fit_half_cell(data, pack.ocp_positive, pack.esoh.qp, Fitting(MODE="global", **SMALL), breakpoints=[0.5])


def test_canonical_order():
    assert canonical_order(0.01, 1e4, 0.01, 100.0) == (0.01, 100.0, 0.01, 1e4)
    assert canonical_order(0.01, 100.0, 0.01, 1e4) == (0.01, 100.0, 0.01, 1e4)


def test_merge_inserts_new_breakpoints():
    base = HalfCellParamTable.constant("positive", 0.01, 0.02, 1000.0, 0.03, 5000.0)
    one = np.ones(1)
    result = FitResult(
        electrode="positive",
        breakpoints=np.array([0.5]),
        r0=0.005 * one,
        r1=0.001 * one,
        c1=10.0 * one,
        r2=0.002 * one,
        c2=2000.0 * one,
        j1=0.0,
        j2=0.0,
        j1_blocks=np.zeros(1),
        j2_blocks=np.zeros(1),
        mode="local",
        population=10,
        generations=20,
        seed=0,
    )
    merged = result.merged_into(base)
    np.testing.assert_allclose(merged.breakpoints, [0.0, 0.5, 1.0])
    np.testing.assert_allclose(merged.r0, [0.01, 0.005, 0.01])
    np.testing.assert_allclose(merged.c2, [5000.0, 2000.0, 5000.0])


def test_reference_branches_are_sorted_by_time_constant(pack):
    ref = reference_elements(pack.table_positive, [0.5])
    # listed slow-first in the pack: (12.4 mOhm, 14.47 kF) then (7.5 mOhm, 5.71 kF)
    assert ref["r1"][0] == pytest.approx(7.5e-3)
    assert ref["c1"][0] == pytest.approx(5707.6)
    assert ref["r2"][0] == pytest.approx(12.4e-3)
    assert ref["c2"][0] == pytest.approx(14473.8)
    assert ref["r0"][0] == pytest.approx(7.6e-3)


def _result_at(sols, elements, breakpoints):
    n = len(sols)
    return FitResult(
        electrode="positive",
        breakpoints=np.asarray(breakpoints, dtype=float),
        **{name: np.asarray(elements[name], dtype=float) for name in ELEMENTS},
        j1=0.0,
        j2=0.0,
        j1_blocks=np.zeros(n),
        j2_blocks=np.zeros(n),
        mode="local",
        population=10,
        generations=20,
        seed=0,
        block_sol=np.asarray(sols, dtype=float),
    )


def test_reference_errors_use_the_measured_block_sol(pack):
    sols = [0.003, 0.5, 0.997]
    exact = reference_elements(pack.table_positive, sols)
    errors = reference_errors(_result_at(sols, exact, [0.0, 0.5, 1.0]), pack.table_positive)
    for name in ELEMENTS:
        np.testing.assert_allclose(errors[name], 0.0, atol=1e-12)


def test_recovers_all_elements_of_a_constant_table(pack):
    table = HalfCellParamTable.constant("positive", 0.01, 0.02, 1000.0, 0.03, 5000.0)
    cell = pack.with_table("positive", table)
    cfg = Fitting(BREAKPOINTS=[0.5], REST_S=600.0, POPULATION=20, GENERATIONS=60)
    data = synthesize_hppc(cell, "positive", cfg)
    result = fit_half_cell(data, cell.ocp_positive, cell.esoh.qp, cfg, seed=1)
    expected = {"r0": 0.01, "r1": 0.02, "c1": 1000.0, "r2": 0.03, "c2": 5000.0}
    for name, value in expected.items():
        assert result.element(name)[0] == pytest.approx(value, rel=1e-3), name
    assert result.j1 < 1e-6


def test_leftover_branch_voltage_does_not_bias_the_fit(pack):
    table = HalfCellParamTable.constant("positive", 0.01, 0.02, 1000.0, 0.03, 5000.0)
    cell = pack.with_table("positive", table)
    # a short settling rest leaves the 150 s branch far from relaxed when the first pulse fires
    cfg = Fitting(BREAKPOINTS=[0.4, 0.5], REST_S=120.0, POPULATION=20, GENERATIONS=60)
    data = synthesize_hppc(cell, "positive", cfg)
    result = fit_half_cell(data, cell.ocp_positive, cell.esoh.qp, cfg, seed=1, breakpoints=[0.5])
    assert result.r2[0] == pytest.approx(0.03, rel=1e-3)
    assert result.c2[0] == pytest.approx(5000.0, rel=1e-3)


@pytest.mark.slow
def test_self_fit_recovers_every_element(pack):
    cfg = Fitting(BREAKPOINTS=[0.0, 0.1, 0.3, 0.5, 0.7], PULSE_CRATE=0.2, POPULATION=40, GENERATIONS=150)
    data = synthesize_hppc(pack, "positive", cfg)
    result = fit_half_cell(data, pack.ocp_positive, pack.esoh.qp, cfg, seed=0)
    np.testing.assert_allclose(result.block_sol, [0.003, 0.1, 0.3, 0.5, 0.7], atol=1e-3)
    expected = reference_elements(pack.table_positive, result.block_sol)
    for name in ELEMENTS:
        np.testing.assert_allclose(result.element(name), expected[name], rtol=0.05, err_msg=name)
    assert result.j1 < 1e-4
