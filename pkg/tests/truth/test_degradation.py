import numpy as np
import pytest

from electrode_soh.errors import ConfigurationError, InfeasibleDegradationError
from electrode_soh.health.report import assess
from electrode_soh.model.esoh import FARADAY
from electrode_soh.truth.degradation import DegradationSpec, apply_degradation, degradation_residuals


def _age(pack, spec, vmax=None):
    return apply_degradation(
        pack.esoh,
        spec,
        pack.vmin,
        pack.vmax if vmax is None else vmax,
        pack.ocp_positive,
        pack.ocp_negative,
    )


def test_fresh_spec_is_identity(pack):
    aged = _age(pack, DegradationSpec())
    np.testing.assert_allclose(aged.windows, pack.esoh.windows, rtol=0, atol=1e-8)
    assert aged.qp == pack.esoh.qp and aged.qn == pack.esoh.qn


def test_aged_cell_reports_its_own_degradation(pack):
    spec = DegradationSpec(lam_p=20.0, lam_n=10.0, lli=16.0)
    aged = _age(pack, spec)
    aged.validate()

    report = assess(aged, pack.esoh)
    assert report.lam_p == pytest.approx(20.0, abs=1e-6)
    assert report.lam_n == pytest.approx(10.0, abs=1e-6)
    assert report.lli == pytest.approx(16.0, abs=1e-6)
    assert report.soh == pytest.approx(0.845, abs=0.01)

    li_ah = report.n_li * FARADAY / 3600.0
    residuals = degradation_residuals(
        aged.windows, aged.qp, aged.qn, li_ah, pack.vmin, pack.vmax, pack.ocp_positive, pack.ocp_negative
    )
    assert np.max(np.abs(residuals[:2])) < 1e-9


@pytest.mark.parametrize("lam_p", [0.0, 5.0, 10.0, 20.0])
def test_positive_capacity_follows_lam(pack, lam_p):
    aged = _age(pack, DegradationSpec(lam_p=lam_p, lam_n=10.0, lli=16.0))
    assert aged.qp == pytest.approx((1.0 - lam_p / 100.0) * pack.esoh.qp)
    assert assess(aged, pack.esoh).lam_p == pytest.approx(lam_p, abs=1e-9)


def test_percentages_must_stay_below_eighty():
    with pytest.raises(ConfigurationError):
        DegradationSpec(lam_p=80.0)
    with pytest.raises(ConfigurationError):
        DegradationSpec(lli=-1.0)
    with pytest.raises(ConfigurationError):
        DegradationSpec.from_dict({"lam_x": 1.0})


def test_unreachable_limits_are_infeasible(pack):
    with pytest.raises(InfeasibleDegradationError):
        _age(pack, DegradationSpec(lam_p=5.0), vmax=6.0)
