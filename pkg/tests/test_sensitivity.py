import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpmkill.errors import InvalidArgumentError
from hpmkill.link import DB_TO_NEPER
from hpmkill.scenario import baseline_scenario, load_config
from hpmkill.sensitivity import PARAMETERS, analytic_elasticities, elasticity_report, finite_difference_elasticity


def test_fixed_rows(baseline):
    s = analytic_elasticities(baseline)
    assert s["P_t"] == 1.0 and s["tau_p"] == 1.0 and s["R_bar"] == -2.0
    assert s["mu_A"] == pytest.approx(-0.2302585093, rel=1e-10)
    assert s["sigma2_A"] == pytest.approx(0.0265095, rel=1e-5)
    assert s["sigma2_A"] == 0.5 * DB_TO_NEPER**2


def test_jitter_free_limit():
    s = analytic_elasticities(baseline_scenario().with_param("sigma_theta", 0.0))
    assert s["D"] == 2.0 and s["sigma_theta"] == 0.0


@given(st.floats(0.0, 0.05), st.floats(0.2, 20.0))
@settings(max_examples=100, deadline=None)
def test_aperture_jitter_identity_and_bounds(sigma, diameter):
    s = analytic_elasticities(baseline_scenario().with_param("sigma_theta", sigma).with_param("D", diameter))
    assert abs(s["D"] - s["sigma_theta"] - 2.0) <= 1e-12
    assert 1.0 < s["D"] <= 2.0
    assert -1.0 < s["sigma_theta"] <= 0.0


def test_jitter_dominated_limit():
    s = analytic_elasticities(baseline_scenario().with_param("sigma_theta", 10.0).with_param("D", 50.0))
    assert s["D"] == pytest.approx(1.0, abs=1e-6)
    assert s["sigma_theta"] == pytest.approx(-1.0, abs=1e-6)


def test_power_fd(baseline):
    assert finite_difference_elasticity(baseline, "P_t", 1e-4) == pytest.approx(1.0, abs=1e-8)


def test_range_fd(baseline):
    assert finite_difference_elasticity(baseline, "R_bar") == pytest.approx(-2.0, abs=1e-6)


def test_aperture_fd(baseline):
    assert finite_difference_elasticity(baseline, "D") == pytest.approx(analytic_elasticities(baseline)["D"],
                                                                        abs=1e-6)


@pytest.mark.parametrize("cfg", ["baseline.cfg", "stochastic.cfg"])
def test_report_gaps(config_dir, cfg):
    report = elasticity_report(load_config(config_dir / cfg))
    assert set(report.rows) == set(PARAMETERS)
    for name in PARAMETERS:
        assert report[name].abs_gap < 1e-5, name
    assert report.total_range.abs_gap < 1e-5


def test_total_range_includes_attenuation(baseline):
    total = elasticity_report(baseline).total_range
    assert total.analytic == pytest.approx(-2.0 - DB_TO_NEPER * 0.2, rel=1e-12)


def test_unknown_parameter(baseline):
    with pytest.raises(InvalidArgumentError):
        finite_difference_elasticity(baseline, "eta")
    with pytest.raises(InvalidArgumentError):
        finite_difference_elasticity(baseline, "P_t", 0.0)


def test_rows_are_constant_across_operating_points():
    for p in (1e3, 2e5, 1e7):
        s = analytic_elasticities(baseline_scenario().with_param("P_t", p))
        assert s["P_t"] == 1.0 and math.isclose(s["mu_A"], -DB_TO_NEPER)
