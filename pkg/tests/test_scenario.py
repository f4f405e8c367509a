import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpmkill.errors import InvalidArgumentError, ValidationError
from hpmkill.kill import kill_probability
from hpmkill.kinematics import KinematicState
from hpmkill.link import TransmitterParams
from hpmkill.montecarlo import MCConfig, simulate
from hpmkill.scenario import (
    REQUIRED_KEYS,
    SWEEP_PARAMETERS,
    ConfigError,
    baseline_scenario,
    evaluate,
    format_config,
    load_config,
    parse_config,
    validate,
)


def test_baseline_is_clean(baseline):
    assert validate(baseline) == []
    assert evaluate(baseline).warnings == ()


def test_baseline_values(baseline):
    out = evaluate(baseline)
    assert out.range.mean_R == 1000.0
    assert out.atten.mu_A == pytest.approx(0.2, rel=1e-15)
    assert out.n_pulses == pytest.approx(100.0)
    assert out.mean_E == pytest.approx(1.3422e-8, rel=1e-4)
    assert out.p_kill == pytest.approx(1 / (1 + math.exp(0.5)), rel=1e-6)


def test_duty_cycle_warning(baseline):
    s = dataclasses.replace(baseline, tx=dataclasses.replace(baseline.tx, pulse_width=0.5e-3))
    assert any("duty cycle" in w for w in validate(s))


def test_wavelength_mismatch_is_hard_error(baseline):
    s = dataclasses.replace(baseline, tx=TransmitterParams(2e5, 0.5e-6, 1e3, 2.45e9, wavelength=0.2))
    with pytest.raises(ValidationError, match="c/f"):
        validate(s)


def test_validation_lists_every_failure(baseline):
    s = dataclasses.replace(baseline, dwell=-1.0, kill=dataclasses.replace(baseline.kill, slope=0.0))
    with pytest.raises(ValidationError) as info:
        validate(s)
    assert len(info.value.failures) == 2


def test_jitter_dominated_warning(baseline):
    s = baseline.with_param("D", 60.0)
    assert any("critical diameter" in w for w in validate(s))


def test_saturation_warning(baseline):
    s = baseline.with_param("P_t", 1e15)
    assert any("saturated" in w for w in validate(s))


def test_deterministic_p_kill(baseline):
    s = baseline.with_param("sigma_theta", 0.0)
    out = evaluate(s)
    assert out.log_energy.sigma2_lnE == 0.0
    assert out.p_kill == kill_probability(math.exp(out.log_energy.mu_lnE), s.kill)


def test_analytic_inside_surrogate_band(config_dir):
    s = load_config(config_dir / "stochastic.cfg")
    rep = simulate(s, MCConfig(10**6, seed=5, sampling_mode="surrogate"))
    assert abs(evaluate(s).p_kill - rep.p_kill_hat) < 3 * rep.p_kill_se


def test_zero_dwell(baseline):
    assert evaluate(baseline.with_param("T", 0.0)).p_tot == 0.0


def test_floor_note(baseline):
    notes = evaluate(baseline).notes
    assert len(notes) == 1 and "logistic floor" in notes[0]


@pytest.mark.parametrize("name,value", [("E_th", 0.5), ("P_t", 1e6), ("D", 3.0), ("sigma_theta", 2e-3),
                                        ("R_bar", 2500.0), ("T", 0.3)])
def test_with_param(baseline, name, value):
    s = baseline.with_param(name, value)
    got = {"E_th": s.kill.e_threshold, "P_t": s.tx.peak_power, "D": s.antenna.diameter,
           "sigma_theta": s.antenna.jitter_sigma, "R_bar": s.range_stats().mean_R, "T": s.dwell}[name]
    assert got == pytest.approx(value, rel=1e-12)


def test_with_mu_a(config_dir):
    s = load_config(config_dir / "stochastic.cfg").with_param("mu_A", 1.5)
    assert evaluate(s).atten.mu_A == pytest.approx(1.5, rel=1e-12)
    with pytest.raises(InvalidArgumentError):
        s.with_param("mu_A", 0.0)


def test_unknown_sweep_parameter(baseline):
    assert "eta" not in SWEEP_PARAMETERS
    with pytest.raises(InvalidArgumentError):
        baseline.with_param("eta", 1.0)


def test_range_nominal_keeps_direction():
    s = baseline_scenario(kinematics=KinematicState((0, 300, 400)), range_nominal=2000.0)
    assert s.position_moments().mean_r == pytest.approx((0.0, 1200.0, 1600.0), rel=1e-15)


def test_config_files_round_trip(config_dir):
    for path in sorted(config_dir.glob("*.cfg")):
        s = load_config(path)
        assert parse_config(format_config(s)) == s


def test_baseline_config_matches_builder(config_dir, baseline):
    assert load_config(config_dir / "baseline.cfg") == baseline


@given(st.floats(1e3, 1e7), st.floats(1e-8, 1e-5), st.floats(0.1, 10.0), st.floats(0, 0.01),
       st.floats(1e-4, 1.0), st.booleans(), st.one_of(st.none(), st.floats(10.0, 1e4)))
@settings(max_examples=100, deadline=None)
def test_round_trip_property(power, width, diameter, jitter, e_th, rain, r_nom):
    base = baseline_scenario()
    s = dataclasses.replace(
        base,
        tx=dataclasses.replace(base.tx, peak_power=power, pulse_width=width),
        antenna=dataclasses.replace(base.antenna, diameter=diameter, jitter_sigma=jitter),
        kill=dataclasses.replace(base.kill, e_threshold=e_th),
        atmosphere=dataclasses.replace(base.atmosphere, rain_enabled=rain, rain_k=1e-4),
        range_nominal=r_nom,
    )
    assert parse_config(format_config(s)) == s


def test_missing_key_is_named(config_dir):
    text = (config_dir / "baseline.cfg").read_text()
    text = "\n".join(l for l in text.splitlines() if not l.startswith("peak_power_W"))
    with pytest.raises(ConfigError, match="missing required key 'peak_power_W'"):
        parse_config(text)


def test_errors_are_line_anchored():
    text = "peak_power_W = lots\nbogus = 1\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text, source="x.cfg")
    failures = info.value.failures
    assert failures[0].startswith("x.cfg:1:")
    assert failures[1].startswith("x.cfg:2:") and "unknown key" in failures[1]
    assert sum("missing required key" in f for f in failures) == len(REQUIRED_KEYS) - 1


def test_duplicate_key_rejected(config_dir):
    text = (config_dir / "baseline.cfg").read_text() + "dwell_s = 2\n"
    with pytest.raises(ConfigError, match="duplicate key 'dwell_s'"):
        parse_config(text)
