import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpmkill.errors import GeometryError, InvalidArgumentError
from hpmkill.kill import KillModel, kill_probability, mean_kill_probability
from hpmkill.kinematics import KinematicState
from hpmkill.link import LogEnergyParams
from hpmkill.montecarlo import MCConfig, Moments, estimate_lognormal, simulate, simulate_lognormal, simulate_pulse_trains
from hpmkill.scenario import baseline_scenario, evaluate, load_config

ANCHOR = LogEnergyParams(-6.5, 0.35**2)


@pytest.mark.parametrize("mode", ["physical", "surrogate"])
def test_deterministic_collapse(mode):
    s = baseline_scenario().with_param("sigma_theta", 0.0)
    summary = evaluate(s)
    rep = simulate(s, MCConfig(5000, seed=3, sampling_mode=mode))
    assert rep.empirical_sigma2_lnE == 0.0
    assert rep.p_kill_se == 0.0
    assert rep.empirical_mean_E == pytest.approx(summary.deterministic_E, rel=1e-12)
    assert rep.p_kill_hat == pytest.approx(kill_probability(summary.deterministic_E, s.kill), rel=1e-12)


def test_surrogate_anchor_middle_threshold():
    km = KillModel(1e-2, 50.0)
    rep = simulate_lognormal(ANCHOR, km, 10**7, seed=1)
    gh = mean_kill_probability(ANCHOR, km)
    assert abs(rep.p_kill_hat - gh) < 3 * rep.p_kill_se
    assert abs(rep.p_kill_hat - 0.397) < 0.01


def test_physical_closure_at_baseline():
    s = baseline_scenario()
    rep = simulate(s, MCConfig(10**6, seed=2))
    summary = evaluate(s)
    assert abs(rep.empirical_mu_lnE - summary.log_energy.mu_lnE) < 0.02
    assert abs(rep.p_kill_hat - summary.p_kill) < 0.02
    # the sampled gain moments are exact targets
    assert abs(rep.mean_G - summary.gain.mean_G) < 3 * rep.se_mean_G


@pytest.mark.parametrize("mode", ["physical", "surrogate"])
def test_worker_count_does_not_change_results(config_dir, mode):
    s = load_config(config_dir / "stochastic.cfg")
    reps = [simulate(s, MCConfig(300_001, seed=9, sampling_mode=mode, workers=w, chunk_size=50_000))
            for w in (1, 2, 5)]
    assert reps[0] == reps[1] == reps[2]


def test_seed_changes_results(baseline):
    a = simulate(baseline, MCConfig(10_000, seed=1))
    b = simulate(baseline, MCConfig(10_000, seed=2))
    assert a.empirical_mu_lnE != b.empirical_mu_lnE


def test_histogram_counts_everything(config_dir):
    rep = simulate(load_config(config_dir / "stochastic.cfg"), MCConfig(70_000, seed=4))
    assert sum(rep.histogram_counts) == 70_000
    assert len(rep.histogram_edges) == len(rep.histogram_counts) + 1


def test_frozen_rain_runs(config_dir):
    s = load_config(config_dir / "stochastic.cfg")
    a = simulate(s, MCConfig(20_000, seed=4, freeze_rain=True, chunk_size=3000))
    b = simulate(s, MCConfig(20_000, seed=4, freeze_rain=True, workers=3, chunk_size=3000))
    assert a == b
    free = simulate(s, MCConfig(20_000, seed=4, chunk_size=3000))
    assert free != a


def test_degenerate_geometry():
    s = baseline_scenario(kinematics=KinematicState((0, 0, 0)))
    with pytest.raises(GeometryError):
        simulate(s, MCConfig(100))


def test_p_tot_from_report():
    rep = simulate_lognormal(ANCHOR, KillModel(1e-2, 50.0), 10_000, seed=0, prf=1000.0)
    assert rep.p_tot_hat(0.0) == 0.0
    curve = rep.p_tot_curve([0.0, 0.001, 0.01])
    assert curve == sorted(curve)
    assert curve[1] == pytest.approx(rep.p_kill_hat, rel=1e-12)


def test_estimate_constant_samples():
    le = estimate_lognormal([2.5] * 10)
    assert le.mu_lnE == pytest.approx(math.log(2.5), rel=1e-15)
    assert le.sigma2_lnE == 0.0


def test_estimate_two_samples():
    le = estimate_lognormal([math.e, math.e**3])
    assert le.mu_lnE == pytest.approx(2.0, rel=1e-15)
    assert le.sigma2_lnE == pytest.approx(2.0, rel=1e-15)


def test_estimate_recovers_known_lognormal():
    n = 10**6
    x = np.exp(1.0 + 0.5 * np.random.default_rng(8).standard_normal(n))
    le = estimate_lognormal(x)
    assert abs(le.mu_lnE - 1.0) < 3 * 0.5 / math.sqrt(n)
    assert abs(le.sigma2_lnE - 0.25) < 3 * 0.25 * math.sqrt(2 / (n - 1))


@pytest.mark.parametrize("bad", [[1.0, 0.0], [1.0, -2.0], [1.0]])
def test_estimate_rejects_bad_samples(bad):
    with pytest.raises(InvalidArgumentError):
        estimate_lognormal(bad)


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50), st.integers(1, 49))
@settings(max_examples=200, deadline=None)
def test_moment_merge_matches_numpy(values, cut):
    x = np.asarray(values)
    cut = min(cut, x.size - 1)
    m = Moments.of(x[:cut]).merge(Moments.of(x[cut:]))
    assert m.n == x.size
    assert m.mean == pytest.approx(x.mean(), rel=1e-9, abs=1e-6)
    assert m.var == pytest.approx(x.var(ddof=1), rel=1e-7, abs=1e-6)


def test_pulse_trains():
    frac, se = simulate_pulse_trains(0.4, 100, 10**5, seed=3)
    assert frac == 1.0 and se == 0.0
    frac, se = simulate_pulse_trains(0.01, 50, 10**5, seed=3)
    assert abs(frac - (1 - 0.99**50)) < 3 * se


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        MCConfig(0)
    with pytest.raises(InvalidArgumentError):
        MCConfig(10, sampling_mode="exact")
