import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpmkill.errors import InvalidArgumentError
from hpmkill.kill import KillModel, cumulative_kill_probability, kill_probability, logistic, mean_kill_probability
from hpmkill.link import LogEnergyParams
from hpmkill.numerics import gauss_hermite, stream


def test_logistic_midpoint():
    assert kill_probability(0.01, KillModel(0.01, 50.0)) == 0.5


def test_logistic_value():
    assert kill_probability(0.11, KillModel(0.01, 50.0)) == pytest.approx(0.99330714907571514444, rel=1e-13)


def test_logistic_tail():
    km = KillModel(1.0, 40.0)
    assert kill_probability(0.0, km) == pytest.approx(math.exp(-40.0), rel=1e-12)


def test_logistic_saturates_without_overflow():
    with np.errstate(over="raise"):
        assert logistic(1e6) == 1.0
        assert logistic(-1e6) >= 0.0


def test_kill_probability_array():
    km = KillModel(1.0, 2.0)
    out = kill_probability(np.array([0.0, 1.0, 2.0]), km)
    np.testing.assert_allclose(out, [1 / (1 + math.e**2), 0.5, 1 / (1 + math.e**-2)], rtol=1e-15)


@given(st.floats(0, 10), st.floats(0, 10))
@settings(max_examples=100, deadline=None)
def test_kill_probability_monotone(a, b):
    km = KillModel(1.0, 3.0)
    lo, hi = sorted((a, b))
    assert kill_probability(lo, km) <= kill_probability(hi, km)


def test_mean_kill_point_mass_midpoint():
    km = KillModel(0.02, 50.0)
    assert mean_kill_probability(LogEnergyParams(math.log(0.02), 0.0), km) == 0.5


@pytest.mark.parametrize("e_th,expected", [(1e-3, 0.50748), (1e-2, 0.39652), (1e-1, 0.0072486)])
def test_lognormal_anchor(e_th, expected):
    p = mean_kill_probability(LogEnergyParams(-6.5, 0.35**2), KillModel(e_th, 50.0), gauss_hermite(10))
    assert p == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("mu,s,e_th,slope", [(-6.5, 0.35, 1e-2, 50.0), (-2.0, 0.5, 0.1, 30.0), (0.0, 0.2, 1.0, 5.0)])
def test_mean_kill_against_sampling(mu, s, e_th, slope):
    km = KillModel(e_th, slope)
    x = kill_probability(np.exp(mu + s * stream(4).standard_normal(10**7)), km)
    se = x.std() / math.sqrt(x.size)
    assert abs(mean_kill_probability(LogEnergyParams(mu, s * s), km) - x.mean()) < 3 * se


@pytest.mark.parametrize("p,prf,t,expected", [(0.4, 1000, 0.0, 0.0), (1.0, 1000, 0.01, 1.0),
                                              (0.4, 1000, 0.01, 0.9939533824)])
def test_cumulative(p, prf, t, expected):
    assert cumulative_kill_probability(p, prf, t) == pytest.approx(expected, abs=1e-12)


@given(st.floats(0, 1), st.floats(1, 1e4), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=200, deadline=None)
def test_cumulative_semigroup(p, prf, t1, t2):
    # 1 - P(t1 + t2) = (1 - P(t1)) (1 - P(t2))
    lhs = 1 - cumulative_kill_probability(p, prf, t1 + t2)
    rhs = (1 - cumulative_kill_probability(p, prf, t1)) * (1 - cumulative_kill_probability(p, prf, t2))
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_cumulative_monotone_in_dwell(t1, t2):
    lo, hi = sorted((t1, t2))
    assert cumulative_kill_probability(0.01, 100.0, lo) <= cumulative_kill_probability(0.01, 100.0, hi)


@pytest.mark.parametrize("args", [(1.5, 1.0, 1.0), (0.5, 0.0, 1.0), (0.5, 1.0, -1.0)])
def test_cumulative_rejects_bad_input(args):
    with pytest.raises(InvalidArgumentError):
        cumulative_kill_probability(*args)


def test_kill_model_problems():
    assert KillModel(0.0, 1.0).problems()
    assert KillModel(1.0, -1.0).problems()
    assert not KillModel(1.0, 1.0).problems()
