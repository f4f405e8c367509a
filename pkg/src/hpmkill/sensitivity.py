"""Elasticities of the mean received pulse energy, analytic and by central differences.

Rows ``mu_A`` and ``sigma2_A`` are semi-elasticities (d ln E / d mu_A per dB and
d ln E / d sigma2_A per dB^2): those two quantities enter the mean energy
additively in an exponent, so their sensitivities are constants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .antenna import beam_sharpness, boresight_gain
from .atmosphere import attenuation_stats
from .errors import ClosureWarning, InvalidArgumentError
from .kinematics import RangeStats
from .link import DB_TO_NEPER, mean_energy_closed_form
from .scenario import Scenario, validate

PARAMETERS = ("P_t", "tau_p", "D", "sigma_theta", "R_bar", "mu_A", "sigma2_A")
UNITS = {
    "P_t": "elasticity",
    "tau_p": "elasticity",
    "D": "elasticity",
    "sigma_theta": "elasticity",
    "R_bar": "elasticity",
    "mu_A": "per dB",
    "sigma2_A": "per dB^2",
}
_ADDITIVE = {"mu_A", "sigma2_A"}
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class ElasticityRow:
    analytic: float
    finite_difference: float
    unit: str = "elasticity"

    @property
    def abs_gap(self) -> float:
        return abs(self.analytic - self.finite_difference)


@dataclass(frozen=True)
class ElasticityReport:
    rows: dict[str, ElasticityRow]
    # Range elasticity including the growth of attenuation with path length.
    total_range: ElasticityRow
    rel_step: float

    def __getitem__(self, name: str) -> ElasticityRow:
        return self.rows[name]


@dataclass(frozen=True)
class _Operating:
    """Scalar ingredients of the mean-energy closed form at one operating point."""

    peak_power: float
    pulse_width: float
    diameter: float
    jitter_sigma: float
    mu_lnR: float
    sigma2_lnR: float
    mu_A: float
    sigma2_A: float


def _operating_point(s: Scenario) -> _Operating:
    validate(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClosureWarning)
        rs = s.range_stats()
    atten = attenuation_stats(s.atmosphere, rs, s.z_mean)
    return _Operating(s.tx.peak_power, s.tx.pulse_width, s.antenna.diameter, s.antenna.jitter_sigma,
                      rs.mu_lnR, rs.sigma2_lnR, atten.mu_A, atten.sigma2_A)


def _log_mean_energy(s: Scenario, op: _Operating) -> float:
    ant = replace(s.antenna, diameter=op.diameter, jitter_sigma=op.jitter_sigma)
    e = mean_energy_closed_form(op.peak_power, op.pulse_width, boresight_gain(ant), beam_sharpness(ant),
                                op.jitter_sigma, s.tx.wavelength, op.mu_lnR, op.sigma2_lnR,
                                op.mu_A, op.sigma2_A)
    return math.log(e)


def _perturbed(op: _Operating, name: str, factor: float) -> _Operating:
    fields = {"P_t": "peak_power", "tau_p": "pulse_width", "D": "diameter", "sigma_theta": "jitter_sigma"}
    if name in fields:
        attr = fields[name]
        return replace(op, **{attr: getattr(op, attr) * factor})
    if name == "R_bar":
        # Scaling the mean range shifts the log-range mean; its log-variance stays put.
        return replace(op, mu_lnR=op.mu_lnR + math.log(factor))
    raise InvalidArgumentError(f"unknown elasticity parameter {name!r}")


def _jitter_ratio(s: Scenario) -> float:
    k = beam_sharpness(s.antenna)
    a = 2.0 * k * s.antenna.jitter_sigma**2
    return a / (1.0 + a)


def analytic_elasticities(s: Scenario) -> dict[str, float]:
    validate(s)
    jr = _jitter_ratio(s)
    return {
        "P_t": 1.0,
        "tau_p": 1.0,
        "D": 2.0 - jr,
        "sigma_theta": -jr,
        "R_bar": -2.0,
        "mu_A": -DB_TO_NEPER,
        "sigma2_A": 0.5 * DB_TO_NEPER**2,
    }


def finite_difference_elasticity(s: Scenario, parameter: str, rel_step: float = DEFAULT_STEP) -> float:
    """Central-difference estimate of one row of the elasticity table."""
    if parameter not in PARAMETERS:
        raise InvalidArgumentError(f"unknown elasticity parameter {parameter!r}; expected one of {PARAMETERS}")
    if not 0 < rel_step <= 0.1:
        raise InvalidArgumentError(f"rel_step must be in (0, 0.1], got {rel_step}")
    op = _operating_point(s)
    if parameter in _ADDITIVE:
        attr = "mu_A" if parameter == "mu_A" else "sigma2_A"
        x = getattr(op, attr)
        h = rel_step * max(abs(x), 1.0)
        up = _log_mean_energy(s, replace(op, **{attr: x + h}))
        down = _log_mean_energy(s, replace(op, **{attr: x - h}))
        return (up - down) / (2.0 * h)
    up = _log_mean_energy(s, _perturbed(op, parameter, 1.0 + rel_step))
    down = _log_mean_energy(s, _perturbed(op, parameter, 1.0 - rel_step))
    return (up - down) / (math.log1p(rel_step) - math.log1p(-rel_step))


def _total_range_elasticity(s: Scenario, rel_step: float) -> ElasticityRow:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClosureWarning)
        rs = s.range_stats()
    z = s.z_mean
    base_atten = attenuation_stats(s.atmosphere, rs, z)
    analytic = -2.0 - DB_TO_NEPER * base_atten.mu_A + DB_TO_NEPER**2 * base_atten.sigma2_A

    def log_e(factor):
        # Geometry scaled as a whole: mean and spread grow together, C_R^2 fixed.
        scaled = RangeStats(rs.mean_R * factor, rs.var_R * factor**2, rs.cv2,
                            rs.mu_lnR + math.log(factor), rs.sigma2_lnR)
        att = attenuation_stats(s.atmosphere, scaled, z * factor)
        e = mean_energy_closed_form(s.tx.peak_power, s.tx.pulse_width, boresight_gain(s.antenna),
                                    beam_sharpness(s.antenna), s.antenna.jitter_sigma, s.tx.wavelength,
                                    scaled.mu_lnR, scaled.sigma2_lnR, att.mu_A, att.sigma2_A)
        return math.log(e)

    fd = (log_e(1.0 + rel_step) - log_e(1.0 - rel_step)) / (math.log1p(rel_step) - math.log1p(-rel_step))
    return ElasticityRow(analytic, fd)


def elasticity_report(s: Scenario, rel_step: float = DEFAULT_STEP) -> ElasticityReport:
    analytic = analytic_elasticities(s)
    rows = {
        name: ElasticityRow(analytic[name], finite_difference_elasticity(s, name, rel_step), UNITS[name])
        for name in PARAMETERS
    }
    return ElasticityReport(rows, _total_range_elasticity(s, rel_step), rel_step)
