"""Engagement scenario: parameter bundle, validation, the analytic pipeline and config files.

Config files are flat ``key = value`` text with the unit in every key name::

    peak_power_W = 200000
    frequency_Hz = 2.45e9
    r0_m = 1000 0 0
    rain_enabled = false

``#`` starts a comment. The wavelength is always derived as c / frequency.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

from . import antenna as ant
from .atmosphere import AtmosphereParams, AttenuationStats, attenuation_stats, rain_attenuation_moments
from .errors import ClosureWarning, GeometryError, InvalidArgumentError, ValidationError
from .kill import KillModel, cumulative_kill_probability, mean_kill_probability
from .kinematics import (
    CV2_VALIDITY_BOUND,
    KinematicState,
    PositionMoments,
    RangeStats,
    lognormal_fit_range,
    position_covariance,
    range_moments_delta,
)
from .link import (
    MAX_DUTY_CYCLE,
    LogEnergyParams,
    TransmitterParams,
    log_energy_params,
    mean_received_energy,
    pulse_count,
    pulse_energy,
    received_power,
)
from .numerics import MAX_GH_ORDER, gauss_hermite

LOGISTIC_SATURATION = 700.0
# Below this mean-energy / threshold ratio the kill probability sits on the
# logistic floor and cmd_eval prints a note saying so.
FLOOR_NOTE_RATIO = 1e-3


@dataclass(frozen=True)
class Scenario:
    tx: TransmitterParams
    antenna: ant.AntennaParams
    kill: KillModel
    dwell: float
    kinematics: KinematicState = field(default_factory=lambda: KinematicState((1000.0, 0.0, 0.0)))
    eval_time: float = 0.0
    atmosphere: AtmosphereParams = field(default_factory=AtmosphereParams)
    gh_order: int = 10
    # When set, overrides the magnitude of the kinematic mean position.
    range_nominal: float | None = None

    def problems(self) -> list[str]:
        out = []
        for part in (self.tx, self.antenna, self.kill, self.kinematics, self.atmosphere):
            out.extend(part.problems())
        if self.tx.wavelength is not None and self.tx.wavelength > 0:
            if abs(self.tx.wavelength - self.antenna.wavelength) > 1e-9 * self.tx.wavelength:
                out.append(
                    f"antenna wavelength {self.antenna.wavelength} m differs from "
                    f"transmitter wavelength {self.tx.wavelength} m"
                )
        if not (self.eval_time >= 0 and math.isfinite(self.eval_time)):
            out.append(f"eval_time must be >= 0, got {self.eval_time}")
        if not (self.dwell >= 0 and math.isfinite(self.dwell)):
            out.append(f"dwell must be >= 0, got {self.dwell}")
        if isinstance(self.gh_order, bool) or not isinstance(self.gh_order, int) \
                or not 1 <= self.gh_order <= MAX_GH_ORDER:
            out.append(f"gh_order must be an integer in [1, {MAX_GH_ORDER}], got {self.gh_order}")
        if self.range_nominal is not None and not (self.range_nominal > 0 and math.isfinite(self.range_nominal)):
            out.append(f"range_nominal must be positive, got {self.range_nominal}")
        return out

    def position_moments(self) -> PositionMoments:
        pm = position_covariance(self.kinematics, self.eval_time)
        if self.range_nominal is None:
            return pm
        norm = math.sqrt(pm.mean_norm2)
        direction = tuple(c / norm for c in pm.mean_r) if norm > 0 else (1.0, 0.0, 0.0)
        return PositionMoments(tuple(self.range_nominal * c for c in direction), pm.cov_scale)

    def range_stats(self) -> RangeStats:
        return lognormal_fit_range(*range_moments_delta(self.position_moments()))

    @property
    def z_mean(self) -> float:
        return self.position_moments().mean_r[2]

    def with_param(self, name: str, value: float) -> "Scenario":
        """Copy with one sweepable parameter changed.

        ``mu_A`` is set by solving for the gaseous rate that yields the requested
        mean attenuation at the current geometry.
        """
        replace = dataclasses.replace
        if name == "E_th":
            return replace(self, kill=replace(self.kill, e_threshold=value))
        if name == "P_t":
            return replace(self, tx=replace(self.tx, peak_power=value))
        if name == "D":
            return replace(self, antenna=replace(self.antenna, diameter=value))
        if name == "sigma_theta":
            return replace(self, antenna=replace(self.antenna, jitter_sigma=value))
        if name == "R_bar":
            return replace(self, range_nominal=value)
        if name == "T":
            return replace(self, dwell=value)
        if name == "mu_A":
            rs = self.range_stats()
            phi = math.asin(max(-1.0, min(1.0, self.z_mean / rs.mean_R)))
            rain_mean, _ = rain_attenuation_moments(self.atmosphere)
            gas = value * 1000.0 / rs.mean_R - rain_mean * math.cos(phi)
            if gas < 0:
                raise InvalidArgumentError(
                    f"mu_A = {value} dB is below the rain-only attenuation at this range"
                )
            return replace(self, atmosphere=replace(self.atmosphere, gamma_gas=gas))
        raise InvalidArgumentError(f"unknown sweep parameter {name!r}")


SWEEP_PARAMETERS = ("E_th", "P_t", "D", "R_bar", "T", "sigma_theta", "mu_A")


def baseline_scenario(**overrides) -> Scenario:
    """Baseline engagement: 200 kW, 0.5 us, 1 kHz, 2.45 GHz, D = 1.5 m, 1 mrad, 1 km.

    The kinematic defaults (r0 = (1000, 0, 0) m, v0 = 0, sigma_a = 0, t = 0) put the
    target at the nominal range; they and the 0.1 s dwell are modelling choices.
    """
    tx = TransmitterParams(peak_power=200e3, pulse_width=0.5e-6, prf=1e3, frequency=2.45e9)
    s = Scenario(
        tx=tx,
        antenna=ant.AntennaParams(diameter=1.5, wavelength=tx.wavelength, jitter_sigma=1e-3),
        kill=KillModel(e_threshold=1e-2, slope=50.0),
        dwell=0.1,
        atmosphere=AtmosphereParams(gamma_gas=0.2),
    )
    return dataclasses.replace(s, **overrides) if overrides else s


def validate(s: Scenario) -> list[str]:
    """Raise :class:`ValidationError` on hard violations; return soft warnings."""
    failures = s.problems()
    if failures:
        raise ValidationError(failures)
    notes = []
    if s.tx.duty_cycle > MAX_DUTY_CYCLE:
        notes.append(f"duty cycle {s.tx.duty_cycle:.3g} exceeds {MAX_DUTY_CYCLE}")
    try:
        pm = s.position_moments()
        mean_R, var_R = range_moments_delta(pm)
    except GeometryError as exc:
        notes.append(f"degenerate geometry: {exc}")
        return notes
    cv2 = var_R / mean_R**2
    if cv2 > CV2_VALIDITY_BOUND:
        notes.append(f"range C_R^2 = {cv2:.3g} exceeds {CV2_VALIDITY_BOUND}; log-normal range closure is loose")
    if abs(pm.mean_r[2]) > mean_R:
        notes.append(f"|z| = {abs(pm.mean_r[2]):.6g} m exceeds mean range {mean_R:.6g} m")
        return notes
    if s.antenna.jitter_sigma > 0:
        d_crit = ant.critical_diameter(s.antenna.wavelength, s.antenna.jitter_sigma)
        if s.antenna.diameter > d_crit:
            notes.append(
                f"aperture {s.antenna.diameter} m exceeds the critical diameter {d_crit:.4g} m "
                "(jitter-dominated)"
            )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClosureWarning)
        rs = lognormal_fit_range(mean_R, var_R)
        mean_E = mean_received_energy(s.tx, s.antenna, rs, attenuation_stats(s.atmosphere, rs, pm.mean_r[2]))
    if s.kill.slope * mean_E > LOGISTIC_SATURATION:
        notes.append(f"logistic saturated: slope * mean energy = {s.kill.slope * mean_E:.3g}")
    return notes


@dataclass(frozen=True)
class EngagementSummary:
    range: RangeStats
    gain: ant.GainStats
    atten: AttenuationStats
    log_energy: LogEnergyParams
    mean_E: float
    deterministic_E: float
    p_kill: float
    n_pulses: float
    p_tot: float
    warnings: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "mean_R_m": self.range.mean_R,
            "var_R_m2": self.range.var_R,
            "cv2_R": self.range.cv2,
            "mu_lnR": self.range.mu_lnR,
            "sigma2_lnR": self.range.sigma2_lnR,
            "g0": self.gain.g0,
            "k_sharp_per_rad2": self.gain.k_sharp,
            "mean_G": self.gain.mean_G,
            "var_G": self.gain.var_G,
            "mu_lnG": self.gain.mu_lnG,
            "sigma2_lnG": self.gain.sigma2_lnG,
            "mu_A_dB": self.atten.mu_A,
            "sigma2_A_dB2": self.atten.sigma2_A,
            "elevation_rad": self.atten.elevation,
            "mu_lnE": self.log_energy.mu_lnE,
            "sigma2_lnE": self.log_energy.sigma2_lnE,
            "mean_E_J": self.mean_E,
            "deterministic_E_J": self.deterministic_E,
            "p_kill": self.p_kill,
            "n_pulses": self.n_pulses,
            "p_tot": self.p_tot,
            "warnings": list(self.warnings),
            "notes": list(self.notes),
        }


def evaluate(s: Scenario) -> EngagementSummary:
    """Run kinematics -> antenna -> atmosphere -> link -> kill for one scenario."""
    found = validate(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClosureWarning)
        rs = s.range_stats()
    gain = ant.jitter_gain_stats(s.antenna)
    atten = attenuation_stats(s.atmosphere, rs, s.z_mean)
    le = log_energy_params(s.tx, gain, rs, atten)
    mean_E = mean_received_energy(s.tx, s.antenna, rs, atten)
    det_E = pulse_energy(received_power(s.tx, gain.g0, rs.mean_R, atten.mu_A), s.tx.pulse_width)
    p_kill = mean_kill_probability(le, s.kill, gauss_hermite(s.gh_order))
    n = pulse_count(s.tx.prf, s.dwell)
    p_tot = cumulative_kill_probability(p_kill, s.tx.prf, s.dwell)
    notes = []
    if mean_E < FLOOR_NOTE_RATIO * s.kill.e_threshold:
        floor = 1.0 / (1.0 + math.exp(min(s.kill.slope * s.kill.e_threshold, LOGISTIC_SATURATION)))
        notes.append(
            f"mean received energy {mean_E:.4g} J is {s.kill.e_threshold / mean_E:.3g}x below "
            f"E_th = {s.kill.e_threshold:.4g} J; p_kill is the logistic floor "
            f"1/(1+exp(slope*E_th)) = {floor:.4g}, not a link-budget kill"
        )
    return EngagementSummary(rs, gain, atten, le, mean_E, det_E, p_kill, n, p_tot,
                             tuple(found), tuple(notes))


# ----------------------------------------------------------------------------
# Config files

REQUIRED_KEYS = (
    "peak_power_W", "pulse_width_s", "prf_Hz", "frequency_Hz", "antenna_diameter_m",
    "jitter_sigma_rad", "gamma_gas_dB_per_km", "e_threshold_J", "kill_slope_per_J", "dwell_s",
)
OPTIONAL_KEYS = {
    "aperture_efficiency": 1.0,
    "range_nominal_m": None,
    "r0_m": (1000.0, 0.0, 0.0),
    "v0_mps": (0.0, 0.0, 0.0),
    "sigma_a": 0.0,
    "eval_time_s": 0.0,
    "rain_enabled": False,
    "rain_k": 0.0,
    "rain_alpha": 1.0,
    "rain_shape": 1.0,
    "rain_rate_param": 1.0,
    "gh_order": 10,
}
CONFIG_KEYS = REQUIRED_KEYS + tuple(OPTIONAL_KEYS)
_VECTOR_KEYS = {"r0_m", "v0_mps"}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigError(ValidationError):
    pass


def _parse_value(key: str, text: str):
    if key in _VECTOR_KEYS:
        parts = text.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"'{key}' needs 3 values, got {len(parts)}")
        return tuple(float(p) for p in parts)
    if key == "rain_enabled":
        low = text.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"'{key}' must be true or false, got {text!r}")
    if key == "gh_order":
        return int(text)
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"'{key}' must be finite, got {text!r}")
    return value


def parse_config(text: str, source: str = "<config>") -> Scenario:
    values: dict = {}
    errors = []
    seen_at: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in CONFIG_KEYS:
            errors.append(f"{source}:{lineno}: unknown key '{key}'")
            continue
        if key in seen_at:
            errors.append(f"{source}:{lineno}: duplicate key '{key}' (first set on line {seen_at[key]})")
            continue
        seen_at[key] = lineno
        try:
            values[key] = _parse_value(key, val)
        except ValueError as exc:
            errors.append(f"{source}:{lineno}: bad value for '{key}': {exc}")
    for key in REQUIRED_KEYS:
        if key not in seen_at:
            errors.append(f"{source}: missing required key '{key}'")
    if errors:
        raise ConfigError(errors)
    for key, default in OPTIONAL_KEYS.items():
        values.setdefault(key, default)

    tx = TransmitterParams(values["peak_power_W"], values["pulse_width_s"], values["prf_Hz"],
                           values["frequency_Hz"])
    s = Scenario(
        tx=tx,
        antenna=ant.AntennaParams(values["antenna_diameter_m"], tx.wavelength or float("nan"),
                                  values["aperture_efficiency"], values["jitter_sigma_rad"]),
        kill=KillModel(values["e_threshold_J"], values["kill_slope_per_J"]),
        dwell=values["dwell_s"],
        kinematics=KinematicState(values["r0_m"], values["v0_mps"], values["sigma_a"]),
        eval_time=values["eval_time_s"],
        atmosphere=AtmosphereParams(values["gamma_gas_dB_per_km"], values["rain_k"], values["rain_alpha"],
                                    values["rain_shape"], values["rain_rate_param"], values["rain_enabled"]),
        gh_order=values["gh_order"],
        range_nominal=values["range_nominal_m"],
    )
    failures = s.problems()
    if failures:
        raise ConfigError([f"{source}: {msg}" for msg in failures])
    return s


def load_config(path) -> Scenario:
    with open(path) as fh:
        return parse_config(fh.read(), source=str(path))


def format_config(s: Scenario) -> str:
    """Serialise ``s``; ``parse_config(format_config(s)) == s`` for config-built scenarios."""
    def num(x):
        return repr(float(x))

    rows = [
        ("peak_power_W", num(s.tx.peak_power)),
        ("pulse_width_s", num(s.tx.pulse_width)),
        ("prf_Hz", num(s.tx.prf)),
        ("frequency_Hz", num(s.tx.frequency)),
        ("antenna_diameter_m", num(s.antenna.diameter)),
        ("aperture_efficiency", num(s.antenna.aperture_efficiency)),
        ("jitter_sigma_rad", num(s.antenna.jitter_sigma)),
    ]
    if s.range_nominal is not None:
        rows.append(("range_nominal_m", num(s.range_nominal)))
    rows += [
        ("r0_m", " ".join(num(c) for c in s.kinematics.r0)),
        ("v0_mps", " ".join(num(c) for c in s.kinematics.v0)),
        ("sigma_a", num(s.kinematics.sigma_a)),
        ("eval_time_s", num(s.eval_time)),
        ("gamma_gas_dB_per_km", num(s.atmosphere.gamma_gas)),
        ("rain_enabled", "true" if s.atmosphere.rain_enabled else "false"),
        ("rain_k", num(s.atmosphere.rain_k)),
        ("rain_alpha", num(s.atmosphere.rain_alpha)),
        ("rain_shape", num(s.atmosphere.rain_shape)),
        ("rain_rate_param", num(s.atmosphere.rain_rate_param)),
        ("e_threshold_J", num(s.kill.e_threshold)),
        ("kill_slope_per_J", num(s.kill.slope)),
        ("dwell_s", num(s.dwell)),
        ("gh_order", str(s.gh_order)),
    ]
    return "".join(f"{k} = {v}\n" for k, v in rows)
