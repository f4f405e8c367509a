"""Per-pulse received power/energy and the log-normal received-energy law.

Units are fixed: W, J, s, Hz, m, rad, and dB for attenuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .antenna import AntennaParams, beam_sharpness, boresight_gain
from .atmosphere import AttenuationStats
from .errors import InvalidArgumentError, require_valid
from .kinematics import RangeStats

SPEED_OF_LIGHT = 299_792_458.0
DB_TO_NEPER = math.log(10.0) / 10.0  # ln(10)/10: converts a dB loss to a natural-log loss
MAX_DUTY_CYCLE = 0.1


@dataclass(frozen=True)
class TransmitterParams:
    peak_power: float
    pulse_width: float
    prf: float
    frequency: float
    wavelength: float | None = None

    def __post_init__(self):
        if self.wavelength is None and self.frequency > 0:
            object.__setattr__(self, "wavelength", SPEED_OF_LIGHT / self.frequency)

    @property
    def duty_cycle(self) -> float:
        return self.pulse_width * self.prf

    def problems(self) -> list[str]:
        out = []
        for name in ("peak_power", "pulse_width", "prf", "frequency"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                out.append(f"{name} must be positive, got {value}")
        if self.wavelength is None or not self.wavelength > 0:
            out.append(f"wavelength must be positive, got {self.wavelength}")
        elif self.frequency > 0:
            expected = SPEED_OF_LIGHT / self.frequency
            if abs(self.wavelength - expected) > 1e-9 * expected:
                out.append(
                    f"wavelength {self.wavelength:.9g} m is inconsistent with "
                    f"c/f = {expected:.9g} m"
                )
        return out


@dataclass(frozen=True)
class LogEnergyParams:
    """ln E_r ~ N(mu_lnE, sigma2_lnE), E_r in joules."""

    mu_lnE: float
    sigma2_lnE: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_lnE) and math.isfinite(self.sigma2_lnE)):
            raise InvalidArgumentError("log-energy parameters must be finite")
        if self.sigma2_lnE < 0:
            raise InvalidArgumentError(f"sigma2_lnE must be >= 0, got {self.sigma2_lnE}")

    @property
    def sigma_lnE(self) -> float:
        return math.sqrt(self.sigma2_lnE)

    @property
    def median_E(self) -> float:
        return math.exp(self.mu_lnE)


def received_power(tx: TransmitterParams, gain: float, range_m: float, atten_dB: float) -> float:
    """P_r = P_t G (lambda / 4 pi R)^2 10^(-A/10)."""
    require_valid(tx)
    if not range_m > 0:
        raise InvalidArgumentError(f"range must be positive, got {range_m}")
    if not gain > 0:
        raise InvalidArgumentError(f"gain must be positive, got {gain}")
    if not atten_dB >= 0:
        raise InvalidArgumentError(f"attenuation must be >= 0 dB, got {atten_dB}")
    spread = (tx.wavelength / (4.0 * math.pi * range_m)) ** 2
    return tx.peak_power * gain * spread * 10.0 ** (-atten_dB / 10.0)


def pulse_energy(power_W: float, pulse_width_s: float) -> float:
    if not (power_W > 0 and pulse_width_s > 0):
        raise InvalidArgumentError("power and pulse width must be positive")
    return power_W * pulse_width_s


def deterministic_log_energy(tx: TransmitterParams) -> float:
    """ln(P_t tau_p) - 2 ln(4 pi / lambda): the non-random part of ln E_r."""
    return math.log(tx.peak_power * tx.pulse_width) - 2.0 * math.log(4.0 * math.pi / tx.wavelength)


def log_energy_params(tx: TransmitterParams, gain, range_stats: RangeStats,
                      atten: AttenuationStats) -> LogEnergyParams:
    """Compose the log-energy mean and variance from independent gain, range and attenuation terms.

    ``gain`` is a :class:`~hpmkill.antenna.GainStats`.
    """
    require_valid(tx)
    mu = (
        deterministic_log_energy(tx)
        + gain.mu_lnG
        - 2.0 * range_stats.mu_lnR
        - DB_TO_NEPER * atten.mu_A
    )
    var = gain.sigma2_lnG + 4.0 * range_stats.sigma2_lnR + DB_TO_NEPER**2 * atten.sigma2_A
    return LogEnergyParams(mu, var)


def mean_energy_closed_form(peak_power: float, pulse_width: float, g0: float, k_sharp: float,
                            jitter_sigma: float, wavelength: float, mu_lnR: float,
                            sigma2_lnR: float, mu_A: float, sigma2_A: float) -> float:
    """Closed-form mean received pulse energy from its scalar ingredients."""
    log_e = (
        math.log(peak_power * pulse_width * g0)
        - 0.5 * math.log1p(2.0 * k_sharp * jitter_sigma**2)
        + 2.0 * math.log(wavelength / (4.0 * math.pi))
        - 2.0 * mu_lnR
        + 2.0 * sigma2_lnR
        - DB_TO_NEPER * mu_A
        + 0.5 * DB_TO_NEPER**2 * sigma2_A
    )
    return math.exp(log_e)


def mean_received_energy(tx: TransmitterParams, antenna: AntennaParams, range_stats: RangeStats,
                         atten: AttenuationStats) -> float:
    """E[E_r] with log-normal range and Gaussian dB attenuation."""
    require_valid(tx)
    return mean_energy_closed_form(
        tx.peak_power,
        tx.pulse_width,
        boresight_gain(antenna),
        beam_sharpness(antenna),
        antenna.jitter_sigma,
        tx.wavelength,
        range_stats.mu_lnR,
        range_stats.sigma2_lnR,
        atten.mu_A,
        atten.sigma2_A,
    )


def pulse_count(prf: float, dwell: float) -> float:
    """N = PRF * T, kept real-valued."""
    if not dwell >= 0:
        raise InvalidArgumentError(f"dwell must be >= 0, got {dwell}")
    if not prf > 0:
        raise InvalidArgumentError(f"prf must be positive, got {prf}")
    return prf * dwell
