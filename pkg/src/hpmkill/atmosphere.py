"""Free-space spreading and gaseous + rain attenuation statistics along the slant path.

Specific rain attenuation follows the power law ``gamma_rain = k * R_rain**alpha``
with a Gamma-distributed rain rate ``R_rain ~ Gamma(shape, rate)``. Gaseous
absorption is a fixed input in dB/km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

from .errors import GeometryError, InvalidArgumentError, require_valid
from .kinematics import RangeStats
from .numerics import log_gamma

# |z|/R may exceed 1 by this much from rounding before it counts as a geometry error.
_ELEVATION_SLACK = 1e-12


@dataclass(frozen=True)
class AtmosphereParams:
    gamma_gas: float = 0.0
    rain_k: float = 0.0
    rain_alpha: float = 1.0
    rain_shape: float = 1.0
    rain_rate_param: float = 1.0
    rain_enabled: bool = False

    def problems(self) -> list[str]:
        out = []
        if not (self.gamma_gas >= 0 and math.isfinite(self.gamma_gas)):
            out.append(f"gamma_gas must be >= 0 dB/km, got {self.gamma_gas}")
        if self.rain_enabled:
            if not self.rain_k >= 0:
                out.append(f"rain_k must be >= 0, got {self.rain_k}")
            for name in ("rain_alpha", "rain_shape", "rain_rate_param"):
                value = getattr(self, name)
                if not (value > 0 and math.isfinite(value)):
                    out.append(f"{name} must be positive when rain is enabled, got {value}")
        return out


@dataclass(frozen=True)
class AttenuationStats:
    mu_A: float
    sigma2_A: float
    elevation: float


def free_space_loss(range_m: float, wavelength: float) -> float:
    """Friis spreading loss (4 pi R / lambda)^2 as a power ratio."""
    if not range_m > 0:
        raise InvalidArgumentError(f"range must be positive, got {range_m}")
    if not wavelength > 0:
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength}")
    return (4.0 * math.pi * range_m / wavelength) ** 2


def elevation_angle(z_mean: float, mean_R: float) -> float:
    if not mean_R > 0:
        raise GeometryError(f"mean range must be positive, got {mean_R}")
    ratio = z_mean / mean_R
    if abs(ratio) > 1.0 + _ELEVATION_SLACK:
        raise GeometryError(f"|z| = {abs(z_mean):.6g} m exceeds mean range {mean_R:.6g} m")
    return math.asin(max(-1.0, min(1.0, ratio)))


def rain_attenuation_moments(p: AtmosphereParams) -> tuple[float, float]:
    """Mean (dB/km) and variance ((dB/km)^2) of k * R_rain^alpha for Gamma rain rate."""
    require_valid(p)
    if not p.rain_enabled or p.rain_k == 0:
        return 0.0, 0.0
    a, shape, rate = p.rain_alpha, p.rain_shape, p.rain_rate_param
    lg = log_gamma(shape)
    # E[R^m] = Gamma(shape + m) / (rate^m Gamma(shape))
    m1 = math.exp(log_gamma(shape + a) - lg - a * math.log(rate))
    m2 = math.exp(log_gamma(shape + 2.0 * a) - lg - 2.0 * a * math.log(rate))
    mean = p.rain_k * m1
    var = p.rain_k**2 * max(m2 - m1 * m1, 0.0)
    return mean, var


def attenuation_stats(p: AtmosphereParams, range_stats: RangeStats, z_mean: float) -> AttenuationStats:
    """Mean and variance (dB, dB^2) of A = (gamma_gas + gamma_rain cos(phi)) R / 1000.

    R and gamma_rain are independent; the rain path uses the mean elevation angle.
    """
    require_valid(p)
    phi = elevation_angle(z_mean, range_stats.mean_R)
    cos_phi = math.cos(phi)
    g_mean, g_var = rain_attenuation_moments(p)
    mean_R, var_R = range_stats.mean_R, range_stats.var_R
    gas = p.gamma_gas
    mu_A = (gas + g_mean * cos_phi) * mean_R / 1000.0
    sigma2_A = (
        gas**2 * var_R
        + cos_phi**2 * (g_var * (var_R + mean_R**2) + g_mean**2 * var_R)
        + 2.0 * gas * cos_phi * g_mean * var_R
    ) / 1.0e6
    return AttenuationStats(mu_A, sigma2_A, phi)


def load_rain_coefficients(path=None) -> dict[float, tuple[float, float]]:
    """Read a ``frequency_GHz k alpha`` table; defaults to the bundled file.

    The bundled values are convenience data (horizontal polarisation, evaluated
    from the ITU-R P.838-3 regression) and are not normative.
    """
    if path is None:
        text = resources.files("hpmkill").joinpath("data/rain_coefficients.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 3:
            raise InvalidArgumentError(f"line {lineno}: expected 'frequency_GHz k alpha', got {raw!r}")
        f_ghz, k, alpha = (float(x) for x in fields)
        table[f_ghz] = (k, alpha)
    return table
