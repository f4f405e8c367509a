"""Aperture gain, Gaussian near-boresight pattern and jitter-averaged gain statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, require_valid

# Half-power beamwidth of a uniformly illuminated circular aperture, in units of lambda/D.
BEAMWIDTH_FACTOR = 0.886
# D_crit = CRITICAL_DIAMETER_FACTOR * lambda / sigma_theta
CRITICAL_DIAMETER_FACTOR = 0.376


@dataclass(frozen=True)
class AntennaParams:
    diameter: float
    wavelength: float
    aperture_efficiency: float = 1.0
    jitter_sigma: float = 0.0

    def problems(self) -> list[str]:
        out = []
        if not (self.diameter > 0 and math.isfinite(self.diameter)):
            out.append(f"antenna diameter must be positive, got {self.diameter}")
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            out.append(f"wavelength must be positive, got {self.wavelength}")
        if not 0 < self.aperture_efficiency <= 1:
            out.append(f"aperture efficiency must be in (0, 1], got {self.aperture_efficiency}")
        if not (self.jitter_sigma >= 0 and math.isfinite(self.jitter_sigma)):
            out.append(f"jitter sigma must be >= 0, got {self.jitter_sigma}")
        return out

    @property
    def theta_3db(self) -> float:
        return BEAMWIDTH_FACTOR * self.wavelength / self.diameter


@dataclass(frozen=True)
class GainStats:
    g0: float
    k_sharp: float
    mean_G: float
    var_G: float
    mu_lnG: float
    sigma2_lnG: float


def boresight_gain(p: AntennaParams) -> float:
    """eta * (pi*D/lambda)^2, i.e. eta * 4*pi*A/lambda^2 for a circular aperture."""
    require_valid(p)
    return p.aperture_efficiency * (math.pi * p.diameter / p.wavelength) ** 2


def beam_sharpness(p: AntennaParams) -> float:
    """k = 4 ln 2 / theta_3dB^2 (rad^-2), so that G(theta_3dB/2) = G0/2."""
    require_valid(p)
    return 4.0 * math.log(2.0) / p.theta_3db**2


def beamwidth_from_sharpness(k_sharp: float) -> float:
    return 2.0 * math.sqrt(math.log(2.0) / k_sharp)


def gain_at_angle(g0: float, k_sharp: float, theta):
    """G0 * exp(-k theta^2); ``theta`` may be a scalar or a numpy array."""
    if not k_sharp > 0:
        raise InvalidArgumentError(f"k_sharp must be positive, got {k_sharp}")
    if hasattr(theta, "__array__"):
        import numpy as np

        return g0 * np.exp(-k_sharp * np.square(theta))
    return g0 * math.exp(-k_sharp * theta * theta)


def jitter_gain_stats(p: AntennaParams) -> GainStats:
    """Exact mean and variance of G(theta) for theta ~ N(0, sigma_theta^2), plus log-normal closure."""
    g0 = boresight_gain(p)
    k = beam_sharpness(p)
    s2 = p.jitter_sigma**2
    a = 2.0 * k * s2
    mean_G = g0 / math.sqrt(1.0 + a)
    # (1+2a)^(-1/2) - (1+a)^(-1), written to stay accurate for tiny a.
    var_G = g0**2 * (math.expm1(-0.5 * math.log1p(2.0 * a)) + a / (1.0 + a))
    var_G = max(var_G, 0.0)
    sigma2 = math.log1p(a)
    return GainStats(
        g0=g0,
        k_sharp=k,
        mean_G=mean_G,
        var_G=var_G,
        mu_lnG=math.log(g0) - 0.5 * sigma2,
        sigma2_lnG=sigma2,
    )


def critical_diameter(wavelength: float, jitter_sigma: float) -> float:
    """Aperture diameter beyond which jitter erodes the gain benefit of a larger dish."""
    if not wavelength > 0:
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength}")
    if jitter_sigma == 0:
        raise InvalidArgumentError("critical diameter is unbounded for zero pointing jitter")
    if not jitter_sigma > 0:
        raise InvalidArgumentError(f"jitter sigma must be positive, got {jitter_sigma}")
    return CRITICAL_DIAMETER_FACTOR * wavelength / jitter_sigma
