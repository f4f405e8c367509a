"""UAV position statistics and slant-range moments.

The target follows a constant-velocity model driven by white acceleration
noise, so its position at time t is Gaussian with mean ``r0 + v0*t`` and
isotropic covariance ``sigma_a**2 * t**3 / 3 * I``. Slant-range moments are
obtained with a second-order delta expansion of the vector norm and then
closed with a moment-matched log-normal.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ClosureWarning, GeometryError, InvalidArgumentError, require_valid

# Soft validity bound on C_R^2 for the log-normal range closure.
CV2_VALIDITY_BOUND = 0.2


def _vec3(v) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.size != 3 or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"expected a finite 3-vector, got {v!r}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class KinematicState:
    r0: tuple[float, float, float]
    v0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sigma_a: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r0", _vec3(self.r0))
        object.__setattr__(self, "v0", _vec3(self.v0))

    def problems(self) -> list[str]:
        if not (self.sigma_a >= 0 and math.isfinite(self.sigma_a)):
            return [f"sigma_a must be a finite value >= 0, got {self.sigma_a}"]
        return []


@dataclass(frozen=True)
class PositionMoments:
    """Mean position and isotropic per-axis variance (P_rr = cov_scale * I3)."""

    mean_r: tuple[float, float, float]
    cov_scale: float

    def __post_init__(self):
        object.__setattr__(self, "mean_r", _vec3(self.mean_r))
        if not self.cov_scale >= 0:
            raise InvalidArgumentError(f"cov_scale must be >= 0, got {self.cov_scale}")

    @property
    def mean_norm2(self) -> float:
        return float(sum(c * c for c in self.mean_r))

    # The three scalars the range expansion needs; an anisotropic covariance
    # would only have to supply these.
    @property
    def trace_p(self) -> float:
        return 3.0 * self.cov_scale

    @property
    def trace_p2(self) -> float:
        return 3.0 * self.cov_scale**2

    @property
    def quad_form(self) -> float:
        """r_bar^T P_rr r_bar."""
        return self.cov_scale * self.mean_norm2


@dataclass(frozen=True)
class RangeStats:
    mean_R: float
    var_R: float
    cv2: float
    mu_lnR: float
    sigma2_lnR: float

    @property
    def std_R(self) -> float:
        return math.sqrt(self.var_R)


def _check_time(t: float) -> float:
    if not (t >= 0 and math.isfinite(t)):
        raise InvalidArgumentError(f"time must be a finite value >= 0, got {t}")
    return float(t)


def propagate_mean(state: KinematicState, t: float) -> tuple[float, float, float]:
    t = _check_time(t)
    require_valid(state)
    return tuple(r + v * t for r, v in zip(state.r0, state.v0))


def position_covariance(state: KinematicState, t: float) -> PositionMoments:
    t = _check_time(t)
    return PositionMoments(propagate_mean(state, t), state.sigma_a**2 * t**3 / 3.0)


def range_second_moment(pm: PositionMoments) -> float:
    """E[R^2] = tr(P_rr) + |r_bar|^2."""
    return pm.trace_p + pm.mean_norm2


def range_moments_from_traces(mean_norm2: float, trace_p: float, trace_p2: float,
                              quad_form: float) -> tuple[float, float]:
    m2 = trace_p + mean_norm2
    if not m2 > 0:
        raise GeometryError("slant range second moment is zero (target at the origin)")
    v2 = trace_p2 + 4.0 * quad_form
    mean_R = math.sqrt(m2) - v2 / (8.0 * m2**1.5)
    var_R = v2 / (4.0 * m2)
    if not mean_R > 0:
        raise GeometryError(
            f"delta-method mean range is non-positive ({mean_R:.6g} m); spread too large"
        )
    return mean_R, var_R


def range_moments_delta(pm: PositionMoments) -> tuple[float, float]:
    """Delta-method (mean_R, var_R) of the slant range |r(t)|."""
    return range_moments_from_traces(pm.mean_norm2, pm.trace_p, pm.trace_p2, pm.quad_form)


def lognormal_fit_range(mean_R: float, var_R: float) -> RangeStats:
    """Moment-matched log-normal closure of the slant range.

    Warns with :class:`ClosureWarning` when C_R^2 exceeds the 0.2 validity bound.
    """
    if not (mean_R > 0 and math.isfinite(mean_R)):
        raise InvalidArgumentError(f"mean_R must be positive, got {mean_R}")
    if not var_R >= 0:
        raise InvalidArgumentError(f"var_R must be >= 0, got {var_R}")
    cv2 = var_R / mean_R**2
    if cv2 > CV2_VALIDITY_BOUND:
        warnings.warn(
            f"range C_R^2 = {cv2:.3g} exceeds {CV2_VALIDITY_BOUND}; "
            "log-normal range closure may be inaccurate",
            ClosureWarning,
            stacklevel=2,
        )
    sigma2 = math.log1p(cv2)
    return RangeStats(mean_R, var_R, cv2, math.log(mean_R) - 0.5 * sigma2, sigma2)


def lognormal_moments(mu: float, sigma2: float) -> tuple[float, float]:
    """(mean, variance) of a log-normal with log-mean ``mu`` and log-variance ``sigma2``."""
    mean = math.exp(mu + 0.5 * sigma2)
    return mean, mean**2 * math.expm1(sigma2)


def range_stats(state: KinematicState, t: float) -> RangeStats:
    return lognormal_fit_range(*range_moments_delta(position_covariance(state, t)))


def sigma_a_for_cv2(r0, v0, t: float, target_cv2: float) -> float:
    """Acceleration noise level giving a delta-method C_R^2 of ``target_cv2`` at ``t``."""
    from scipy.optimize import brentq

    t = _check_time(t)
    if t == 0:
        raise InvalidArgumentError("C_R^2 is identically zero at t = 0")
    if not target_cv2 > 0:
        raise InvalidArgumentError("target_cv2 must be positive")
    mean_r = propagate_mean(KinematicState(r0, v0), t)

    def gap(log_cov):
        mean_R, var_R = range_moments_delta(PositionMoments(mean_r, math.exp(log_cov)))
        return var_R / mean_R**2 - target_cv2

    norm2 = sum(c * c for c in mean_r)
    if norm2 == 0:
        raise GeometryError("mean position is at the origin")
    # C_R^2 rises monotonically up to cov_scale = (2/3)|r_bar|^2, where it peaks
    # at about 0.1246, and then falls back toward about 0.091.
    lo, hi = math.log(norm2) - 60.0, math.log(2.0 / 3.0 * norm2)
    if gap(hi) < 0:
        raise InvalidArgumentError(
            f"C_R^2 = {target_cv2} is not reachable under the delta-method model"
        )
    log_cov = brentq(gap, lo, hi, xtol=1e-14)
    return math.sqrt(3.0 * math.exp(log_cov) / t**3)
