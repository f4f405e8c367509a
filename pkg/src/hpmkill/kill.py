"""Logistic kill curve, quadrature-averaged per-pulse kill probability and dwell accumulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .link import LogEnergyParams
from .numerics import QuadratureRule, gauss_hermite

# Logistic arguments beyond this magnitude are treated as saturated.
_LOGISTIC_CLAMP = 700.0


@dataclass(frozen=True)
class KillModel:
    e_threshold: float
    slope: float  # J^-1

    def problems(self) -> list[str]:
        out = []
        if not (self.e_threshold > 0 and math.isfinite(self.e_threshold)):
            out.append(f"e_threshold must be positive, got {self.e_threshold}")
        if not (self.slope > 0 and math.isfinite(self.slope)):
            out.append(f"kill slope must be positive, got {self.slope}")
        return out


def logistic(x):
    x = np.clip(x, -_LOGISTIC_CLAMP, _LOGISTIC_CLAMP)
    return 1.0 / (1.0 + np.exp(-x))


def kill_probability(energy, km: KillModel):
    """1 / (1 + exp(-slope (E - E_th))); accepts scalars or arrays of energies in J."""
    out = logistic(km.slope * (np.asarray(energy, dtype=float) - km.e_threshold))
    return float(out) if np.ndim(out) == 0 else out


def mean_kill_probability(le: LogEnergyParams, km: KillModel,
                          rule: QuadratureRule | None = None) -> float:
    """E[P_kill(E)] for ln E ~ N(mu_lnE, sigma2_lnE), by Gauss-Hermite quadrature."""
    if le.sigma2_lnE == 0:
        return kill_probability(math.exp(le.mu_lnE), km)
    if rule is None:
        rule = gauss_hermite()
    z, w = rule.as_arrays()
    energies = np.exp(le.mu_lnE + math.sqrt(2.0) * le.sigma_lnE * z)
    return float(np.dot(w, logistic(km.slope * (energies - km.e_threshold))) / math.sqrt(math.pi))


def cumulative_kill_probability(p_bar: float, prf: float, dwell: float) -> float:
    """1 - (1 - p_bar)^(prf * dwell), evaluated in the log domain."""
    if not 0.0 <= p_bar <= 1.0:
        raise InvalidArgumentError(f"p_bar must be a probability, got {p_bar}")
    if not dwell >= 0:
        raise InvalidArgumentError(f"dwell must be >= 0, got {dwell}")
    if not prf > 0:
        raise InvalidArgumentError(f"prf must be positive, got {prf}")
    n = prf * dwell
    if n == 0:
        return 0.0
    if p_bar == 1.0:
        return 1.0
    return -math.expm1(n * math.log1p(-p_bar))
