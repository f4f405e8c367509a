"""Monte-Carlo oracle for the analytic closures.

``physical`` mode samples the underlying random variables per pulse (Gaussian
position, Gaussian pointing error, Gamma rain rate) and pushes them through the
exact Friis chain. ``surrogate`` mode samples ln E from the fitted analytic
normal law instead, so physical-vs-surrogate differences isolate closure error.

Samples are generated in fixed-size chunks, chunk ``i`` drawing from the stream
keyed by ``(seed, i)``. Chunk statistics are merged in chunk order, which makes
every report bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .antenna import jitter_gain_stats
from .atmosphere import elevation_angle
from .errors import InvalidArgumentError
from .kill import KillModel, logistic
from .link import DB_TO_NEPER, LogEnergyParams
from .numerics import sample_gamma, stream
from .scenario import Scenario, evaluate

MODES = ("physical", "surrogate")
DEFAULT_CHUNK = 1 << 16
# Stream key reserved for the per-engagement rain draw of ``freeze_rain``.
_FROZEN_RAIN_KEY = 1 << 40


@dataclass(frozen=True)
class MCConfig:
    n_samples: int
    seed: int = 0
    sampling_mode: str = "physical"
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK
    histogram_bins: int = 60
    # Draw one rain rate for the whole run instead of one per pulse.
    freeze_rain: bool = False

    def __post_init__(self):
        if not (isinstance(self.n_samples, (int, np.integer)) and self.n_samples >= 1):
            raise InvalidArgumentError(f"n_samples must be a positive integer, got {self.n_samples}")
        if self.sampling_mode not in MODES:
            raise InvalidArgumentError(f"sampling_mode must be one of {MODES}, got {self.sampling_mode!r}")
        if self.workers < 1 or self.chunk_size < 1 or self.histogram_bins < 1:
            raise InvalidArgumentError("workers, chunk_size and histogram_bins must be positive")


@dataclass(frozen=True)
class Moments:
    """Count, mean and sum of squared deviations of one sampled quantity."""

    n: int
    mean: float
    m2: float

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        if x.size and x[0] == x[-1] and np.all(x == x[0]):
            return cls(int(x.size), float(x[0]), 0.0)
        mean = float(np.mean(x))
        return cls(int(x.size), mean, float(np.sum(np.square(x - mean))))

    def merge(self, other: "Moments") -> "Moments":
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        return Moments(n, mean, self.m2 + other.m2 + delta * delta * self.n * other.n / n)

    @property
    def var(self) -> float:
        """Sample variance (divisor n - 1)."""
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    @property
    def se(self) -> float:
        return math.sqrt(self.var / self.n) if self.n > 0 else float("nan")


_EMPTY = Moments(0, 0.0, 0.0)


@dataclass(frozen=True)
class MCReport:
    n_samples: int
    mode: str
    empirical_mean_E: float
    empirical_var_E: float
    se_mean_E: float
    empirical_mu_lnE: float
    empirical_sigma2_lnE: float
    se_mu_lnE: float
    p_kill_hat: float
    p_kill_se: float  # standard error of the mean of logistic values
    p_kill_se_bernoulli: float  # sqrt(p(1-p)/n), treating each pulse as a kill/no-kill draw
    prf: float
    histogram_counts: tuple[int, ...]
    histogram_edges: tuple[float, ...]
    mean_G: float | None = None
    var_G: float | None = None
    se_mean_G: float | None = None

    def p_tot_hat(self, dwell: float) -> float:
        if dwell < 0:
            raise InvalidArgumentError(f"dwell must be >= 0, got {dwell}")
        n = self.prf * dwell
        if n == 0:
            return 0.0
        if self.p_kill_hat >= 1.0:
            return 1.0
        return -math.expm1(n * math.log1p(-self.p_kill_hat))

    def p_tot_curve(self, dwells) -> list[float]:
        return [self.p_tot_hat(t) for t in dwells]


@dataclass(frozen=True)
class _ChunkStats:
    energy: Moments
    log_energy: Moments
    p_kill: Moments
    gain: Moments
    hist: np.ndarray


@dataclass(frozen=True)
class _PhysicalModel:
    ln_const: float  # ln(P_t tau_p G0) + 2 ln(lambda / 4 pi)
    mean_r: np.ndarray
    sigma_r: float
    g0: float
    k_sharp: float
    jitter: float
    gamma_gas: float
    rain: tuple[float, float, float, float] | None  # (k, alpha, shape, rate)
    cos_phi: float

    @classmethod
    def from_scenario(cls, s: Scenario) -> "_PhysicalModel":
        summary = evaluate(s)
        pm = s.position_moments()
        gain = jitter_gain_stats(s.antenna)
        atm = s.atmosphere
        rain = None
        if atm.rain_enabled and atm.rain_k > 0:
            rain = (atm.rain_k, atm.rain_alpha, atm.rain_shape, atm.rain_rate_param)
        phi = elevation_angle(pm.mean_r[2], summary.range.mean_R)
        ln_const = (math.log(s.tx.peak_power * s.tx.pulse_width * gain.g0)
                    + 2.0 * math.log(s.tx.wavelength / (4.0 * math.pi)))
        return cls(ln_const, np.asarray(pm.mean_r), math.sqrt(pm.cov_scale), gain.g0, gain.k_sharp,
                   s.antenna.jitter_sigma, atm.gamma_gas, rain, math.cos(phi))

    def sample(self, rng: np.random.Generator, n: int, frozen_rain: float | None = None):
        """Return (ln E, G) arrays for ``n`` independent pulses."""
        pos = self.mean_r + self.sigma_r * rng.standard_normal((n, 3))
        rng_range = np.sqrt(np.einsum("ij,ij->i", pos, pos))
        theta = self.jitter * rng.standard_normal(n)
        ln_gain_loss = -self.k_sharp * np.square(theta)
        gamma = np.full(n, self.gamma_gas)
        if self.rain is not None:
            k, alpha, shape, rate = self.rain
            rate_mm = frozen_rain if frozen_rain is not None else sample_gamma(rng, shape, rate, n)
            gamma = gamma + k * np.power(rate_mm, alpha) * self.cos_phi
        atten_db = gamma * rng_range / 1000.0
        ln_e = self.ln_const + ln_gain_loss - 2.0 * np.log(rng_range) - DB_TO_NEPER * atten_db
        return ln_e, self.g0 * np.exp(ln_gain_loss)


def _histogram_edges(le: LogEnergyParams, bins: int) -> np.ndarray:
    half = max(6.0 * le.sigma_lnE, 1.0)
    return np.linspace(le.mu_lnE - half, le.mu_lnE + half, bins + 1)


def _chunk_stats(ln_e: np.ndarray, gain: np.ndarray | None, km: KillModel, edges: np.ndarray) -> _ChunkStats:
    energy = np.exp(ln_e)
    p = logistic(km.slope * (energy - km.e_threshold))
    # Out-of-range values land in the end bins so that counts always sum to n.
    hist, _ = np.histogram(np.clip(ln_e, edges[0], edges[-1]), bins=edges)
    return _ChunkStats(Moments.of(energy), Moments.of(ln_e), Moments.of(p),
                       Moments.of(gain) if gain is not None else _EMPTY, hist)


def _chunk_sizes(n: int, chunk: int) -> list[int]:
    sizes = [chunk] * (n // chunk)
    if n % chunk:
        sizes.append(n % chunk)
    return sizes


def _run(sampler, n_samples: int, seed: int, workers: int, chunk: int, km: KillModel,
         edges: np.ndarray) -> list[_ChunkStats]:
    sizes = _chunk_sizes(n_samples, chunk)

    def work(index):
        ln_e, gain = sampler(stream(seed, index), sizes[index])
        return _chunk_stats(ln_e, gain, km, edges)

    if workers == 1 or len(sizes) == 1:
        return [work(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(len(sizes))))


def _report(chunks: list[_ChunkStats], mode: str, prf: float, edges: np.ndarray) -> MCReport:
    energy = log_energy = p_kill = gain = _EMPTY
    hist = np.zeros(edges.size - 1, dtype=np.int64)
    for c in chunks:
        energy = energy.merge(c.energy)
        log_energy = log_energy.merge(c.log_energy)
        p_kill = p_kill.merge(c.p_kill)
        gain = gain.merge(c.gain)
        hist += c.hist
    n = energy.n
    p_hat = min(max(p_kill.mean, 0.0), 1.0)
    return MCReport(
        n_samples=n,
        mode=mode,
        empirical_mean_E=energy.mean,
        empirical_var_E=energy.var,
        se_mean_E=energy.se,
        empirical_mu_lnE=log_energy.mean,
        empirical_sigma2_lnE=log_energy.var,
        se_mu_lnE=log_energy.se,
        p_kill_hat=p_hat,
        p_kill_se=p_kill.se,
        p_kill_se_bernoulli=math.sqrt(p_hat * (1.0 - p_hat) / n),
        prf=prf,
        histogram_counts=tuple(int(x) for x in hist),
        histogram_edges=tuple(float(x) for x in edges),
        mean_G=gain.mean if gain.n else None,
        var_G=gain.var if gain.n else None,
        se_mean_G=gain.se if gain.n else None,
    )


def simulate_lognormal(le: LogEnergyParams, km: KillModel, n_samples: int, seed: int = 0, *,
                       prf: float = 1.0, workers: int = 1, chunk_size: int = DEFAULT_CHUNK,
                       histogram_bins: int = 60) -> MCReport:
    """Surrogate-mode sampling of ln E ~ N(mu_lnE, sigma2_lnE) directly."""
    edges = _histogram_edges(le, histogram_bins)
    mu, sd = le.mu_lnE, le.sigma_lnE

    def sampler(rng, n):
        return mu + sd * rng.standard_normal(n), None

    chunks = _run(sampler, n_samples, seed, workers, chunk_size, km, edges)
    return _report(chunks, "surrogate", prf, edges)


def simulate(s: Scenario, cfg: MCConfig) -> MCReport:
    summary = evaluate(s)
    if cfg.sampling_mode == "surrogate":
        return simulate_lognormal(summary.log_energy, s.kill, cfg.n_samples, cfg.seed, prf=s.tx.prf,
                                  workers=cfg.workers, chunk_size=cfg.chunk_size,
                                  histogram_bins=cfg.histogram_bins)
    model = _PhysicalModel.from_scenario(s)
    frozen = None
    if cfg.freeze_rain and model.rain is not None:
        _, _, shape, rate = model.rain
        frozen = float(sample_gamma(stream(cfg.seed, _FROZEN_RAIN_KEY), shape, rate))
    edges = _histogram_edges(summary.log_energy, cfg.histogram_bins)

    def sampler(rng, n):
        return model.sample(rng, n, frozen)

    chunks = _run(sampler, cfg.n_samples, cfg.seed, cfg.workers, cfg.chunk_size, s.kill, edges)
    return _report(chunks, "physical", s.tx.prf, edges)


def estimate_lognormal(samples) -> LogEnergyParams:
    """Sample mean and variance (divisor n - 1) of ln E."""
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size < 2:
        raise InvalidArgumentError("need at least two samples")
    if not np.all(x > 0):
        raise InvalidArgumentError("all energy samples must be positive")
    logs = np.log(x)
    m = Moments.of(logs)
    return LogEnergyParams(m.mean, m.var)


def simulate_pulse_trains(p: float, n_pulses: int, n_trials: int, seed: int = 0) -> tuple[float, float]:
    """Fraction of trials with at least one kill among ``n_pulses`` Bernoulli(p) pulses, and its SE."""
    if not 0 <= p <= 1:
        raise InvalidArgumentError(f"p must be a probability, got {p}")
    if n_pulses < 0 or n_trials < 1:
        raise InvalidArgumentError("n_pulses must be >= 0 and n_trials >= 1")
    rng = stream(seed, 0)
    killed = 0
    block = max(1, (1 << 22) // max(n_pulses, 1))
    for start in range(0, n_trials, block):
        m = min(block, n_trials - start)
        killed += int(np.count_nonzero(np.any(rng.random((m, n_pulses)) < p, axis=1)))
    frac = killed / n_trials
    return frac, math.sqrt(frac * (1.0 - frac) / n_trials)
