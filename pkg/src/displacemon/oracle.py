"""Independent reference computations of the second-grating probability.

Two routes, neither using the Wick-contracted closed form:

* ``CharacteristicFunction``: exact characteristic function of the heralded
  (cos^2-filtered) thermal state, times the Gaussian factor of the Langevin
  noise whose variance is obtained by adaptive quadrature.
* ``MonteCarloSDE``: rejection-sampled initial positions propagated through
  the dimensionless Langevin equations

      dx = Omega p dt
      dp = (-Omega x - gamma p) dt + sqrt(q) dW

  with an exact rotation for the conservative part of every time step and
  Euler-Maruyama for damping and noise.  The force intensity ``q`` is derived
  from the SI force correlator <f f'> = hbar^2 D delta and the momentum scale
  hbar / (2 X_ZP).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import hbar
from .grating import ProtocolParams, heralding_probability

SHARD_SIZE = 1 << 16
MIN_ACCEPTANCE = 0.01


class NumericalError(RuntimeError):
    pass


class OracleMethod(str, enum.Enum):
    CHARACTERISTIC_FUNCTION = "CharacteristicFunction"
    MONTE_CARLO_SDE = "MonteCarloSDE"


@dataclass(frozen=True)
class OracleConfig:
    n_samples: int = 1_000_000
    seed: int = 20220301
    dt_fraction: float = 1e-3  # time step as a fraction of the period 2 pi / Omega
    quadrature_tol: float = 1e-12
    aggregate: bool = True  # compose the steps of each half-period into one Gaussian update
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 10_000:
            raise ValueError("OracleConfig.n_samples must be >= 1e4")
        if not 0 < self.dt_fraction <= 1e-3:
            raise ValueError("OracleConfig.dt_fraction must lie in (0, 1e-3]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("OracleConfig.seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("OracleConfig.workers must be >= 1")

    @property
    def steps_per_half_period(self) -> int:
        return max(1, round(0.5 / self.dt_fraction))


@dataclass(frozen=True)
class OracleEstimate:
    p_hat: float
    std_err: float
    method: OracleMethod


def langevin_noise_intensity(D_si, X_ZP, Omega):
    """White-noise intensity (1/s) of the dimensionless momentum equation."""
    mass = hbar / (2 * Omega * X_ZP**2)
    p_zp = mass * Omega * X_ZP
    return hbar**2 * D_si / p_zp**2


# -- characteristic function route --------------------------------------------


def _sin2_weight(tp, t, gamma, Omega):
    return np.exp(gamma * tp) * np.sin(Omega * (t - tp)) ** 2


def noise_variance(t_k, intensity, gamma, Omega, tol=1e-12):
    """Var of the accumulated noise, intensity * int_0^t e^{gamma t'} sin^2(Omega (t - t')) dt'.

    Integrated half-period by half-period with adaptive quadrature.
    """
    if intensity == 0 or t_k == 0:
        return 0.0
    half = math.pi / Omega
    edges = np.append(np.arange(0.0, t_k, half), t_k)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(_sin2_weight, a, b, args=(t_k, gamma, Omega), epsabs=0.0, epsrel=tol, limit=200)
        total += val
    return intensity * total


def noise_variance_exact(t_k, intensity, gamma, Omega):
    """Closed-form antiderivative of the same integral (internal cross-check)."""
    if gamma == 0:
        return intensity * (t_k / 2 - math.sin(2 * Omega * t_k) / (4 * Omega))
    z = complex(-gamma, 2 * Omega)
    damped = -math.expm1(-gamma * t_k) / (2 * gamma)
    osc = ((np.exp(z * t_k) - 1) / z).real / 2
    return intensity * math.exp(gamma * t_k) * (damped - osc)


def thermal_characteristic(u, n_bar):
    """<exp(i u x)> in a thermal state of occupation n_bar (x in zero-point units)."""
    return np.exp(-np.square(u) * (2 * n_bar + 1) / 2)


def characteristic_expectation(beta, alpha_mag, n_bar):
    """<exp(i beta x(0))> in the heralded post-grating state (real by symmetry)."""
    chi = thermal_characteristic
    num = 2 * chi(beta, n_bar) + chi(beta + 2 * alpha_mag, n_bar) + chi(beta - 2 * alpha_mag, n_bar)
    return num / (4 * heralding_probability(alpha_mag, n_bar))


def oracle_probability_cf(params: ProtocolParams, D_si, X_ZP, tol=1e-12) -> OracleEstimate:
    """P(k, D) from the heralded-state characteristic function and Gaussian noise."""
    t_k = float(params.k) * math.pi / params.Omega
    q = langevin_noise_intensity(D_si, X_ZP, params.Omega)
    var = noise_variance(t_k, q, params.gamma, params.Omega, tol)
    s = math.exp(-params.gamma * t_k / 2)
    fringe = characteristic_expectation(2 * params.alpha_mag * s, params.alpha_mag, params.n_bar)
    p = 0.5 + 0.5 * float(fringe) * math.exp(-2 * params.alpha_mag**2 * s**2 * var)
    return OracleEstimate(p, 0.0, OracleMethod.CHARACTERISTIC_FUNCTION)


# -- Monte Carlo route -----------------------------------------------------------


def _step_matrix(Omega, gamma, dt):
    c, s = math.cos(Omega * dt), math.sin(Omega * dt)
    damp = 1.0 - gamma * dt
    return np.array([[c, s], [-s * damp, c * damp]])


def half_period_update(Omega, gamma, intensity, steps):
    """Exact composition of ``steps`` rotation/Euler-Maruyama steps over pi/Omega.

    Returns the 2x2 propagator and the Cholesky factor of the accumulated
    noise covariance.
    """
    dt = math.pi / (Omega * steps)
    A = _step_matrix(Omega, gamma, dt)
    prop = np.eye(2)
    cov = np.zeros((2, 2))
    e = np.array([0.0, 1.0])
    for _ in range(steps):
        v = prop @ e
        cov += np.outer(v, v)
        prop = A @ prop
    cov *= intensity * dt
    if intensity == 0:
        chol = np.zeros((2, 2))
    else:
        chol = np.linalg.cholesky(cov)
    return prop, chol


def sample_heralded_positions(rng, n, alpha_mag, n_bar, batch=None):
    """Draw x(0) from the density proportional to cos^2(|a| x) N(0, 2n+1)."""
    sd = math.sqrt(2 * n_bar + 1)
    out = np.empty(n)
    filled = proposed = 0
    while filled < n:
        m = batch or max(1024, int(1.2 * (n - filled) / 0.5))
        x = rng.standard_normal(m) * sd
        keep = x[rng.random(m) < np.cos(alpha_mag * x) ** 2]
        proposed += m
        take = min(len(keep), n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
        if proposed >= 100_000 and filled / proposed < MIN_ACCEPTANCE:
            raise NumericalError(
                f"rejection sampler acceptance {filled / proposed:.2e} below {MIN_ACCEPTANCE}"
            )
    return out


def _shard_rng(seed, shard):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shard,))))


def _run_shard(shard, n, params: ProtocolParams, ks, q, cfg: OracleConfig):
    rng = _shard_rng(cfg.seed, shard)
    x = sample_heralded_positions(rng, n, params.alpha_mag, params.n_bar)
    # x(t_k) at half-period times depends on p(0) only at O((gamma/Omega)^2), so a thermal p(0) suffices
    p = rng.standard_normal(n) * math.sqrt(2 * params.n_bar + 1)
    steps = cfg.steps_per_half_period
    wanted = {int(k): i for i, k in enumerate(ks)}
    sums = np.zeros((len(ks), 2))

    def record(k):
        if k in wanted:
            f = 0.5 * (1 + np.cos(2 * params.alpha_mag * x))
            sums[wanted[k]] = f.sum(), np.square(f).sum()

    record(0)
    if cfg.aggregate:
        prop, chol = half_period_update(params.Omega, params.gamma, q, steps)
        for k in range(1, max(ks) + 1):
            x, p = prop[0, 0] * x + prop[0, 1] * p, prop[1, 0] * x + prop[1, 1] * p
            if q:
                n1, n2 = rng.standard_normal(n), rng.standard_normal(n)
                x = x + chol[0, 0] * n1
                p = p + chol[1, 0] * n1 + chol[1, 1] * n2
            record(k)
    else:
        dt = math.pi / (params.Omega * steps)
        A = _step_matrix(params.Omega, params.gamma, dt)
        amp = math.sqrt(q * dt)
        for k in range(1, max(ks) + 1):
            for _ in range(steps):
                x, p = A[0, 0] * x + A[0, 1] * p, A[1, 0] * x + A[1, 1] * p
                if q:
                    p = p + amp * rng.standard_normal(n)
            record(k)
    return n, sums


def _merge(acc, shard_result):
    """Chan-style merge of (count, mean, M2) per requested k."""
    n_b, sums = shard_result
    mean_b = sums[:, 0] / n_b
    m2_b = sums[:, 1] - n_b * mean_b**2
    n_a, mean_a, m2_a = acc
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    m2 = m2_a + m2_b + delta**2 * n_a * n_b / n
    return n, mean, m2


def oracle_probabilities_mc(params: ProtocolParams, ks, D_si, X_ZP, cfg: OracleConfig | None = None):
    """Monte Carlo estimates of P(k, D) for every k in ``ks`` from one set of trajectories."""
    cfg = cfg or OracleConfig()
    ks = sorted({int(k) for k in np.atleast_1d(ks)})
    if ks[0] < 0:
        raise ValueError("k must be non-negative")
    q = langevin_noise_intensity(D_si, X_ZP, params.Omega)
    sizes = [SHARD_SIZE] * (cfg.n_samples // SHARD_SIZE)
    if cfg.n_samples % SHARD_SIZE:
        sizes.append(cfg.n_samples % SHARD_SIZE)
    jobs = [(i, n, params, ks, q, cfg) for i, n in enumerate(sizes)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda a: _run_shard(*a), jobs))
    else:
        results = [_run_shard(*a) for a in jobs]
    acc = (0, np.zeros(len(ks)), np.zeros(len(ks)))
    for r in results:  # shard order, independent of worker count
        acc = _merge(acc, r)
    n, mean, m2 = acc
    err = np.sqrt(np.maximum(m2, 0.0) / (n - 1) / n)
    return {
        k: OracleEstimate(float(mean[i]), float(err[i]), OracleMethod.MONTE_CARLO_SDE)
        for i, k in enumerate(ks)
    }


def oracle_probability_mc(params: ProtocolParams, D_si, X_ZP, cfg: OracleConfig | None = None) -> OracleEstimate:
    return oracle_probabilities_mc(params, [int(params.k)], D_si, X_ZP, cfg)[int(params.k)]
