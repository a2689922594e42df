import math

import numpy as np
import pytest

from displacemon.grating import (
    ProtocolParams,
    dimensionless_diffusion,
    heralding_probability,
    p_no_decoherence,
    probability_full,
    probability_highq,
)
from displacemon.oracle import (
    NumericalError,
    OracleConfig,
    OracleMethod,
    characteristic_expectation,
    langevin_noise_intensity,
    noise_variance,
    noise_variance_exact,
    oracle_probabilities_mc,
    oracle_probability_cf,
    oracle_probability_mc,
    sample_heralded_positions,
    thermal_characteristic,
)

OMEGA = 2 * math.pi * 1429.0
GAMMA = OMEGA / 1.1e6
X_ZP = 3.38e-14


def test_noise_intensity_matches_unit_bridge():
    # white-noise intensity of the dimensionless momentum equation is twice the bridged diffusion
    assert langevin_noise_intensity(2.5e20, X_ZP, OMEGA) == pytest.approx(
        2 * dimensionless_diffusion(2.5e20, X_ZP), rel=1e-14
    )


def test_noise_variance_zero():
    assert noise_variance(1.0, 0.0, GAMMA, OMEGA) == 0.0


@pytest.mark.parametrize("k", [1, 2, 7, 40])
def test_noise_variance_whole_half_periods_without_damping(k):
    t = k * math.pi / OMEGA
    assert noise_variance(t, 3.0, 0.0, OMEGA) == pytest.approx(3.0 * t / 2, rel=1e-11)


@pytest.mark.parametrize("t_frac", [0.3, 1.0, 2.5, 17.0, 60.0])
@pytest.mark.parametrize("gamma", [0.0, GAMMA, OMEGA / 20])
def test_noise_variance_quadrature_vs_antiderivative(t_frac, gamma):
    t = t_frac * math.pi / OMEGA
    assert noise_variance(t, 1.0, gamma, OMEGA) == pytest.approx(noise_variance_exact(t, 1.0, gamma, OMEGA), rel=1e-10)


def test_characteristic_expectation_limits():
    assert characteristic_expectation(0.0, 0.7, 3.0) == pytest.approx(1.0, rel=1e-15)
    beta = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(characteristic_expectation(beta, 1e-9, 3.0), thermal_characteristic(beta, 3.0), rtol=1e-12)


def test_characteristic_expectation_against_sampling():
    rng = np.random.default_rng(11)
    a, n = 0.4, 2.0
    x = sample_heralded_positions(rng, 400_000, a, n)
    c = np.cos(2 * a * x)
    z = (c.mean() - characteristic_expectation(2 * a, a, n)) / (c.std(ddof=1) / math.sqrt(len(c)))
    assert abs(z) < 3


def test_sampler_second_moment():
    rng = np.random.default_rng(5)
    a, n = 0.25, 3.0
    v = 2 * n + 1
    x = sample_heralded_positions(rng, 400_000, a, n)
    # minus the second derivative of the characteristic function at zero
    ph = heralding_probability(a, n)
    m2 = (2 * v + 2 * (v - 4 * v * v * a * a) * math.exp(-2 * v * a * a)) / (4 * ph)
    h = 1e-4
    fd = -(characteristic_expectation(h, a, n) - 2 + characteristic_expectation(-h, a, n)) / h**2
    assert m2 == pytest.approx(fd, rel=1e-5)
    x2 = x * x
    z = (x2.mean() - m2) / (x2.std(ddof=1) / math.sqrt(len(x)))
    assert abs(z) < 3


def test_sampler_abort_diagnostic():
    with pytest.raises(NumericalError, match="acceptance"):
        sample_heralded_positions(np.random.default_rng(0), 10, float("nan"), 1.0)


def test_cf_oracle_consistency():
    p = ProtocolParams(0.6, 4.0, 0, OMEGA, GAMMA)
    est = oracle_probability_cf(p, 0.0, X_ZP)
    assert est.method is OracleMethod.CHARACTERISTIC_FUNCTION and est.std_err == 0.0
    assert est.p_hat == pytest.approx(p_no_decoherence(0.6, 4.0), rel=1e-10)


@pytest.mark.parametrize("k", [1, 9, 30])
def test_cf_oracle_undamped_equals_high_q(k):
    p = ProtocolParams(0.6, 4.0, k, OMEGA, 0.0)
    d_si = 5e21
    assert oracle_probability_cf(p, d_si, X_ZP).p_hat == pytest.approx(
        float(probability_highq(p, dimensionless_diffusion(d_si, X_ZP))), rel=1e-12
    )


def test_cf_oracle_grid_matches_closed_form():
    for omega, q in [(OMEGA, 1.1e6), (2 * math.pi * 8.06, 1.1e6), (OMEGA, 30.0)]:
        for n in (0.0, 10.0, 100.0):
            for a in (0.1, 1.0, 4.5):
                for k in (1, 5, 25):
                    for d_si in (0.0, 1e21, 1e23):
                        p = ProtocolParams(a, n, k, omega, omega / q)
                        cf = oracle_probability_cf(p, d_si, X_ZP).p_hat
                        closed = float(probability_full(p, dimensionless_diffusion(d_si, X_ZP)))
                        assert cf == pytest.approx(closed, rel=1e-8)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(n_samples=100)
    with pytest.raises(ValueError):
        OracleConfig(dt_fraction=1e-2)
    with pytest.raises(ValueError):
        OracleConfig(seed=-1)


def test_mc_revival_without_damping_or_noise():
    p = ProtocolParams(0.5, 3.0, 2, OMEGA, 0.0)
    est = oracle_probability_mc(p, 0.0, X_ZP, OracleConfig(n_samples=50_000, seed=3))
    assert est.method is OracleMethod.MONTE_CARLO_SDE
    assert abs(est.p_hat - p_no_decoherence(0.5, 3.0)) < 3 * est.std_err


def test_mc_determinism_and_worker_independence():
    p = ProtocolParams(0.5, 3.0, 4, OMEGA, OMEGA / 1e3)
    cfg = OracleConfig(n_samples=150_000, seed=99)
    a = oracle_probability_mc(p, 1e21, X_ZP, cfg)
    b = oracle_probability_mc(p, 1e21, X_ZP, cfg)
    c = oracle_probability_mc(p, 1e21, X_ZP, OracleConfig(n_samples=150_000, seed=99, workers=3))
    assert a == b == c


def test_mc_stepwise_matches_aggregated_in_law():
    p = ProtocolParams(0.5, 3.0, 3, OMEGA, OMEGA / 200)
    d_si = 2e22
    ref = float(probability_full(p, dimensionless_diffusion(d_si, X_ZP)))
    step = oracle_probability_mc(p, d_si, X_ZP, OracleConfig(n_samples=20_000, seed=1, aggregate=False))
    agg = oracle_probability_mc(p, d_si, X_ZP, OracleConfig(n_samples=20_000, seed=1))
    for est in (step, agg):
        assert abs(est.p_hat - ref) < 3 * est.std_err


def test_mc_time_step_convergence():
    p = ProtocolParams(0.5, 3.0, 6, OMEGA, OMEGA / 1e3)
    coarse = oracle_probability_mc(p, 1e22, X_ZP, OracleConfig(n_samples=200_000, seed=8))
    fine = oracle_probability_mc(p, 1e22, X_ZP, OracleConfig(n_samples=200_000, seed=8, dt_fraction=5e-4))
    assert abs(coarse.p_hat - fine.p_hat) < coarse.std_err


def test_mc_z_scores_over_seeds():
    p = ProtocolParams(0.5, 3.0, 1, OMEGA, OMEGA / 1e3)
    d_si = 1e22
    ref = float(probability_full(p.with_k(5), dimensionless_diffusion(d_si, X_ZP)))
    z = []
    for seed in range(100):
        est = oracle_probabilities_mc(p, [5], d_si, X_ZP, OracleConfig(n_samples=10_000, seed=seed))[5]
        z.append(abs(est.p_hat - ref) / est.std_err)
    assert np.mean(np.array(z) < 3) >= 0.95
