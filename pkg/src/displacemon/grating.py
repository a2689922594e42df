"""Closed-form qubit statistics of the two-grating protocol.

Positions are measured in units of the zero-point amplitude, x = X / X_ZP, so a
thermal state of occupation n has <x^2> = 2n + 1.  The diffusion rate ``D``
entering these formulas is the dimensionless one; convert a master-equation
coefficient in m^-2 s^-1 with :func:`dimensionless_diffusion`.

The probability is written as ``P = 1/2 + excess`` and most internals work
with ``log(excess)`` so that differences between nearby curves survive when
both are within rounding of 1/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

HIGH_Q_MIN = 100.0
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ProtocolParams:
    alpha_mag: float
    n_bar: float  # occupation of the pre-cooled initial thermal state
    k: int  # half-periods between gratings
    Omega: float  # rad/s
    gamma: float  # rad/s

    def __post_init__(self):
        if not self.alpha_mag > 0:
            raise ValueError("alpha_mag must be positive")
        if not self.n_bar >= 0:
            raise ValueError("n_bar must be non-negative")
        if not self.Omega > 0 or not self.gamma >= 0:
            raise ValueError("need Omega > 0 and gamma >= 0")
        if np.any(np.asarray(self.k) < 0):
            raise ValueError("k must be non-negative")

    @property
    def t_k(self):
        return np.asarray(self.k) * math.pi / self.Omega

    def with_k(self, k):
        return replace(self, k=k)


def dimensionless_diffusion(D_si, X_ZP):
    """Convert an SI momentum-diffusion coefficient to the x = X/X_ZP convention."""
    return 2.0 * X_ZP**2 * D_si


def _grating_exponent(alpha_mag, n_bar):
    return 2.0 * (1.0 + 2.0 * n_bar) * alpha_mag**2


def heralding_probability(alpha_mag, n_bar):
    """Probability that the first grating heralds, (1 + exp(-2(1+2n)|a|^2)) / 2."""
    return 0.5 * (1.0 + np.exp(-_grating_exponent(alpha_mag, n_bar)))


def log_heralding_excess(alpha_mag, n_bar):
    """log(P_herald - 1/2); finite even where the excess underflows."""
    return -_grating_exponent(alpha_mag, n_bar) - LOG2


def p_no_decoherence(alpha_mag, n_bar):
    """Second-grating probability without decoherence or damping, in [0.75, 1]."""
    e = np.exp(-_grating_exponent(alpha_mag, n_bar))
    # written as 3/4 + non-negative remainder so the lower bound survives rounding
    return np.minimum(0.75 + (e + e**4) / (4.0 * (1.0 + e)), 1.0)


def amplitude_decay(params: ProtocolParams):
    """exp(-gamma t_k / 2), the damping of the initial displacement after k half-periods."""
    return np.exp(-np.asarray(params.k) * math.pi * params.gamma / (2 * params.Omega))


def log_envelope_p0(params: ProtocolParams):
    """log of the envelope P0(k); the D-independent part of the fringe visibility."""
    c = _grating_exponent(params.alpha_mag, params.n_bar)
    a = np.asarray(params.k) * math.pi * params.gamma / (2 * params.Omega)
    s = np.exp(-a)
    one_minus_s = -np.expm1(-a)
    terms = np.stack(
        np.broadcast_arrays(
            LOG2 - c * s**2,
            -c * (1.0 + s) ** 2,
            -c * one_minus_s**2,
        )
    )
    log_bracket = logsumexp(terms, axis=0)
    return log_bracket - LOG2 - np.log1p(np.exp(-c))


def envelope_p0(params: ProtocolParams):
    return np.exp(log_envelope_p0(params))


def decay_exponent(params: ProtocolParams, D):
    """Exponent 8 D |a|^2 (1 - e^{-gamma t}) / (gamma (4 + (gamma/Omega)^2)).

    Reduces to 2 D |a|^2 t_k when gamma -> 0.
    """
    if np.any(np.asarray(D) < 0):
        raise ValueError("D must be non-negative")
    k = np.asarray(params.k, dtype=float)
    g, W = params.gamma, params.Omega
    if g == 0:
        return 2.0 * D * params.alpha_mag**2 * k * math.pi / W
    growth = -np.expm1(-k * math.pi * g / W) / g
    return 8.0 * D * params.alpha_mag**2 * growth / (4.0 + (g / W) ** 2)


def log_probability_excess(params: ProtocolParams, D):
    """log(P(k, D) - 1/2) for the full closed form."""
    return log_envelope_p0(params) - LOG2 - decay_exponent(params, D)


def probability_full(params: ProtocolParams, D):
    """P(k, D) = 1/2 + P0(k)/2 * exp(-decay_exponent)."""
    p = 0.5 + np.exp(log_probability_excess(params, D))
    return np.clip(p, 0.5, 1.0)


def probability_highq(params: ProtocolParams, D):
    """High-Q approximation 1/2 + P0/2 exp(-2 D |a|^2 k pi / Omega)."""
    if params.gamma > 0 and params.Omega / params.gamma < HIGH_Q_MIN:
        warnings.warn("Q < 100: high-Q probability approximation is unreliable", stacklevel=2)
    if np.any(np.asarray(D) < 0):
        raise ValueError("D must be non-negative")
    expo = 2.0 * D * params.alpha_mag**2 * np.asarray(params.k) * math.pi / params.Omega
    p = 0.5 + np.exp(log_envelope_p0(params) - LOG2 - expo)
    return np.clip(p, 0.5, 1.0)


def percentage_difference(params: ProtocolParams, D_th, D_csl):
    """Relative difference 2 (P_th - P_csl) / (P_th + P_csl) as a fraction."""
    if np.any(np.asarray(D_csl) < 0):
        raise ValueError("D_csl must be non-negative")
    log_e_th = log_probability_excess(params, D_th)
    e_th = np.exp(log_e_th)
    extra = decay_exponent(params, D_th + D_csl) - decay_exponent(params, D_th)
    e_csl = e_th * np.exp(-extra)
    diff = e_th * -np.expm1(-extra)
    return 2.0 * diff / (1.0 + e_th + e_csl)


def delta_max(params: ProtocolParams, D_th, D_csl, k_max: int):
    """Scan k = 1..k_max and return (max Delta, argmax k); ties go to the smaller k."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    ks = np.arange(1, k_max + 1)
    d = percentage_difference(params.with_k(ks), D_th, D_csl)
    i = int(np.argmax(d))
    return float(d[i]), int(ks[i])
