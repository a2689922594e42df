"""Split-transmon qubit in a flux-difference loop, and its coupling to the beam."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .beam import BeamGeometry, FundamentalMode
from .constants import Phi0, hbar

# Above this value of Omega*T2* the resonator can no longer be treated as
# stationary during the precession window.
STATIONARY_LIMIT = 0.1


@dataclass(frozen=True)
class QubitConfig:
    omega_q0: float  # rad/s, at zero flux difference
    delta_phi_frac: float  # operating point, Delta Phi / Phi0
    T2_star: float  # s
    B_par: float  # T

    def __post_init__(self):
        if not abs(self.delta_phi_frac) < 1:
            raise ValueError("QubitConfig.delta_phi_frac must satisfy |x| < 1")
        if not self.omega_q0 > 0:
            raise ValueError("QubitConfig.omega_q0 must be positive")
        if not self.T2_star > 0:
            raise ValueError("QubitConfig.T2_star must be positive")
        if not self.B_par >= 0:
            raise ValueError("QubitConfig.B_par must be non-negative")

    @classmethod
    def from_junction(cls, E_J0, E_C, delta_phi_frac, T2_star, B_par):
        """Build from junction and charging energies (J) via sqrt(8 E_J0 E_C)/hbar."""
        return cls(math.sqrt(8 * E_J0 * E_C) / hbar, delta_phi_frac, T2_star, B_par)


@dataclass(frozen=True)
class GratingParams:
    lambda_on: float  # rad/s, signed
    alpha_mag: float
    delta_x_max: float  # m
    stationary: bool  # Omega * T2* <= STATIONARY_LIMIT


def josephson_energy_squid(E_J0, phi_frac):
    return E_J0 * np.abs(np.cos(np.pi * phi_frac))


def _check_operating_point(delta_phi_frac):
    c = np.cos(np.pi * np.asarray(delta_phi_frac) / 2)
    if np.any(np.abs(np.asarray(delta_phi_frac)) >= 1) or np.any(c == 0):
        raise ValueError("flux operating point sits on a node of the qubit frequency")


def qubit_frequency(omega_q0, delta_phi_frac):
    _check_operating_point(delta_phi_frac)
    return omega_q0 * np.sqrt(np.abs(np.cos(np.pi * np.asarray(delta_phi_frac) / 2)))


def effective_coupling_prefactor(delta_phi_frac):
    """(pi/4) tan(pi x / 2); about 1.16 at the 0.620 operating point."""
    _check_operating_point(delta_phi_frac)
    return np.pi / 4 * np.tan(np.pi * np.asarray(delta_phi_frac) / 2)


def coupling_rate(qubit: QubitConfig, mode: FundamentalMode, geometry: BeamGeometry) -> float:
    """Signed electromechanical coupling lambda = X_ZP d omega_q / dX (rad/s)."""
    omega_q = qubit_frequency(qubit.omega_q0, qubit.delta_phi_frac)
    pref = effective_coupling_prefactor(qubit.delta_phi_frac)
    return float(-omega_q * pref * mode.beta0 * mode.X_ZP * geometry.ell * qubit.B_par / Phi0)


def grating_alpha(qubit: QubitConfig, mode: FundamentalMode, geometry: BeamGeometry) -> GratingParams:
    """Grating strength for a rectangular coupling window of length T2*.

    The oscillating factor exp(i Omega t) is dropped, which is accurate when
    Omega*T2* is small; ``stationary`` reports whether that holds.
    """
    lam = coupling_rate(qubit, mode, geometry)
    alpha = abs(lam) * qubit.T2_star
    stationary = mode.Omega * qubit.T2_star <= STATIONARY_LIMIT
    if not stationary:
        warnings.warn(
            f"Omega*T2* = {mode.Omega * qubit.T2_star:.3g} exceeds {STATIONARY_LIMIT}; "
            "the stationary-resonator grating is inaccurate",
            stacklevel=2,
        )
    return GratingParams(
        lambda_on=lam,
        alpha_mag=alpha,
        delta_x_max=4 * alpha * mode.X_ZP,
        stationary=stationary,
    )


def precession_angle(lam, x_over_xzp, tau_R):
    return lam * x_over_xzp * tau_R


def plus_probability(theta):
    return np.cos(theta) ** 2
