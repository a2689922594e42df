"""Fundamental out-of-plane mode of a doubly clamped, tension-free square beam.

The mode shape is expressed in the dimensionless form ``u0(Z)`` with the
mean-square normalisation ``(1/ell) * int u0^2 dZ = 1`` (equivalently
``int u0^2 dzeta = 1`` over ``zeta = Z/ell`` in ``[-1/2, 1/2]``).  With this
choice the modal mass is the full beam mass ``rho0 * D^2 * ell`` and the
coupling factor ``beta0`` is a pure number independent of the beam length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .constants import Material, hbar

ROOT_BRACKET = (math.pi, 5.0)


@dataclass(frozen=True)
class BeamGeometry:
    D: float  # side of the square cross-section (m)
    ell: float  # length (m)

    def __post_init__(self):
        if not (self.D > 0 and self.ell > 0):
            raise ValueError("BeamGeometry requires D > 0 and ell > 0")
        if not self.ell > self.D:
            raise ValueError("BeamGeometry requires ell > D (slender beam)")


@dataclass(frozen=True)
class FundamentalMode:
    k_ell: float
    Omega: float  # rad/s
    mass: float  # kg
    X_ZP: float  # m
    beta0: float

    @property
    def frequency_hz(self) -> float:
        return self.Omega / (2 * math.pi)


def clamped_clamped_residual(x):
    """Characteristic function whose lowest positive root is k*ell."""
    h = 0.5 * x
    return np.cos(h) * np.sinh(h) + np.cosh(h) * np.sin(h)


def _residual_derivative(x):
    h = 0.5 * x
    return np.cos(h) * np.cosh(h)


@lru_cache(maxsize=1)
def solve_mode_wavenumber() -> float:
    """Lowest root of the clamped-clamped equation, k*ell ~ 4.730.

    Bisection on ``[pi, 5]`` down to 1e-14, then one Newton step.
    """
    lo, hi = ROOT_BRACKET
    f_lo = clamped_clamped_residual(lo)
    if np.sign(f_lo) == np.sign(clamped_clamped_residual(hi)):
        raise RuntimeError("root bracket does not change sign")
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        f_mid = clamped_clamped_residual(mid)
        if f_mid == 0:
            lo = hi = mid
            break
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    x -= clamped_clamped_residual(x) / _residual_derivative(x)
    return float(x)


def _shape_coefficients(k_ell):
    # Everything divided by cosh(k ell/2) so cosh(kZ) never overflows.
    h = 0.5 * k_ell
    c = math.cos(h)
    ratio = c / math.cosh(h)
    norm = math.sqrt(2.0) / math.sqrt(ratio * ratio + 1.0)
    return c, norm


def mode_shape_scaled(zeta, k_ell=None):
    """u0 as a function of zeta = Z/ell in [-1/2, 1/2]."""
    if k_ell is None:
        k_ell = solve_mode_wavenumber()
    zeta = np.asarray(zeta, dtype=float)
    c, norm = _shape_coefficients(k_ell)
    kz = k_ell * zeta
    h = 0.5 * k_ell
    # cosh(kZ) / cosh(k ell/2)
    cosh_ratio = (np.exp(kz - h) + np.exp(-kz - h)) / (1.0 + math.exp(-2 * h))
    return norm * (c * cosh_ratio - np.cos(kz))


def mode_shape(Z, mode: FundamentalMode | None = None, geometry: BeamGeometry | None = None):
    """Dimensionless mode shape u0(Z); Z measured from the beam centre.

    Raises
    ------
    ValueError
        If any |Z| exceeds ell/2.
    """
    if geometry is None:
        raise ValueError("geometry is required")
    Z = np.asarray(Z, dtype=float)
    if np.any(np.abs(Z) > 0.5 * geometry.ell * (1 + 1e-12)):
        raise ValueError("Z lies outside the beam")
    k_ell = mode.k_ell if mode is not None else solve_mode_wavenumber()
    zeta = np.clip(Z / geometry.ell, -0.5, 0.5)
    out = mode_shape_scaled(zeta, k_ell)
    # exact zeros at the clamps
    out = np.where(np.abs(np.abs(zeta) - 0.5) == 0, 0.0, out)
    return out if out.ndim else float(out)


def mode_shape_derivative_scaled(zeta, k_ell=None):
    """d u0 / d zeta, closed form."""
    if k_ell is None:
        k_ell = solve_mode_wavenumber()
    zeta = np.asarray(zeta, dtype=float)
    c, norm = _shape_coefficients(k_ell)
    kz = k_ell * zeta
    h = 0.5 * k_ell
    sinh_ratio = (np.exp(kz - h) - np.exp(-kz - h)) / (1.0 + math.exp(-2 * h))
    return norm * k_ell * (c * sinh_ratio + np.sin(kz))


def frequency_prefactor(k_ell=None) -> float:
    if k_ell is None:
        k_ell = solve_mode_wavenumber()
    return k_ell**2 / math.sqrt(12.0)


def fundamental_frequency(geometry: BeamGeometry, material: Material) -> float:
    """Angular frequency of the fundamental mode from the exact root."""
    return (
        frequency_prefactor()
        * geometry.D
        / geometry.ell**2
        * math.sqrt(material.youngs_E / material.rho0)
    )


def beam_mass(geometry: BeamGeometry, material: Material) -> float:
    return material.rho0 * geometry.D**2 * geometry.ell


def zero_point_amplitude(mass, Omega):
    if not (mass > 0 and Omega > 0):
        raise ValueError("mass and Omega must be positive")
    return math.sqrt(hbar / (2 * mass * Omega))


@lru_cache(maxsize=8)
def _beta0(k_ell: float) -> float:
    value, _ = integrate.quad(
        lambda z: float(mode_shape_scaled(z, k_ell)), -0.5, 0.5, epsabs=1e-13, epsrel=1e-13
    )
    return abs(value)


def geometric_coupling_beta0(mode: FundamentalMode | None = None, geometry: BeamGeometry | None = None) -> float:
    """Area factor beta0 = int u0 dzeta (~0.831); independent of the beam length.

    The sign of u0 is conventional; the magnitude is returned.
    """
    k_ell = mode.k_ell if mode is not None else solve_mode_wavenumber()
    return _beta0(k_ell)


def mode_normalisation(k_ell=None) -> float:
    if k_ell is None:
        k_ell = solve_mode_wavenumber()
    value, _ = integrate.quad(
        lambda z: float(mode_shape_scaled(z, k_ell)) ** 2, -0.5, 0.5, epsabs=1e-13, epsrel=1e-13
    )
    return value


def single_atom_zpa(material: Material) -> float:
    """Zero-point amplitude of one lattice atom, sqrt(hbar / (2 m_a Omega_p))."""
    return math.sqrt(hbar / (2 * material.m_a * material.Omega_p))


def solve_fundamental_mode(geometry: BeamGeometry, material: Material) -> FundamentalMode:
    k_ell = solve_mode_wavenumber()
    Omega = fundamental_frequency(geometry, material)
    mass = beam_mass(geometry, material)
    return FundamentalMode(
        k_ell=k_ell,
        Omega=Omega,
        mass=mass,
        X_ZP=zero_point_amplitude(mass, Omega),
        beta0=_beta0(k_ell),
    )
