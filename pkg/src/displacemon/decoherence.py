"""Decoherence rates: thermal Brownian motion, Diosi-Penrose collapse and CSL.

Diffusion coefficients are in SI (m^-2 s^-1), i.e. the coefficient ``D`` of a
``-D [X, [X, rho]]`` term.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .beam import BeamGeometry, FundamentalMode, single_atom_zpa
from .constants import G, Material, amu, hbar, k_B, temperature_from_occupation, thermal_occupation

GAMMA_DP_DEFAULT = 1 / (8 * math.pi)
HIGH_TEMPERATURE_MIN_OCCUPATION = 10.0
GAMMA1_SWITCH = 0.05


class SigmaChoice(str, enum.Enum):
    NUCLEAR = "nuclear"
    BEAM_ZPA = "beam_zpa"
    ATOM_ZPA = "atom_zpa"


@dataclass(frozen=True)
class Environment:
    """Bath seen by the mechanical mode.

    Exactly one of ``N_bar`` / ``T_eff`` is stored as ``N_bar``; use
    :meth:`from_temperature` to start from a temperature.
    """

    N_bar: float
    Q: float
    Omega: float

    def __post_init__(self):
        if not self.Q > 0:
            raise ValueError("Environment.Q must be positive")
        if not self.Omega > 0:
            raise ValueError("Environment.Omega must be positive")
        if not self.N_bar >= 0:
            raise ValueError("Environment.N_bar must be non-negative")
        if self.N_bar < HIGH_TEMPERATURE_MIN_OCCUPATION:
            warnings.warn(
                f"N_bar = {self.N_bar:.3g}: the high-temperature bath model assumes N_bar >> 1",
                stacklevel=3,
            )

    @classmethod
    def from_temperature(cls, T_eff, Q, Omega):
        return cls(thermal_occupation(T_eff, Omega), Q, Omega)

    @property
    def T_eff(self) -> float:
        return temperature_from_occupation(self.N_bar, self.Omega)

    @property
    def gamma(self) -> float:
        return self.Omega / self.Q


@dataclass(frozen=True)
class DpConfig:
    sigma_choice: SigmaChoice = SigmaChoice.NUCLEAR
    gamma_dp: float = GAMMA_DP_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "sigma_choice", SigmaChoice(self.sigma_choice))
        if not self.gamma_dp > 0:
            raise ValueError("DpConfig.gamma_dp must be positive")

    @property
    def scale(self) -> float:
        """Factor 8 pi gamma_DP; unity for the self-energy convention."""
        return 8 * math.pi * self.gamma_dp


@dataclass(frozen=True)
class CslConfig:
    lambda_csl: float  # 1/s
    r_csl: float  # m

    def __post_init__(self):
        if not self.lambda_csl >= 0:
            raise ValueError("CslConfig.lambda_csl must be non-negative")
        if not self.r_csl > 0:
            raise ValueError("CslConfig.r_csl must be positive")

    def valid_for(self, X_ZP) -> bool:
        """The diffusion approximation needs X_ZP << r_CSL."""
        return X_ZP < self.r_csl


# -- thermal -----------------------------------------------------------------


def thermal_diffusion(mass, gamma, T_eff):
    return 2 * mass * gamma * k_B * T_eff / hbar**2


def thermal_decoherence_time(D_th, delta_x):
    """1 / (4 D (dX)^2); ``math.inf`` when there is no superposition or no diffusion."""
    if delta_x < 0 or D_th < 0:
        raise ValueError("delta_x and D_th must be non-negative")
    if delta_x == 0 or D_th == 0:
        return math.inf
    return 1.0 / (4 * D_th * delta_x**2)


def spatial_diffusion_rate(mass, gamma, T_eff):
    """Coefficient of the -D_P [P, [P, rho]] Lindblad completion term."""
    if T_eff == math.inf:
        return 0.0
    return gamma / (8 * mass * k_B * T_eff)


def spatial_diffusion_ratio(mass, gamma, T_eff, Omega):
    """D_P (m Omega)^2 / D_th, which equals (hbar Omega / k_B T)^2 / 16."""
    return spatial_diffusion_rate(mass, gamma, T_eff) * (mass * Omega) ** 2 / thermal_diffusion(mass, gamma, T_eff)


# -- Diosi-Penrose -----------------------------------------------------------


def dp_single_nucleus_energy(delta_x, sigma, m_a, gamma_dp=GAMMA_DP_DEFAULT):
    """Self-energy of one nucleus (hard sphere of radius sigma) split by 2*delta_x.

    For 2*delta_x >= sigma the separated hard-sphere form is used; below that
    the leading small-separation term 2 G m_a^2 dx^2 / sigma^3.
    """
    if not (delta_x >= 0 and sigma > 0 and m_a > 0):
        raise ValueError("need delta_x >= 0, sigma > 0, m_a > 0")
    scale = 8 * math.pi * gamma_dp
    if 2 * delta_x >= sigma:
        return scale * G * m_a**2 * (6 / (5 * sigma) - 1 / (2 * delta_x))
    return scale * 2 * G * m_a**2 * delta_x**2 / sigma**3


def gravitational_radius(choice: SigmaChoice, mode: FundamentalMode, material: Material) -> float:
    choice = SigmaChoice(choice)
    if choice is SigmaChoice.NUCLEAR:
        return material.sigma_nuc
    if choice is SigmaChoice.BEAM_ZPA:
        return mode.X_ZP
    return single_atom_zpa(material)


def dp_self_energy(mode: FundamentalMode, material: Material, dp: DpConfig, delta_x_max) -> float:
    """Gravitational incompatibility energy E_G (J) of the whole beam.

    The atom-ZPA variant evaluates every nucleus at ``delta_x_max``, so it is
    an order-of-magnitude estimate.
    """
    m, m_a = mode.mass, material.m_a
    if dp.sigma_choice is SigmaChoice.ATOM_ZPA:
        x1 = single_atom_zpa(material)
        return dp.scale * 2 * G * m * m_a * delta_x_max**2 / x1**3
    sigma = gravitational_radius(dp.sigma_choice, mode, material)
    return dp.scale * 6 / 5 * G * m * m_a / sigma


def dp_energy_at_separation(mode: FundamentalMode, material: Material, delta_x, sigma, gamma_dp=GAMMA_DP_DEFAULT):
    """Sum of single-nucleus energies with every nucleus displaced by delta_x."""
    n_atoms = mode.mass / material.m_a
    return n_atoms * dp_single_nucleus_energy(delta_x, sigma, material.m_a, gamma_dp)


def dp_lifetime(E_G):
    if E_G < 0:
        raise ValueError("E_G must be non-negative")
    if E_G == 0:
        return math.inf
    return hbar / E_G


@dataclass(frozen=True)
class DpThreshold:
    n_bar_max: float
    T_eff_max: float  # K
    physical: bool  # False when n_bar_max violates the N_bar >> 1 assumption


def dp_observability_condition(E_G, Q, mass, Omega, delta_x):
    """Largest bath occupation for which t_th > t_DP at separation delta_x."""
    return E_G * Q / (8 * mass * Omega**2 * delta_x**2)


def dp_max_occupation(mode: FundamentalMode, material: Material, Q, dp: DpConfig) -> DpThreshold:
    """Largest bath occupation with t_th < t_DP at a separation of one gravitational radius.

    For the nuclear and beam-ZPA radii the hard-sphere energy is evaluated at
    dX = sigma, giving the factor 6/5 - 1/2 = 7/10.
    """
    m_a, Omega = material.m_a, mode.Omega
    if dp.sigma_choice is SigmaChoice.ATOM_ZPA:
        x1 = single_atom_zpa(material)
        n_max = dp.scale * G * m_a * Q / (4 * Omega**2 * x1**3)
    else:
        sigma = gravitational_radius(dp.sigma_choice, mode, material)
        n_max = dp.scale * 7 * G * m_a * Q / (80 * sigma**3 * Omega**2)
    return DpThreshold(
        n_bar_max=n_max,
        T_eff_max=temperature_from_occupation(n_max, Omega),
        physical=n_max >= HIGH_TEMPERATURE_MIN_OCCUPATION,
    )


# -- CSL -----------------------------------------------------------------------


def _gamma1_series(x):
    # 2 * sum_n (-1)^(n-1) x^(2n-2) / (2^(n-1) (n-1)! 2n (2n-1)), first four terms
    x2 = x * x
    return 1 - x2 / 12 + x2 * x2 / 120 - x2 * x2 * x2 / 1344


def gamma1(x):
    """Cuboid geometry factor Gamma_1(x) = (2/x^2)[e^{-x^2/2} - 1 + sqrt(pi/2) x erf(x/sqrt2)]."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("gamma1 requires x >= 0")
    small = x <= GAMMA1_SWITCH
    xs = np.where(small, 1.0, x)
    closed = 2 / xs**2 * (np.expm1(-(xs**2) / 2) + math.sqrt(math.pi / 2) * xs * erf(xs / math.sqrt(2)))
    out = np.where(small, _gamma1_series(x), closed)
    return out if out.ndim else float(out)


def nucleon_count(mass):
    return mass / amu


def csl_diffusion(geometry: BeamGeometry, mode: FundamentalMode, csl: CslConfig) -> float:
    """CSL momentum-diffusion coefficient for a cuboid beam (m^-2 s^-1)."""
    if not csl.valid_for(mode.X_ZP):
        warnings.warn("X_ZP is not small compared with r_CSL; CSL diffusion limit invalid", stacklevel=2)
    D, ell, r = geometry.D, geometry.ell, csl.r_csl
    n_n = nucleon_count(mode.mass)
    return (
        csl.lambda_csl
        * n_n**2
        / D**2
        * gamma1(D / (math.sqrt(2) * r))
        * gamma1(ell / (math.sqrt(2) * r))
        * -math.expm1(-(D**2) / (4 * r**2))
    )


def csl_threshold_rate(geometry: BeamGeometry, mode: FundamentalMode, r_csl, D_th):
    """Collapse rate at which the CSL diffusion equals D_th."""
    unit = csl_diffusion(geometry, mode, CslConfig(1.0, r_csl))
    return D_th / unit


# -- vibration noise -----------------------------------------------------------


def mech_noise_temperature(Q, Omega, S_XX, mass):
    """Effective temperature (K) from substrate displacement noise S_XX (m^2/Hz)."""
    return mass * Q * Omega**3 * S_XX / (4 * k_B)


def required_sxx(T_target, Q, Omega, mass):
    """Largest S_XX (m^2/Hz) compatible with T_target."""
    return 4 * k_B * T_target / (mass * Q * Omega**3)
