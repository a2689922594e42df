"""Physical constants, material definitions and occupation/temperature conversions.

All quantities are SI and all frequencies angular (rad/s).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    G: float = 6.67430e-11  # m^3 kg^-1 s^-2
    Phi0: float = 2.067833848e-15  # Wb, h/2e
    amu: float = 1.66053907e-27  # kg
    eV: float = 1.602176634e-19  # J

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"constant {f.name} must be positive")


CONSTANTS = PhysicalConstants()

hbar = CONSTANTS.hbar
k_B = CONSTANTS.k_B
G = CONSTANTS.G
Phi0 = CONSTANTS.Phi0
amu = CONSTANTS.amu
eV = CONSTANTS.eV

AL_ATOMIC_WEIGHT = 26.9815


@dataclass(frozen=True)
class Material:
    """Mechanical and nuclear properties of a beam material.

    Attributes
    ----------
    rho0 : float
        Density (kg/m^3).
    youngs_E : float
        Young's modulus (Pa).
    m_a : float
        Atomic mass (kg).
    a_lattice : float
        Nearest-neighbour distance (m).
    sigma_nuc : float
        Nuclear radius (m).
    Omega_p : float
        Maximum of the lower phonon branch (rad/s).
    """

    rho0: float
    youngs_E: float
    m_a: float
    a_lattice: float
    sigma_nuc: float
    Omega_p: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"Material.{f.name} must be a positive finite number, got {value!r}")
        if not self.sigma_nuc < self.a_lattice:
            raise ValueError("Material.sigma_nuc must be smaller than Material.a_lattice")

    @classmethod
    def from_dict(cls, data: dict) -> "Material":
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ValueError(f"unknown Material field(s): {', '.join(unknown)}")
        missing = sorted(names - set(data))
        if missing:
            raise ValueError(f"missing Material field(s): {', '.join(missing)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_json(cls, path: str | Path) -> "Material":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def aluminium() -> Material:
    return Material(
        rho0=2700.0,
        youngs_E=68e9,
        m_a=AL_ATOMIC_WEIGHT * amu,
        a_lattice=2.9e-10,
        sigma_nuc=3.06e-15,
        Omega_p=2 * math.pi * 3e12,
    )


def thermal_occupation(T_eff, Omega):
    """Bath occupation k_B T / (hbar Omega), high-temperature form."""
    if not Omega > 0:
        raise ValueError("Omega must be positive")
    if T_eff < 0:
        raise ValueError("T_eff must be non-negative")
    return k_B * T_eff / (hbar * Omega)


def temperature_from_occupation(N_bar, Omega):
    if not Omega > 0:
        raise ValueError("Omega must be positive")
    if N_bar < 0:
        raise ValueError("N_bar must be non-negative")
    return N_bar * hbar * Omega / k_B
