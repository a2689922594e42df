"""Device assembly from a JSON configuration document.

Derived quantities are always recomputed from the inputs; a ``derived`` block
in a config file is accepted and ignored.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .beam import BeamGeometry, FundamentalMode, solve_fundamental_mode
from .constants import Material, aluminium, thermal_occupation
from .decoherence import CslConfig, DpConfig, Environment, GAMMA_DP_DEFAULT
from .qubit import GratingParams, QubitConfig, grating_alpha

DEFAULT_N_BAR_INIT = 100.0
DEFAULT_K_MAX = 2000


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@lru_cache(maxsize=1)
def config_schema() -> dict:
    text = resources.files("displacemon").joinpath("data/device_config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class DeviceSpec:
    name: str
    geometry: BeamGeometry
    material: Material
    qubit: QubitConfig
    environment: Environment
    mode: FundamentalMode
    grating: GratingParams
    csl: CslConfig
    dp: DpConfig
    n_bar_init: float = DEFAULT_N_BAR_INIT
    k_max: int = DEFAULT_K_MAX
    B_par_override: float | None = None

    @property
    def curve_grating(self) -> GratingParams:
        """Grating used for probability curves; honours ``B_par_override_T``."""
        if self.B_par_override is None:
            return self.grating
        q = replace(self.qubit, B_par=self.B_par_override)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return grating_alpha(q, self.mode, self.geometry)


def _path(index, field):
    return f"devices[{index}].{field}" if field else f"devices[{index}]"


def _build(index, raw: dict) -> DeviceSpec:
    def stage(field, fn):
        try:
            return fn()
        except ValueError as exc:
            raise ConfigError(_path(index, field), str(exc)) from None

    material = stage("material", lambda: Material.from_dict(raw["material"]) if "material" in raw else aluminium())
    geometry = stage("ell_m", lambda: BeamGeometry(raw["D_m"], raw["ell_m"]))
    mode = stage("D_m", lambda: solve_fundamental_mode(geometry, material))
    qubit = stage(
        "delta_phi_frac",
        lambda: QubitConfig(2 * math.pi * raw["omega_q0_hz"], raw["delta_phi_frac"], raw["T2_star_s"], raw["B_par_T"]),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        grating = stage("B_par_T", lambda: grating_alpha(qubit, mode, geometry))
    n_bar = raw["N_bar"] if "N_bar" in raw else thermal_occupation(raw["T_eff_K"], mode.Omega)
    env = stage("N_bar" if "N_bar" in raw else "T_eff_K", lambda: Environment(n_bar, raw["Q"], mode.Omega))
    csl = stage("lambda_csl_hz", lambda: CslConfig(raw["lambda_csl_hz"], raw["r_csl_m"]))
    dp = stage("sigma_choice", lambda: DpConfig(raw["sigma_choice"], raw.get("gamma_dp", GAMMA_DP_DEFAULT)))
    return DeviceSpec(
        name=raw["name"],
        geometry=geometry,
        material=material,
        qubit=qubit,
        environment=env,
        mode=mode,
        grating=grating,
        csl=csl,
        dp=dp,
        n_bar_init=float(raw.get("n_bar_init", DEFAULT_N_BAR_INIT)),
        k_max=int(raw.get("k_max", DEFAULT_K_MAX)),
        B_par_override=raw.get("B_par_override_T"),
    )


def validate_config(doc: dict) -> None:
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        parts = list(err.absolute_path)
        path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts).lstrip(".") or "<root>"
        raise ConfigError(path, err.message)


def build_devices(doc: dict) -> list[DeviceSpec]:
    validate_config(doc)
    devices = [_build(i, raw) for i, raw in enumerate(doc["devices"])]
    names = [d.name for d in devices]
    if len(set(names)) != len(names):
        raise ConfigError("devices", "device names must be unique")
    return devices


def build_device(raw: dict) -> DeviceSpec:
    """Build a single device from its config entry."""
    return build_devices({"devices": [raw]})[0]


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None


def config_hash(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def select_device(devices: list[DeviceSpec], name: str | None) -> list[DeviceSpec]:
    if name is None:
        return devices
    chosen = [d for d in devices if d.name == name]
    if not chosen:
        raise ConfigError("--device", f"no device named {name!r}")
    return chosen
