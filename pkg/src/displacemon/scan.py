"""Table, curve and map generation for built devices."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import eV, temperature_from_occupation
from .decoherence import (
    CslConfig,
    DpConfig,
    SigmaChoice,
    csl_diffusion,
    csl_threshold_rate,
    dp_lifetime,
    dp_max_occupation,
    dp_self_energy,
    required_sxx,
    thermal_diffusion,
)
from .device import DeviceSpec
from .grating import ProtocolParams, delta_max, dimensionless_diffusion, percentage_difference, probability_full

LAMBDA_GRID_DEFAULT = (1e-14, 1e-6)
N_BAR_GRID_DEFAULT = (1e2, 1e12)
GRID_POINTS_DEFAULT = 60

_UNIT_SCALE = {"": 1.0, "m": 1.0, "um": 1e-6, "mm": 1e-3, "cm": 1e-2, "kg": 1.0, "Hz": 1.0, "s": 1.0, "K": 1.0, "eV": eV, "m/sqrt(Hz)": 1.0}


@dataclass(frozen=True)
class ReportRow:
    parameter: str
    symbol: str
    value: float  # SI
    display_unit: str

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"ReportRow {self.parameter}: value must be finite")

    @property
    def display_value(self) -> float:
        return self.value / _UNIT_SCALE[self.display_unit]


# -- device table --------------------------------------------------------------


def _dp_pair(device: DeviceSpec, choice: SigmaChoice):
    dp = DpConfig(choice, device.dp.gamma_dp)
    e_g = dp_self_energy(device.mode, device.material, dp, device.grating.delta_x_max)
    return e_g, dp_lifetime(e_g)


def device_table(device: DeviceSpec) -> list[ReportRow]:
    m, g = device.mode, device.grating
    rows = [
        ReportRow("thickness", "D", device.geometry.D, "um"),
        ReportRow("length", "ell", device.geometry.ell, "mm"),
        ReportRow("mass", "m", m.mass, "kg"),
        ReportRow("frequency", "Omega/2pi", m.Omega / (2 * math.pi), "Hz"),
        ReportRow("zero_point_amplitude", "X_ZP", m.X_ZP, "m"),
        ReportRow("coupling", "|lambda_on|/2pi", abs(g.lambda_on) / (2 * math.pi), "Hz"),
        ReportRow("grating_parameter", "|alpha|", g.alpha_mag, ""),
        ReportRow("max_separation", "DeltaX_max", g.delta_x_max, "m"),
    ]
    for choice in SigmaChoice:
        e_g, t_dp = _dp_pair(device, choice)
        rows.append(ReportRow(f"E_G_{choice.value}", f"E_G[{choice.value}]", e_g, "eV"))
        rows.append(ReportRow(f"t_DP_{choice.value}", f"t_DP[{choice.value}]", t_dp, "s"))
    return rows


def dp_report(device: DeviceSpec) -> list[ReportRow]:
    """E_G, t_DP, occupation and temperature thresholds, and the vibration budget per sigma choice.

    The ``physical`` row is 1 when the threshold occupation respects N_bar >> 1.
    """
    m = device.mode
    Q = device.environment.Q
    rows = []
    for choice in SigmaChoice:
        e_g, t_dp = _dp_pair(device, choice)
        thr = dp_max_occupation(m, device.material, Q, DpConfig(choice, device.dp.gamma_dp))
        sxx = required_sxx(thr.T_eff_max, Q, m.Omega, m.mass)
        c = choice.value
        rows += [
            ReportRow(f"E_G_{c}", f"E_G[{c}]", e_g, "eV"),
            ReportRow(f"t_DP_{c}", f"t_DP[{c}]", t_dp, "s"),
            ReportRow(f"N_bar_max_{c}", f"Nmax[{c}]", thr.n_bar_max, ""),
            ReportRow(f"T_eff_max_{c}", f"Tmax[{c}]", thr.T_eff_max, "K"),
            ReportRow(f"required_sqrt_Sxx_{c}", f"sqrtSxx[{c}]", math.sqrt(sxx), "m/sqrt(Hz)"),
            ReportRow(f"physical_{c}", f"ok[{c}]", float(thr.physical), ""),
        ]
    return rows


# -- probability curves ---------------------------------------------------------


def thermal_diffusion_at(device: DeviceSpec, n_bar: float) -> float:
    m = device.mode
    return thermal_diffusion(m.mass, m.Omega / device.environment.Q, temperature_from_occupation(n_bar, m.Omega))


@dataclass(frozen=True)
class ProbabilityCurve:
    k: np.ndarray
    t_s: np.ndarray
    p_std: np.ndarray
    p_csl: np.ndarray
    delta: np.ndarray
    k_star: int  # argmax of delta over k >= 1
    delta_max: float

    columns = ("k", "t_s", "p_std", "p_csl", "delta")

    def rows(self):
        return [
            (int(k), float(t), float(a), float(b), float(d))
            for k, t, a, b, d in zip(self.k, self.t_s, self.p_std, self.p_csl, self.delta)
        ]


def _protocol(device: DeviceSpec, n_bar_init, k) -> ProtocolParams:
    m = device.mode
    return ProtocolParams(device.curve_grating.alpha_mag, n_bar_init, k, m.Omega, m.Omega / device.environment.Q)


def decay_curve(device: DeviceSpec, csl: CslConfig, n_bar, n_bar_init=None, k_max=None) -> ProbabilityCurve:
    """P(k) with and without CSL for k = 0..k_max at bath occupation ``n_bar``."""
    n_bar_init = device.n_bar_init if n_bar_init is None else n_bar_init
    k_max = device.k_max if k_max is None else k_max
    if n_bar < n_bar_init:
        raise ValueError("bath occupation n_bar must be >= the initial occupation n_bar_init")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    ks = np.arange(k_max + 1)
    params = _protocol(device, n_bar_init, ks)
    x_zp = device.mode.X_ZP
    d_th = dimensionless_diffusion(thermal_diffusion_at(device, n_bar), x_zp)
    d_csl = dimensionless_diffusion(csl_diffusion(device.geometry, device.mode, csl), x_zp)
    p_std = probability_full(params, d_th)
    p_csl = probability_full(params, d_th + d_csl)
    delta = percentage_difference(params, d_th, d_csl)
    i = 1 + int(np.argmax(delta[1:]))
    return ProbabilityCurve(ks, params.t_k, p_std, p_csl, delta, int(ks[i]), float(delta[i]))


# -- Delta_max map ----------------------------------------------------------------


@dataclass(frozen=True)
class DeltaMap:
    lambda_csl_grid: np.ndarray
    n_bar_grid: np.ndarray
    T_eff_grid: np.ndarray  # temperature for each n_bar (K)
    delta_max: np.ndarray  # shape (len(n_bar_grid), len(lambda_csl_grid))
    k_star: np.ndarray
    excluded: np.ndarray  # D_CSL < D_th
    lambda_threshold: np.ndarray  # per n_bar, lambda at which D_CSL = D_th


def log_grid(lo, hi, n):
    if not (0 < lo < hi) or n < 2:
        raise ValueError("log grid needs 0 < lo < hi and at least 2 points")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _map_row(device: DeviceSpec, lambdas, n_bar, d_csl_unit, n_bar_init, k_max):
    params = _protocol(device, n_bar_init, 1)
    x_zp = device.mode.X_ZP
    d_th_si = thermal_diffusion_at(device, n_bar)
    d_th = dimensionless_diffusion(d_th_si, x_zp)
    cells = [delta_max(params, d_th, dimensionless_diffusion(lam * d_csl_unit, x_zp), k_max) for lam in lambdas]
    excluded = lambdas * d_csl_unit < d_th_si
    return [c[0] for c in cells], [c[1] for c in cells], excluded, d_th_si / d_csl_unit


def delta_max_map(
    device: DeviceSpec,
    lambda_grid=None,
    n_bar_grid=None,
    r_csl=None,
    n_bar_init=None,
    k_max=None,
    workers: int = 1,
) -> DeltaMap:
    """Maximum relative difference over k on a (n_bar, lambda_CSL) grid.

    Rows follow ``n_bar_grid`` and columns ``lambda_csl_grid``; the result does
    not depend on ``workers``.
    """
    lambdas = np.asarray(lambda_grid if lambda_grid is not None else log_grid(*LAMBDA_GRID_DEFAULT, GRID_POINTS_DEFAULT))
    n_bars = np.asarray(n_bar_grid if n_bar_grid is not None else log_grid(*N_BAR_GRID_DEFAULT, GRID_POINTS_DEFAULT))
    if lambdas.size == 0 or n_bars.size == 0:
        raise ValueError("grids must be non-empty")
    if np.any(np.diff(lambdas) <= 0) or np.any(np.diff(n_bars) <= 0):
        raise ValueError("grids must be strictly increasing")
    n_bar_init = device.n_bar_init if n_bar_init is None else n_bar_init
    k_max = device.k_max if k_max is None else k_max
    r_csl = device.csl.r_csl if r_csl is None else r_csl
    if n_bars[0] < n_bar_init:
        raise ValueError("n_bar grid must not go below n_bar_init")
    unit = csl_diffusion(device.geometry, device.mode, CslConfig(1.0, r_csl))

    def run(nb):
        return _map_row(device, lambdas, nb, unit, n_bar_init, k_max)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(run, n_bars))
    else:
        rows = [run(nb) for nb in n_bars]
    return DeltaMap(
        lambda_csl_grid=lambdas,
        n_bar_grid=n_bars,
        T_eff_grid=np.array([temperature_from_occupation(nb, device.mode.Omega) for nb in n_bars]),
        delta_max=np.array([r[0] for r in rows]),
        k_star=np.array([r[1] for r in rows]),
        excluded=np.array([r[2] for r in rows]),
        lambda_threshold=np.array([r[3] for r in rows]),
    )


def analytic_lambda_threshold(device: DeviceSpec, n_bar, r_csl) -> float:
    """lambda_CSL at which D_CSL equals D_th for bath occupation n_bar."""
    return csl_threshold_rate(device.geometry, device.mode, r_csl, thermal_diffusion_at(device, n_bar))
