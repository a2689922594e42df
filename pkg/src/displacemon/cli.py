"""Command-line entry point.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .decoherence import CslConfig, csl_diffusion
from .device import ConfigError, build_devices, config_hash, load_config, select_device
from .grating import ProtocolParams, dimensionless_diffusion, probability_full
from .oracle import NumericalError, OracleConfig, oracle_probabilities_mc, oracle_probability_cf
from .report import render_curve_svg, render_map_svg, to_csv, to_json
from .scan import (
    GRID_POINTS_DEFAULT,
    LAMBDA_GRID_DEFAULT,
    N_BAR_GRID_DEFAULT,
    ProbabilityCurve,
    decay_curve,
    delta_max_map,
    device_table,
    dp_report,
    log_grid,
    thermal_diffusion_at,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p, single_device=False):
    p.add_argument("--config", required=True, help="device configuration JSON")
    p.add_argument("--device", help="device name" + (" (required when the config has several)" if single_device else ""))
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--svg", help="also render a plot to this SVG path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="displacemon", description="Displacemon collapse-model feasibility tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("device-table", help="derived device parameters and DP energies")
    _common(p)

    p = sub.add_parser("dp-report", help="DP lifetimes, occupation thresholds and vibration budget")
    _common(p)

    p = sub.add_parser("csl-curve", help="second-grating probability with and without CSL")
    _common(p, single_device=True)
    p.add_argument("--lambda-csl", type=float, help="collapse rate (1/s); default from config")
    p.add_argument("--r-csl", type=float, help="localisation length (m); default from config")
    p.add_argument("--n-bar", type=float, help="bath occupation; default from config")
    p.add_argument("--n-bar-init", type=float, help="initial occupation; default from config")
    p.add_argument("--k-max", type=int, help="last half-period index; default from config")

    p = sub.add_parser("delta-map", help="Delta_max over (lambda_CSL, bath occupation)")
    _common(p, single_device=True)
    p.add_argument("--lambda-min", type=float, default=LAMBDA_GRID_DEFAULT[0])
    p.add_argument("--lambda-max", type=float, default=LAMBDA_GRID_DEFAULT[1])
    p.add_argument("--nbar-min", type=float, default=N_BAR_GRID_DEFAULT[0])
    p.add_argument("--nbar-max", type=float, default=N_BAR_GRID_DEFAULT[1])
    p.add_argument("--grid-points", type=int, default=GRID_POINTS_DEFAULT)
    p.add_argument("--r-csl", type=float)
    p.add_argument("--n-bar-init", type=float)
    p.add_argument("--k-max", type=int)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("oracle-check", help="closed form against the CF and Monte Carlo oracles")
    _common(p, single_device=True)
    p.add_argument("--k", type=int, nargs="+", default=[1, 5, 25])
    p.add_argument("--n-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=OracleConfig.seed)
    p.add_argument("--n-bar", type=float, help="bath occupation; default from config")
    p.add_argument("--n-bar-init", type=float)
    p.add_argument("--lambda-csl", type=float)
    p.add_argument("--r-csl", type=float)
    return parser


def _one_device(devices, name):
    chosen = select_device(devices, name)
    if len(chosen) > 1:
        raise ConfigError("--device", "config holds several devices; choose one with --device")
    return chosen[0]


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write(args, chash, header, rows, extra_matrix=None):
    if args.format == "json":
        text = to_json(chash, args.command, rows=rows, header=header, matrix=extra_matrix)
    else:
        text = to_csv(header, rows)
    _emit(args, text)


def _cmd_device_table(args, devices, chash):
    chosen = select_device(devices, args.device)
    tables = [device_table(d) for d in chosen]
    header = ["parameter", "symbol", "display_unit"] + [d.name for d in chosen]
    rows = [
        [r.parameter, r.symbol, r.display_unit] + [t[i].display_value for t in tables]
        for i, r in enumerate(tables[0])
    ]
    _write(args, chash, header, rows)


def _cmd_dp_report(args, devices, chash):
    header = ["device", "parameter", "value", "unit"]
    rows = []
    for d in select_device(devices, args.device):
        rows += [[d.name, r.parameter, r.value, r.display_unit if r.display_unit != "eV" else "J"] for r in dp_report(d)]
    _write(args, chash, header, rows)


def _cmd_csl_curve(args, devices, chash):
    dev = _one_device(devices, args.device)
    csl = CslConfig(
        dev.csl.lambda_csl if args.lambda_csl is None else args.lambda_csl,
        dev.csl.r_csl if args.r_csl is None else args.r_csl,
    )
    n_bar = dev.environment.N_bar if args.n_bar is None else args.n_bar
    curve = decay_curve(dev, csl, n_bar, args.n_bar_init, args.k_max)
    marker = {"k_star": curve.k_star, "delta_max": curve.delta_max}
    _write(args, chash, list(ProbabilityCurve.columns), curve.rows(), marker if args.format == "json" else None)
    if args.svg:
        render_curve_svg(args.svg, {dev.name: curve})


def _cmd_delta_map(args, devices, chash):
    dev = _one_device(devices, args.device)
    lam = log_grid(args.lambda_min, args.lambda_max, args.grid_points)
    nb = log_grid(args.nbar_min, args.nbar_max, args.grid_points)
    dmap = delta_max_map(dev, lam, nb, args.r_csl, args.n_bar_init, args.k_max, workers=args.workers)
    if args.format == "json":
        matrix = {
            "lambda_csl_grid": dmap.lambda_csl_grid,
            "n_bar_grid": dmap.n_bar_grid,
            "T_eff_grid": dmap.T_eff_grid,
            "delta_max": dmap.delta_max,
            "k_star": dmap.k_star,
            "excluded": dmap.excluded,
            "lambda_threshold": dmap.lambda_threshold,
        }
        _emit(args, to_json(chash, args.command, matrix=matrix))
    else:
        header = ["n_bar", "T_eff_K", "lambda_csl_hz", "delta_max", "k_star", "excluded"]
        rows = [
            [n, t, l, dmap.delta_max[i, j], dmap.k_star[i, j], dmap.excluded[i, j]]
            for i, (n, t) in enumerate(zip(dmap.n_bar_grid, dmap.T_eff_grid))
            for j, l in enumerate(dmap.lambda_csl_grid)
        ]
        _emit(args, to_csv(header, rows))
    if args.svg:
        render_map_svg(args.svg, dmap, title=f"Device {dev.name}")


def _cmd_oracle_check(args, devices, chash):
    dev = _one_device(devices, args.device)
    csl = CslConfig(
        dev.csl.lambda_csl if args.lambda_csl is None else args.lambda_csl,
        dev.csl.r_csl if args.r_csl is None else args.r_csl,
    )
    n_bar = dev.environment.N_bar if args.n_bar is None else args.n_bar
    n_bar_init = dev.n_bar_init if args.n_bar_init is None else args.n_bar_init
    if min(args.k) < 0:
        raise ConfigError("--k", "half-period indices must be non-negative")
    m = dev.mode
    d_si = thermal_diffusion_at(dev, n_bar) + csl_diffusion(dev.geometry, m, csl)
    params = ProtocolParams(dev.curve_grating.alpha_mag, n_bar_init, 0, m.Omega, m.Omega / dev.environment.Q)
    try:
        cfg = OracleConfig(n_samples=args.n_samples, seed=args.seed)
    except ValueError as exc:
        raise ConfigError("--n-samples/--seed", str(exc)) from None
    mc = oracle_probabilities_mc(params, args.k, d_si, m.X_ZP, cfg)
    header = ["k", "p_closed_form", "p_cf_oracle", "p_mc", "mc_stderr", "z_score"]
    rows = []
    for k in sorted(set(args.k)):
        pk = params.with_k(k)
        closed = float(probability_full(pk, dimensionless_diffusion(d_si, m.X_ZP)))
        cf = oracle_probability_cf(pk, d_si, m.X_ZP).p_hat
        est = mc[k]
        z = (est.p_hat - closed) / est.std_err if est.std_err > 0 else 0.0
        rows.append([k, closed, cf, est.p_hat, est.std_err, z])
    _write(args, chash, header, rows)


COMMANDS = {
    "device-table": _cmd_device_table,
    "dp-report": _cmd_dp_report,
    "csl-curve": _cmd_csl_curve,
    "delta-map": _cmd_delta_map,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    try:
        doc = load_config(args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            devices = build_devices(doc)
            with np.errstate(over="raise", invalid="raise"):
                COMMANDS[args.command](args, devices, config_hash(doc))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
