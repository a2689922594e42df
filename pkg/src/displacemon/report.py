"""Deterministic CSV / JSON / SVG writers.

CSV floats use 9 significant digits; JSON floats use the shortest round-trip
representation.  Identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import __version__

ADLER_BAND = (1e-10, 1e-8, 1e-6)  # lambda_CSL reference lines (1/s)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.9g" % v
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError("non-finite value in report")
        return v
    return v


def to_json(config_hash: str, command: str, *, rows=None, header=None, matrix=None) -> str:
    meta = {"command": command, "config_hash": config_hash, "version": __version__}
    doc = {"meta": meta}
    if rows is not None:
        doc["rows"] = [dict(zip(header, _jsonable(list(r)))) for r in rows]
    if matrix is not None:
        doc["matrix"] = {k: _jsonable(v) for k, v in matrix.items()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "displacemon"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": f"displacemon {__version__}"})


def render_curve_svg(path, curves):
    """Line plot of P_std and P_csl against k; ``curves`` maps a label to a ProbabilityCurve."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, c in curves.items():
        ax.plot(c.k, c.p_std, label=f"{label} standard")
        ax.plot(c.k, c.p_csl, label=f"{label} CSL")
        ax.annotate("", xy=(c.k_star, c.p_csl[c.k_star]), xytext=(c.k_star, c.p_csl[c.k_star] - 0.05),
                    arrowprops={"arrowstyle": "->", "color": "red"})
    ax.set_xlabel("half-periods k")
    ax.set_ylabel("P(+ | +)")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def render_map_svg(path, dmap, title=""):
    """Heat map of Delta_max with the exclusion boundary and reference lambda lines."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 5))
    X, Y = np.meshgrid(dmap.lambda_csl_grid, dmap.n_bar_grid)
    mesh = ax.pcolormesh(X, Y, 100 * dmap.delta_max, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="Delta_max (%)")
    ax.contourf(X, Y, dmap.excluded.astype(float), levels=[0.5, 1.5], colors="grey", alpha=0.6)
    ax.plot(dmap.lambda_threshold, dmap.n_bar_grid, color="black")
    for lam in ADLER_BAND:
        ax.axvline(lam, color="white", linestyle="--", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlim(dmap.lambda_csl_grid[0], dmap.lambda_csl_grid[-1])
    ax.set_xlabel("lambda_CSL (1/s)")
    ax.set_ylabel("bath occupation N")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
