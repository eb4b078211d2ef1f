"""Writers for sweep results: CSV, JSON and static SVG charts.

CSV and JSON are byte-for-byte reproducible for identical results.  The
plotting conventions of the figures (concurrence times N, undefined squeezing
drawn as 1) are applied only in the SVG charts.
"""

import csv
import io
import json
import os

import matplotlib
import numpy as np
from matplotlib.colors import TwoSlopeNorm
from matplotlib.figure import Figure

from ..errors import ConfigError
from .config import FORMATS

FLOAT_FORMAT = "{:.11e}"


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value)


def format_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(row.get(c)) for c in result.columns])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def format_json(result):
    return json.dumps(_plain(result.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_csv(result, path):
    _write_text(path, format_csv(result))


def write_json(result, path):
    _write_text(path, format_json(result))


def _values(rows, key):
    return np.array([np.nan if r.get(key) is None else float(r[key]) for r in rows])


def _axes_info(result):
    return result.metadata["spec"]["axes"]


def _heatmap(fig, result):
    ax = fig.add_subplot()
    axes = _axes_info(result)
    nx, ny = axes[0]["count"], axes[1]["count"]
    x = _values(result.rows, axes[0]["name"])[::ny]
    y = _values(result.rows, axes[1]["name"])[:ny]
    q = _values(result.rows, "q_v").reshape(nx, ny).T
    finite = q[np.isfinite(q)]
    lo = min(float(finite.min()) if finite.size else -1.0, -1e-12)
    hi = max(float(finite.max()) if finite.size else 1.0, 1e-12)
    mesh = ax.pcolormesh(x, y, np.ma.masked_invalid(q), shading="nearest", cmap="RdBu",
                         norm=TwoSlopeNorm(vcenter=0.0, vmin=lo, vmax=hi))
    if nx > 1 and ny > 1 and lo < 0 < hi:
        ax.contour(x, y, np.ma.masked_invalid(q), levels=[0.0], colors="k", linewidths=1.0)
    for axis, setter in ((axes[0], ax.set_xscale), (axes[1], ax.set_yscale)):
        if axis["spacing"] == "log":
            setter("log")
    ax.set_xlabel(axes[0]["name"])
    ax.set_ylabel(axes[1]["name"])
    fig.colorbar(mesh, ax=ax, label="Q_v = tr[B_2 rho_2]")


def _line_by_axis(fig, result):
    ax = fig.add_subplot()
    axes = _axes_info(result)
    q = _values(result.rows, "q_v")
    if axes:
        x = _values(result.rows, axes[0]["name"])
        ax.set_xlabel(axes[0]["name"])
        if axes[0]["spacing"] == "log":
            ax.set_xscale("log")
    else:
        x = np.arange(len(q))
        ax.set_xlabel("point")
    ax.plot(x, q, marker="o")
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_ylabel("Q_v")


def _groups(rows, keys):
    out = {}
    for r in rows:
        out.setdefault(tuple(r.get(k) for k in keys), []).append(r)
    return out


def _trajectory(fig, result):
    ax = fig.add_subplot()
    n = result.metadata["spec"]["n_qubits"]
    names = [a["name"] for a in _axes_info(result)]
    for key, rows in _groups(result.rows, names).items():
        suffix = "" if not names else " (" + ", ".join(f"{k}={v:g}" for k, v in zip(names, key)) + ")"
        t = _values(rows, "t")
        xi2 = np.array([1.0 if r.get("xi2") is None else float(r["xi2"]) for r in rows])
        ax.plot(t, _values(rows, "q_v"), marker="o", markersize=2, label="Q_v" + suffix)
        ax.plot(t, n * _values(rows, "concurrence"), marker="s", markersize=2, label="N C" + suffix)
        ax.plot(t, xi2, marker="^", markersize=2, label="xi^2" + suffix)
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_xlabel("t")
    ax.legend(fontsize="small")


def _attack(fig, result):
    ax = fig.add_subplot()
    names = [a["name"] for a in _axes_info(result)] + ["kappa"]
    for key, rows in _groups(result.rows, names).items():
        label = ", ".join(f"{k}={v:g}" for k, v in zip(names, key))
        p = _values(rows, "p")
        (line,) = ax.plot(p, _values(rows, "q_v"), marker="o", markersize=2, label=label)
        mix = _values(rows, "q_v_mixture")
        if np.any(np.isfinite(mix)):
            ax.plot(p, mix, linestyle="--", color=line.get_color(), linewidth=0.8)
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_xlabel("p = kappa t")
    ax.set_ylabel("Q_v")
    ax.legend(fontsize="small")


def write_svg(result, path):
    experiment = result.metadata["spec"]["experiment"]
    fig = Figure(figsize=(6.4, 4.8))
    if not result.rows:
        fig.text(0.5, 0.5, "no rows", ha="center")
    elif experiment == "steady" and len(_axes_info(result)) == 2:
        _heatmap(fig, result)
    elif experiment == "steady":
        _line_by_axis(fig, result)
    elif experiment == "trajectory":
        _trajectory(fig, result)
    else:
        _attack(fig, result)
    fig.suptitle(result.metadata["spec"]["experiment_id"])
    with matplotlib.rc_context({"svg.hashsalt": "oqsbell", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


WRITERS = {"csv": write_csv, "json": write_json, "svg": write_svg}


def emit(result, out_dir, formats=("csv", "json"), stem=None):
    """Write ``result`` in each requested format; return the written paths."""
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ConfigError(f"unknown output formats {bad}; choose from {FORMATS}")
    os.makedirs(out_dir, exist_ok=True)
    stem = stem or result.metadata["spec"]["experiment_id"]
    paths = []
    for fmt in formats:
        path = os.path.join(out_dir, f"{stem}.{fmt}")
        WRITERS[fmt](result, path)
        paths.append(path)
    return paths
