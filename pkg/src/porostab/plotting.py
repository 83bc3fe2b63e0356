"""SVG figures rendered from the CSV files the CLI writes.

The CSV header decides the figure: profile, neutral curves, thresholds,
energy trace, Squire table, or a plain two-column polyline.
"""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import UsageError  # noqa: E402
from .records import read_csv  # noqa: E402

plt.rcParams.update({
    "svg.hashsalt": "porostab",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
})


def _floats(col):
    return np.array([float(x) if x not in ("", "inf") else np.inf for x in col])


def _save(fig, output):
    output = Path(output)
    fig.tight_layout()
    fig.savefig(output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return output


def load_table(path):
    header, rows = read_csv(path)
    if not header or not rows:
        raise UsageError(f"{path}: empty CSV")
    cols = {h: [r[i] for r in rows] for i, h in enumerate(header)}
    return header, cols


def threshold_series(tables):
    """Map kind -> (M array, R_c array) sorted by M."""
    series = defaultdict(list)
    for cols in tables:
        for k, M, R in zip(cols["kind"], _floats(cols["M"]), _floats(cols["R_c"])):
            series[k].append((M, R))
    return {k: tuple(np.array(v).T) for k, v in ((k, sorted(v)) for k, v in series.items())}


def energy_below_linear(series) -> bool | None:
    """True if R_E < R_linear at every M sampled by both; None if not comparable."""
    if "linear" not in series or "energy-spanwise" not in series:
        return None
    lin = dict(zip(*series["linear"]))
    en = dict(zip(*series["energy-spanwise"]))
    common = sorted(set(lin) & set(en))
    if not common:
        return None
    return all(en[M] < lin[M] for M in common)


def plot_thresholds(tables, output, title=None):
    series = threshold_series(tables)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    styles = {"linear": "o-", "energy-spanwise": "s--", "energy-3d": "^:"}
    for kind, (M, R) in sorted(series.items()):
        ax.semilogy(M, R, styles.get(kind, ".-"), label=kind)
    ax.set_xlabel("M")
    ax.set_ylabel("critical Reynolds number")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, output), energy_below_linear(series)


def plot_neutral(tables, output, title=None):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for cols in tables:
        by_M = defaultdict(list)
        for M, a, R in zip(_floats(cols["M"]), _floats(cols["a"]), _floats(cols["Re_neutral"])):
            if np.isfinite(R):
                by_M[M].append((a, R))
        for M, pts in sorted(by_M.items()):
            a, R = np.array(sorted(pts)).T
            ax.semilogy(a, R, ".-", label=f"M = {M:g}")
    ax.set_xlabel("wavenumber a")
    ax.set_ylabel("neutral Reynolds number")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, output)


def plot_trace(cols, output, title=None):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    t = _floats(cols["t"])
    ax.semilogy(t, _floats(cols["E"]), label="E(t)")
    if any(cols["envelope"]):
        ax.semilogy(t, _floats(cols["envelope"]), "k--", label="decay bound")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, output)


def plot_profile(cols, output, title=None):
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot(_floats(cols["U"]), _floats(cols["z"]), "-")
    ax.set_xlabel("U")
    ax.set_ylabel("z")
    if title:
        ax.set_title(title)
    return _save(fig, output)


def plot_squire(cols, output, title=None):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    by_b = defaultdict(list)
    for a, b, m in zip(_floats(cols["a"]), _floats(cols["b"]), _floats(cols["m"])):
        by_b[b].append((a, m))
    for b, pts in sorted(by_b.items()):
        a, m = np.array(sorted(pts)).T
        ax.plot(a, m, "o-", label=f"b = {b:g}")
    ax.set_xlabel("a")
    ax.set_ylabel("max energy quotient m")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, output)


def plot_polyline(header, cols, output, title=None):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    x, y = header[0], header[1]
    ax.plot(_floats(cols[x]), _floats(cols[y]), "-")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title)
    return _save(fig, output)


def render(paths, output, title=None):
    """Render one SVG from the given CSV files; returns (path, ordering_ok)."""
    paths = list(paths)
    if not paths:
        raise UsageError("no input CSV given")
    loaded = [load_table(p) for p in paths]
    headers = {tuple(h) for h, _ in loaded}
    if len(headers) > 1 and not all("R_c" in h and "kind" in h for h in headers):
        raise UsageError("input CSVs have different layouts")
    header, cols = loaded[0]
    hs = set(header)
    if {"kind", "M", "R_c"} <= hs:
        return plot_thresholds([c for _, c in loaded], output, title)
    if {"M", "a", "Re_neutral"} <= hs:
        return plot_neutral([c for _, c in loaded], output, title), None
    if {"t", "E", "envelope"} <= hs:
        return plot_trace(cols, output, title), None
    if {"z", "U"} <= hs:
        return plot_profile(cols, output, title), None
    if {"a", "b", "m"} <= hs:
        return plot_squire(cols, output, title), None
    if len(header) >= 2:
        return plot_polyline(header, cols, output, title), None
    raise UsageError("need at least two columns to plot")
