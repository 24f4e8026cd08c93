"""Figure rendering for surface and trajectory tables.

Figures are written next to the CSV they illustrate; the CSV remains the
interchange format.  Only file output is supported (Agg backend).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .modelio import ResultTable

_STYLE = {
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "axes.titlesize": 10,
}


def figure_path(out_path) -> Path:
    """PNG path sitting next to a table's CSV path."""
    return Path(out_path).with_suffix(".png")


def surface_figure(table: ResultTable):
    """Heatmap panels of C1, Q1, fidelity, and Choi entropy over (eta, s)."""
    etas = np.array(sorted(set(table.column("eta"))))
    ss = np.array(sorted(set(table.column("s"))))
    grids = {}
    for name in ("c1", "q1", "fidelity", "entropy"):
        grid = np.full((len(etas), len(ss)), np.nan)
        for row in table.rows:
            i = int(np.searchsorted(etas, row[0]))
            j = int(np.searchsorted(ss, row[1]))
            grid[i, j] = row[table.columns.index(name)]
        grids[name] = grid
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(2, 2, figsize=(8, 6.4), constrained_layout=True)
        titles = {
            "c1": "classical capacity $C_1$",
            "q1": "quantum capacity $Q_1$",
            "fidelity": "channel fidelity $F$",
            "entropy": "channel entropy $S$",
        }
        for ax, name in zip(axes.flat, titles):
            mesh = ax.pcolormesh(ss, etas, grids[name], shading="nearest")
            ax.set_xlabel("coherence retention $s$")
            ax.set_ylabel("population transfer $\\eta$")
            ax.set_title(titles[name])
            ax.grid(False)
            fig.colorbar(mesh, ax=ax)
    return fig


def trajectory_figure(table: ResultTable):
    """Channel parameters and figures of merit against time."""
    t = table.column("t")
    with plt.rc_context(_STYLE):
        fig, (top, bottom) = plt.subplots(
            2, 1, figsize=(7, 6), sharex=True, constrained_layout=True
        )
        top.plot(t, table.column("eta"), label="$\\eta$")
        top.plot(t, table.column("s"), label="$s$", linestyle="--")
        top.set_ylabel("channel parameters")
        top.legend(loc="best")
        bottom.plot(t, table.column("c1"), label="$C_1$")
        bottom.plot(t, table.column("q1"), label="$Q_1$")
        bottom.plot(t, table.column("fidelity"), label="$F$", linestyle="--")
        bottom.plot(t, table.column("entropy"), label="$S$", linestyle=":")
        bottom.set_xlabel("time (ps)")
        bottom.set_ylabel("bits / dimensionless")
        bottom.legend(loc="best")
    return fig


def save_figure(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
