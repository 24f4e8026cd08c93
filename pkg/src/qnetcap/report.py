"""Table builders behind the CLI report commands.

Capacities along trajectories reuse the extracted channel parameters and
call the capacity module per point; nothing is recomputed with shortcut
formulas here.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .capacity import (
    OptimizerOptions,
    SurfaceResult,
    _cell_seed,
    c1_numeric,
    capacity_surface,
    q1_numeric,
)
from .channel import channel_entropy, channel_fidelity
from .dynamics import IntegratorConfig, NetworkSpec, is_degenerate, trajectory
from .modelio import ResultTable

TRAJECTORY_COLUMNS = (
    "t",
    "eta",
    "s",
    "c1",
    "q1",
    "fidelity",
    "entropy",
    "degenerate_flag",
)


def surface_report(eta_steps: int, s_steps: int, opts: OptimizerOptions) -> SurfaceResult:
    """Capacity surface on uniform [0, 1] grids with the given resolution."""
    if eta_steps < 2 or s_steps < 2:
        raise ValueError("surface grids need at least 2 steps per axis")
    etas = np.linspace(0.0, 1.0, eta_steps)
    ss = np.linspace(0.0, 1.0, s_steps)
    return capacity_surface(etas, ss, opts)


def trajectory_report(
    spec: NetworkSpec,
    cfg: IntegratorConfig,
    t_max: float,
    t_steps: int,
    opts: OptimizerOptions,
) -> tuple[ResultTable, tuple]:
    """Channel parameters and capacities on a uniform time grid.

    :return: the result table and the times of unconverged optimizer cells.
    """
    if t_steps < 1:
        raise ValueError("t_steps must be at least 1")
    t_grid = np.linspace(0.0, t_max, t_steps)
    points = trajectory(spec, cfg, t_grid)
    rows = []
    unconverged = []
    for k, (t, params) in enumerate(points):
        cell_opts = replace(opts, seed=_cell_seed(opts.seed, k, 0))
        c1 = c1_numeric(params, cell_opts)
        q1 = q1_numeric(params, cell_opts)
        if not (c1.converged and q1.converged):
            unconverged.append(t)
        rows.append(
            (
                t,
                params.eta,
                params.s,
                c1.value,
                q1.value,
                channel_fidelity(params),
                channel_entropy(params),
                1.0 if is_degenerate(params) else 0.0,
            )
        )
    return ResultTable(columns=TRAJECTORY_COLUMNS, rows=tuple(rows)), tuple(unconverged)
