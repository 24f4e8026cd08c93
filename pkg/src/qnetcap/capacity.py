"""Classical and quantum information rates for the damping/dephasing family.

One-shot classical capacity: maximum of the Holevo information over input
ensembles.  At s = 0 a closed form exists; elsewhere the maximization is a
deterministic multistart Nelder-Mead search over ensembles restricted to
the x-z plane of the Bloch ball (the channel commutes with diagonal phase
rotations, and mirrored +/- coherence pairs realize any achievable average,
so real signed coherences lose nothing).

One-shot quantum capacity: maximum of the coherent information over input
states, clamped to exactly zero for eta <= 1/2 where the damping factor is
anti-degradable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .channel import (
    ChannelParams,
    QubitState,
    apply_channel,
    channel_entropy,
    channel_fidelity,
    exchange_entropy,
    von_neumann_entropy,
)
from .modelio import ResultTable

SURFACE_COLUMNS = ("eta", "s", "c1", "q1", "fidelity", "entropy")


@dataclass(frozen=True)
class Ensemble:
    """Probability-weighted collection of qubit states."""

    entries: tuple[tuple[float, QubitState], ...]

    def __post_init__(self):
        entries = tuple((float(xi), rho) for xi, rho in self.entries)
        object.__setattr__(self, "entries", entries)
        weights = [xi for xi, _ in entries]
        if any(xi < -1e-12 for xi in weights):
            raise ValueError("ensemble weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {sum(weights)!r}, not 1")


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the multistart derivative-free searches."""

    max_iterations: int = 6000
    restarts: int = 3
    tolerance: float = 1e-9
    ensemble_size: int = 4
    seed: int = 7

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.ensemble_size < 2:
            raise ValueError("ensemble_size must be at least 2")


@dataclass(frozen=True)
class CapacityResult:
    """Outcome of a capacity computation, in bits per channel use."""

    value: float
    argmax: Ensemble | QubitState
    converged: bool
    iterations: int

    def __post_init__(self):
        if not -1e-9 <= self.value <= 1.0 + 1e-9:
            raise ValueError(f"capacity {self.value} outside [0, 1]")


@dataclass(frozen=True)
class SurfaceResult:
    """Capacity surface table plus any grid cells that failed to converge."""

    table: ResultTable
    unconverged: tuple[tuple[float, float], ...] = field(default=())

    @property
    def converged(self) -> bool:
        return not self.unconverged


def binary_entropy(x: float) -> float:
    """H2(x) = -x log2 x - (1-x) log2 (1-x), zero at the endpoints."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    return _h2(x)


def _h2(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _h2_clipped(x: float) -> float:
    # Float-noise-tolerant variant for optimizer internals.
    return _h2(min(max(x, 0.0), 1.0))


def _output_entropy(eta: float, s: float, p: float, gamma_sq: float) -> float:
    # Entropy of the channel output with input population p and |gamma|^2.
    d = math.sqrt((eta * p - 0.5) ** 2 + eta * s * gamma_sq)
    return _h2_clipped(0.5 + d)


def optimal_input_weight(eta: float) -> float:
    """Excited-state weight maximizing H2(eta*p) - p*H2(eta)."""
    if not 0.0 < eta <= 1.0 + 1e-12:
        raise ValueError(f"eta={eta} outside (0, 1]")
    if eta >= 1.0:
        return 0.5
    return 1.0 / ((1.0 - eta) ** ((eta - 1.0) / eta) + eta)


def c1_fully_dephased(eta: float) -> CapacityResult:
    """Closed-form one-shot classical capacity of the fully dephased channel.

    The optimum is achieved by mixing the excited and ground states with
    weights (p_bar, 1 - p_bar).
    """
    ChannelParams(eta=eta, s=0.0)
    if eta <= 0.0:
        ensemble = Ensemble(entries=((1.0, QubitState(p=0.0)),))
        return CapacityResult(value=0.0, argmax=ensemble, converged=True, iterations=0)
    p_bar = optimal_input_weight(eta)
    value = _h2(eta * p_bar) - p_bar * _h2(eta)
    ensemble = Ensemble(
        entries=((p_bar, QubitState(p=1.0)), (1.0 - p_bar, QubitState(p=0.0)))
    )
    return CapacityResult(value=value, argmax=ensemble, converged=True, iterations=0)


def holevo_information(params: ChannelParams, ens: Ensemble) -> float:
    """S(sum_k xi_k E(rho_k)) - sum_k xi_k S(E(rho_k)), in bits."""
    avg_p = sum(xi * rho.p for xi, rho in ens.entries)
    avg_g = sum(xi * rho.gamma for xi, rho in ens.entries)
    total = _output_entropy(params.eta, params.s, avg_p, abs(avg_g) ** 2)
    members = sum(
        xi * _output_entropy(params.eta, params.s, rho.p, abs(rho.gamma) ** 2)
        for xi, rho in ens.entries
    )
    return total - members


def _environment_spectrum_entropy(eta: float, s: float, p: float, g: float) -> float:
    # Entropy of the 3x3 environment state W for a real-coherence input.
    a_sq = (1.0 + math.sqrt(s)) / 2.0
    b_sq = 1.0 - a_sq
    a, b = math.sqrt(a_sq), math.sqrt(b_sq)
    leak = math.sqrt(1.0 - eta)
    survive = 1.0 - (1.0 - eta) * p
    tilt = eta * p - (1.0 - p)
    w = np.array(
        [
            [a_sq * survive, a * leak * g, a * b * tilt],
            [a * leak * g, (1.0 - eta) * p, -b * leak * g],
            [a * b * tilt, -b * leak * g, b_sq * survive],
        ]
    )
    eigs = np.linalg.eigvalsh(w)
    return float(-sum(lam * math.log2(lam) for lam in eigs if lam > 1e-300))


def coherent_information(params: ChannelParams, rho: QubitState) -> float:
    """S(E(rho)) minus the exchange entropy; may be negative."""
    out = apply_channel(params, rho)
    return von_neumann_entropy(out.matrix()) - exchange_entropy(params, rho)


def _coherent_information_real(eta: float, s: float, p: float, g: float) -> float:
    out = _output_entropy(eta, s, p, g * g)
    return out - _environment_spectrum_entropy(eta, s, p, g)


def _simplex_search(fun, x0, bounds, opts: OptimizerOptions):
    res = optimize.minimize(
        fun,
        x0,
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "maxiter": opts.max_iterations,
            "xatol": 1e-8,
            "fatol": opts.tolerance,
        },
    )
    return res


def _ensemble_from_vector(x: np.ndarray, n: int) -> Ensemble:
    w = np.clip(x[:n], 0.0, None)
    r = np.clip(x[n : 2 * n], 0.0, 1.0)
    th = x[2 * n :]
    total = w.sum()
    xi = w / total if total > 1e-12 else np.full(n, 1.0 / n)
    entries = []
    for k in range(n):
        p = 0.5 * (1.0 + r[k] * math.cos(th[k]))
        g = 0.5 * r[k] * math.sin(th[k])
        entries.append((float(xi[k]), QubitState(p=min(max(p, 0.0), 1.0), gamma=g)))
    return Ensemble(entries=tuple(entries))


def _holevo_starts(eta: float, s: float, n: int) -> list[np.ndarray]:
    # Deterministic informed starts: the fully-dephased optimum, the best
    # mirrored pure pair from a coarse scan, and an even spread.
    starts = []
    p_bar = optimal_input_weight(eta) if eta > 0.0 else 0.5
    w = np.zeros(n)
    w[0], w[1] = p_bar, 1.0 - p_bar
    r = np.zeros(n)
    r[0] = r[1] = 1.0
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    th[0], th[1] = 0.0, math.pi
    starts.append(np.concatenate([w, r, th]))

    best = (0.0, math.pi / 2.0, 0.5)
    for theta in np.linspace(0.1, math.pi - 0.1, 25):
        p = 0.5 * (1.0 + math.cos(theta))
        g = 0.5 * math.sin(theta)
        for q in (0.3, 0.5, 0.7):
            avg_g = (2.0 * q - 1.0) * g
            chi = _output_entropy(eta, s, p, avg_g * avg_g) - _output_entropy(
                eta, s, p, g * g
            )
            if chi > best[0]:
                best = (chi, theta, q)
    _, theta, q = best
    w = np.zeros(n)
    w[0], w[1] = q, 1.0 - q
    r = np.zeros(n)
    r[0] = r[1] = 1.0
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    th[0], th[1] = theta, 2.0 * math.pi - theta
    starts.append(np.concatenate([w, r, th]))

    w = np.full(n, 1.0 / n)
    r = np.ones(n)
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    starts.append(np.concatenate([w, r, th]))
    return starts


def c1_numeric(params: ChannelParams, opts: OptimizerOptions) -> CapacityResult:
    """Maximize the Holevo information over ensembles of qubit states.

    States are parametrized by weight, Bloch radius, and polar angle in the
    x-z plane.  The search runs from informed starts plus ``opts.restarts``
    seeded random starts and keeps the best.
    """
    eta, s, n = params.eta, params.s, opts.ensemble_size

    def negative_chi(x: np.ndarray) -> float:
        w = x[:n]
        total = w.sum()
        if total < 1e-12:
            return 0.0
        r = x[n : 2 * n]
        th = x[2 * n :]
        p = 0.5 * (1.0 + r * np.cos(th))
        g = 0.5 * r * np.sin(th)
        xi = w / total
        avg_p = float(xi @ p)
        avg_g = float(xi @ g)
        chi = _output_entropy(eta, s, avg_p, avg_g * avg_g)
        for k in range(n):
            chi -= xi[k] * _output_entropy(eta, s, float(p[k]), float(g[k] * g[k]))
        return -chi

    bounds = [(0.0, 1.0)] * (2 * n) + [(0.0, 2.0 * math.pi)] * n
    rng = np.random.default_rng(opts.seed)
    starts = _holevo_starts(eta, s, n)
    for _ in range(opts.restarts):
        starts.append(
            np.concatenate(
                [
                    rng.uniform(0.05, 1.0, n),
                    rng.uniform(0.0, 1.0, n),
                    rng.uniform(0.0, 2.0 * math.pi, n),
                ]
            )
        )

    best_x, best_val, converged, iterations = None, math.inf, False, 0
    for x0 in starts:
        res = _simplex_search(negative_chi, x0, bounds, opts)
        iterations += res.nit
        converged = converged or bool(res.success)
        if res.fun < best_val:
            best_val, best_x = res.fun, res.x

    value = max(-best_val, 0.0)
    return CapacityResult(
        value=min(value, 1.0),
        argmax=_ensemble_from_vector(best_x, n),
        converged=converged,
        iterations=iterations,
    )


def q1_numeric(params: ChannelParams, opts: OptimizerOptions) -> CapacityResult:
    """Maximize the coherent information over input states, floored at zero.

    For eta <= 1/2 the damping factor is anti-degradable, so the result is
    clamped to exactly zero instead of reporting optimizer noise.
    """
    eta, s = params.eta, params.s
    if eta <= 0.5:
        return CapacityResult(
            value=0.0, argmax=QubitState(p=0.0), converged=True, iterations=0
        )

    def negative_ic(x: np.ndarray) -> float:
        p = float(x[0])
        u = float(x[1])
        g = u * math.sqrt(max(p * (1.0 - p), 0.0))
        return -_coherent_information_real(eta, s, p, g)

    scalar = optimize.minimize_scalar(
        lambda p: -_coherent_information_real(eta, s, p, 0.0),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": 1e-12},
    )
    iterations = scalar.nfev
    best_val = scalar.fun
    best_x = np.array([scalar.x, 0.0])
    converged = bool(scalar.success)

    rng = np.random.default_rng(opts.seed)
    starts = [np.array([scalar.x, 0.0]), np.array([0.5, 0.5])]
    for _ in range(opts.restarts):
        starts.append(rng.uniform(0.0, 1.0, 2))
    for x0 in starts:
        res = _simplex_search(negative_ic, x0, [(0.0, 1.0), (0.0, 1.0)], opts)
        iterations += res.nit
        converged = converged or bool(res.success)
        if res.fun < best_val:
            best_val, best_x = res.fun, res.x

    p = min(max(float(best_x[0]), 0.0), 1.0)
    g = float(best_x[1]) * math.sqrt(p * (1.0 - p))
    return CapacityResult(
        value=min(max(-best_val, 0.0), 1.0),
        argmax=QubitState(p=p, gamma=g),
        converged=converged,
        iterations=iterations,
    )


def blahut_arimoto(transition_matrix, tolerance: float = 1e-9) -> float:
    """Capacity in bits of a discrete memoryless channel.

    Alternating maximization over input distributions; stops when the
    standard upper and lower capacity bounds agree within ``tolerance``.

    :param transition_matrix: row-stochastic array, rows = inputs,
        columns = output distributions.
    :raises ValueError: if the matrix is not row-stochastic.
    """
    p_y_x = np.asarray(transition_matrix, dtype=float)
    if p_y_x.ndim != 2:
        raise ValueError("transition matrix must be two-dimensional")
    if np.any(p_y_x < -1e-12):
        raise ValueError("transition matrix has negative entries")
    if np.max(np.abs(p_y_x.sum(axis=1) - 1.0)) > 1e-9:
        raise ValueError("transition matrix rows must sum to 1")

    p_y_x = np.clip(p_y_x, 0.0, None)
    m = p_y_x.shape[0]
    r = np.full(m, 1.0 / m)
    log_p = np.where(p_y_x > 0.0, np.log(p_y_x, where=p_y_x > 0.0), 0.0)
    for _ in range(100_000):
        col = r @ p_y_x
        with np.errstate(divide="ignore"):
            log_col = np.where(col > 0.0, np.log(col, where=col > 0.0), 0.0)
        # exponent_x = sum_y P(y|x) log[P(y|x) / col_y], with 0 log 0 = 0
        exponent = np.einsum("xy,xy->x", p_y_x, log_p - log_col[None, :])
        c = np.exp(exponent)
        lower = math.log(float(r @ c))
        upper = math.log(float(c.max()))
        if upper - lower < tolerance * math.log(2.0):
            return lower / math.log(2.0)
        r = r * c
        r /= r.sum()
    raise RuntimeError("Blahut-Arimoto did not converge")


def capacity_surface(eta_grid, s_grid, opts: OptimizerOptions) -> SurfaceResult:
    """Tabulate C1, Q1, fidelity, and Choi entropy over an (eta, s) grid.

    Deterministic for a fixed ``opts.seed``: each cell derives its own RNG
    stream from (seed, row, column), so results do not depend on evaluation
    order.
    """
    etas = [float(v) for v in eta_grid]
    ss = [float(v) for v in s_grid]
    rows = []
    unconverged = []
    for i, eta in enumerate(etas):
        for j, s in enumerate(ss):
            params = ChannelParams(eta=eta, s=s)
            cell_opts = replace(opts, seed=_cell_seed(opts.seed, i, j))
            c1 = c1_numeric(params, cell_opts)
            q1 = q1_numeric(params, cell_opts)
            if not (c1.converged and q1.converged):
                unconverged.append((eta, s))
            rows.append(
                (
                    eta,
                    s,
                    c1.value,
                    q1.value,
                    channel_fidelity(params),
                    channel_entropy(params),
                )
            )
    table = ResultTable(columns=SURFACE_COLUMNS, rows=tuple(rows))
    return SurfaceResult(table=table, unconverged=tuple(unconverged))


def _cell_seed(seed: int, i: int, j: int) -> int:
    return int(np.random.SeedSequence([seed, i, j]).generate_state(1)[0])
