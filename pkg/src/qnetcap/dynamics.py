"""Excitation-preserving qubit-network dynamics on the restricted subspace.

The Hamiltonian (on-site energies plus hopping) and all noise terms
(local dephasing, local dissipation, an optional sink) conserve or lower
the excitation number, so starting from one excitation the evolution is
closed on span{vacuum, site 1..N, sink}.  Density operators are therefore
(N+2) x (N+2) matrices over the ordered basis {vacuum, site 1, ..., site N,
sink}, and the full Lindblad generator reduces to an exact small linear map.

Units: time in picoseconds, energies/hoppings in rad/ps, rates in 1/ps,
hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, QubitState

# Below this output population the coherence-retention parameter is
# unobservable and reported as zero.
DEGENERATE_ETA = 1e-9

SINK = "sink"


class IntegratorError(RuntimeError):
    """Step-size violation or loss of physicality during propagation."""


@dataclass(frozen=True)
class SinkSpec:
    """Absorbing population target attached to one network site."""

    site: int
    rate: float


@dataclass(frozen=True)
class NetworkSpec:
    """N-site network: energies, hoppings, noise rates, and the qubit ports.

    ``omega``, ``gamma_deph``, ``gamma_diss`` are per-site sequences; ``v``
    is the symmetric hopping matrix with zero diagonal.  Site indices are
    zero-based.  ``output`` is a site index or the string ``"sink"``.
    """

    n_sites: int
    omega: tuple
    v: tuple
    gamma_deph: tuple
    gamma_diss: tuple
    sink: SinkSpec | None = None
    input_site: int = 0
    output: int | str | None = None

    def __post_init__(self):
        n = self.n_sites
        if n < 1:
            raise ValueError("network needs at least one site")
        omega = tuple(float(x) for x in self.omega)
        deph = tuple(float(x) for x in self.gamma_deph)
        diss = tuple(float(x) for x in self.gamma_diss)
        v = tuple(tuple(float(x) for x in row) for row in np.asarray(self.v, dtype=float))
        for name, seq in (("omega", omega), ("gamma_deph", deph), ("gamma_diss", diss)):
            if len(seq) != n:
                raise ValueError(f"{name} has length {len(seq)}, expected {n}")
        vm = np.asarray(v)
        if vm.shape != (n, n):
            raise ValueError(f"hopping matrix has shape {vm.shape}, expected ({n}, {n})")
        if np.max(np.abs(vm - vm.T)) > 1e-12:
            raise ValueError("hopping matrix must be symmetric")
        if np.max(np.abs(np.diag(vm))) > 0.0:
            raise ValueError("hopping matrix must have zero diagonal")
        if any(x < 0.0 for x in deph) or any(x < 0.0 for x in diss):
            raise ValueError("noise rates must be nonnegative")
        if self.sink is not None:
            if not 0 <= self.sink.site < n:
                raise ValueError(f"sink site {self.sink.site} out of range")
            if self.sink.rate < 0.0:
                raise ValueError("sink rate must be nonnegative")
        if not 0 <= self.input_site < n:
            raise ValueError(f"input site {self.input_site} out of range")
        output = self.output if self.output is not None else n - 1
        if output == SINK:
            if self.sink is None:
                raise ValueError("output is the sink but no sink is configured")
        elif not 0 <= output < n:
            raise ValueError(f"output site {output} out of range")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "gamma_deph", deph)
        object.__setattr__(self, "gamma_diss", diss)
        object.__setattr__(self, "output", output)

    @property
    def dim(self) -> int:
        """Basis size: vacuum + sites + sink slot."""
        return self.n_sites + 2

    def output_index(self) -> int:
        if self.output == SINK:
            return self.n_sites + 1
        return int(self.output) + 1

    def max_rate(self) -> float:
        rates = [abs(x) for x in self.omega]
        rates += [abs(x) for row in self.v for x in row]
        rates += list(self.gamma_deph) + list(self.gamma_diss)
        if self.sink is not None:
            rates.append(self.sink.rate)
        return max(rates)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step classical 4th-order integration settings.

    ``error_check`` > 0 makes :func:`propagate` rerun at half the step size
    and fail if any matrix entry differs by more than that threshold.
    """

    dt: float
    t_max: float
    method: str = "rk4"
    error_check: float = 0.0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_max < 0.0:
            raise ValueError("t_max must be nonnegative")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}")


@dataclass(frozen=True)
class EvolvedOperator:
    """Matrix over the ordered basis {vacuum, site 1..N, sink}."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def site_excitation(cls, spec: NetworkSpec, site: int | None = None) -> "EvolvedOperator":
        """Density matrix |site><site| (defaults to the input site)."""
        idx = (spec.input_site if site is None else site) + 1
        mat = np.zeros((spec.dim, spec.dim), dtype=complex)
        mat[idx, idx] = 1.0
        return cls(mat)

    @classmethod
    def vacuum(cls, spec: NetworkSpec) -> "EvolvedOperator":
        mat = np.zeros((spec.dim, spec.dim), dtype=complex)
        mat[0, 0] = 1.0
        return cls(mat)

    @classmethod
    def coherence_unit(cls, spec: NetworkSpec) -> "EvolvedOperator":
        """Matrix unit |input><vacuum| used to track coherence transfer."""
        mat = np.zeros((spec.dim, spec.dim), dtype=complex)
        mat[spec.input_site + 1, 0] = 1.0
        return cls(mat)

    @classmethod
    def from_input_qubit(cls, spec: NetworkSpec, rho: QubitState) -> "EvolvedOperator":
        """Network state encoding a qubit at the input site, rest in vacuum."""
        idx = spec.input_site + 1
        mat = np.zeros((spec.dim, spec.dim), dtype=complex)
        mat[idx, idx] = rho.p
        mat[0, 0] = 1.0 - rho.p
        mat[idx, 0] = rho.gamma
        mat[0, idx] = np.conj(rho.gamma)
        return cls(mat)

    def is_physical(self, tol: float = 1e-9) -> bool:
        mat = self.matrix
        if np.max(np.abs(mat - mat.conj().T)) > tol:
            return False
        if abs(np.trace(mat).real - 1.0) > tol or abs(np.trace(mat).imag) > tol:
            return False
        return bool(np.linalg.eigvalsh(mat).min() > -tol)


class Liouvillian:
    """Linear generator of the reduced dynamics; acts on (..., d, d) arrays."""

    def __init__(self, spec: NetworkSpec):
        n, d = spec.n_sites, spec.dim
        h = np.zeros((d, d), dtype=complex)
        h[1 : n + 1, 1 : n + 1] = np.asarray(spec.v, dtype=float) + np.diag(spec.omega)
        deph = np.array(spec.gamma_deph, dtype=float)
        diss = np.array(spec.gamma_diss, dtype=float)
        trap = np.zeros(n)
        if spec.sink is not None:
            trap[spec.sink.site] = spec.sink.rate
        amp = np.zeros(d)
        amp[1 : n + 1] = deph + diss + trap
        self.spec = spec
        self.h = h
        self.decay = amp[:, None] + amp[None, :]
        self.deph2 = 2.0 * deph
        self.diss2 = 2.0 * diss
        self.trap2 = 2.0 * trap
        self.sites = np.arange(1, n + 1)

    def __call__(self, mat: np.ndarray) -> np.ndarray:
        out = -1j * (self.h @ mat - mat @ self.h)
        out -= self.decay * mat
        pops = mat[..., self.sites, self.sites]
        # Pure dephasing leaves populations untouched; restore the part the
        # uniform decay removed from the diagonal.
        out[..., self.sites, self.sites] += self.deph2 * pops
        out[..., 0, 0] += pops @ self.diss2
        if self.spec.sink is not None:
            att = self.spec.sink.site
            out[..., -1, -1] += self.trap2[att] * pops[..., att]
        return out

    def rk4_step(self, mat: np.ndarray, h: float) -> np.ndarray:
        k1 = self(mat)
        k2 = self(mat + (0.5 * h) * k1)
        k3 = self(mat + (0.5 * h) * k2)
        k4 = self(mat + h * k3)
        return mat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def advance(self, mat: np.ndarray, t_from: float, t_to: float, dt: float) -> np.ndarray:
        span = t_to - t_from
        if span <= 0.0:
            return mat
        n_steps = max(1, math.ceil(span / dt - 1e-12))
        h = span / n_steps
        for _ in range(n_steps):
            mat = self.rk4_step(mat, h)
        return mat


def liouvillian(spec: NetworkSpec) -> Liouvillian:
    """Build the reduced-subspace generator for a network."""
    return Liouvillian(spec)


def _check_step_size(spec: NetworkSpec, cfg: IntegratorConfig):
    limit = spec.max_rate() * cfg.dt
    if limit > 0.05 + 1e-12:
        raise IntegratorError(
            f"dt={cfg.dt} too large: dt * max rate = {limit:.4g} exceeds 0.05"
        )


def propagate(
    spec: NetworkSpec, initial: EvolvedOperator, cfg: IntegratorConfig, t: float
) -> EvolvedOperator:
    """Evolve an operator for time t under the network generator.

    Linear in the initial operator.  Physical initial states are checked to
    stay Hermitian, unit-trace, and positive within 1e-7; violations raise
    :class:`IntegratorError`.
    """
    _check_step_size(spec, cfg)
    if t < 0.0:
        raise ValueError(f"time {t} is negative")
    if t > cfg.t_max + 1e-12:
        raise IntegratorError(f"time {t} exceeds configured t_max {cfg.t_max}")
    if initial.matrix.shape != (spec.dim, spec.dim):
        raise ValueError(
            f"operator shape {initial.matrix.shape} does not match basis size {spec.dim}"
        )
    gen = Liouvillian(spec)
    final = gen.advance(initial.matrix.copy(), 0.0, t, cfg.dt)
    if cfg.error_check > 0.0:
        halved = gen.advance(initial.matrix.copy(), 0.0, t, cfg.dt / 2.0)
        defect = float(np.max(np.abs(final - halved)))
        if defect > cfg.error_check:
            raise IntegratorError(
                f"step-halving defect {defect:.3e} exceeds {cfg.error_check:.3e}"
            )
    out = EvolvedOperator(final)
    if initial.is_physical() and not out.is_physical(tol=1e-7):
        raise IntegratorError("propagation lost physicality beyond 1e-7")
    return out


def step_halving_defect(
    spec: NetworkSpec, initial: EvolvedOperator, cfg: IntegratorConfig, t: float
) -> float:
    """Max entrywise difference between a dt run and a dt/2 run."""
    gen = Liouvillian(spec)
    full = gen.advance(initial.matrix.copy(), 0.0, t, cfg.dt)
    half = gen.advance(initial.matrix.copy(), 0.0, t, cfg.dt / 2.0)
    return float(np.max(np.abs(full - half)))


def _channel_from_matrices(spec: NetworkSpec, pop: np.ndarray, coh: np.ndarray) -> ChannelParams:
    out = spec.output_index()
    eta = float(pop[out, out].real)
    if not -1e-7 <= eta <= 1.0 + 1e-7:
        raise IntegratorError(f"extracted population {eta} outside [0, 1] tolerance")
    eta = min(max(eta, 0.0), 1.0)
    if eta < DEGENERATE_ETA:
        return ChannelParams(eta=eta, s=0.0)
    transfer = complex(coh[out, 0])
    s = abs(transfer) ** 2 / eta
    if s > 1.0 + 1e-7:
        raise IntegratorError(f"extracted coherence retention {s} exceeds 1")
    return ChannelParams(eta=eta, s=min(max(s, 0.0), 1.0))


def extract_channel(spec: NetworkSpec, cfg: IntegratorConfig, t: float) -> ChannelParams:
    """Induced single-qubit channel from the input port to the output at time t.

    The population-transfer probability is the output population when one
    excitation starts at the input site; the coherence factor comes from
    propagating the |input><vacuum| matrix unit through the same generator.
    When the output population is below 1e-9 the channel is degenerate and
    s is reported as 0.
    """
    points = trajectory(spec, cfg, [t])
    return points[0][1]


def trajectory(
    spec: NetworkSpec, cfg: IntegratorConfig, t_grid
) -> list[tuple[float, ChannelParams]]:
    """Channel parameters along an ascending time grid, one propagation pass.

    The population run and the coherence run evolve together as a stacked
    pair; grid points are visited in order without restarting.
    """
    _check_step_size(spec, cfg)
    ts = [float(t) for t in t_grid]
    if any(t < 0.0 for t in ts):
        raise ValueError("time grid contains negative times")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("time grid must be strictly ascending")
    if ts and ts[-1] > cfg.t_max + 1e-12:
        raise IntegratorError(f"grid end {ts[-1]} exceeds configured t_max {cfg.t_max}")
    gen = Liouvillian(spec)
    stacked = np.stack(
        [
            EvolvedOperator.site_excitation(spec).matrix,
            EvolvedOperator.coherence_unit(spec).matrix,
        ]
    ).copy()
    out = []
    t_now = 0.0
    for t in ts:
        stacked = gen.advance(stacked, t_now, t, cfg.dt)
        t_now = t
        out.append((t, _channel_from_matrices(spec, stacked[0], stacked[1])))
    return out


def is_degenerate(params: ChannelParams) -> bool:
    """True when the output population is too small for s to be observable."""
    return params.eta < DEGENERATE_ETA
