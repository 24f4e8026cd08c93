"""Single-qubit channel family combining population damping and dephasing.

The channel acts on a qubit state parametrized by its excited-state
population p and coherence amplitude gamma (excited state first in the
basis ordering) as

    (p, gamma) -> (eta * p, sqrt(eta * s) * gamma)

with eta the population-transfer probability and s the coherence-retention
parameter.  The same map factors as an amplitude-damping channel composed
with a phase-flip channel, in either order.  This module provides the map
itself, Kraus and Choi representations, and the entropy/fidelity figures
of merit built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerance hierarchy: exact algebraic structure, eigen/entropy results,
# and state-validity slack.
COMPLETENESS_TOL = 1e-12
EIGEN_TOL = 1e-8
STATE_TOL = 1e-9


@dataclass(frozen=True)
class QubitState:
    """Qubit density matrix [[p, gamma], [conj(gamma), 1 - p]]."""

    p: float
    gamma: complex = 0.0

    def __post_init__(self):
        if not 0.0 - STATE_TOL <= self.p <= 1.0 + STATE_TOL:
            raise ValueError(f"population p={self.p} outside [0, 1]")
        if abs(self.gamma) ** 2 > self.p * (1.0 - self.p) + STATE_TOL:
            raise ValueError(
                f"coherence |gamma|^2={abs(self.gamma) ** 2:.3e} exceeds "
                f"p(1-p)={self.p * (1.0 - self.p):.3e}"
            )

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.p, self.gamma], [np.conj(self.gamma), 1.0 - self.p]],
            dtype=complex,
        )

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "QubitState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
        if abs(np.trace(rho) - 1.0) > STATE_TOL:
            raise ValueError(f"trace {np.trace(rho):.12g} != 1")
        if abs(rho[0, 1] - np.conj(rho[1, 0])) > STATE_TOL:
            raise ValueError("matrix is not Hermitian")
        return cls(p=float(rho[0, 0].real), gamma=complex(rho[0, 1]))


@dataclass(frozen=True)
class ChannelParams:
    """Channel family member: eta damps population, s retains coherence."""

    eta: float
    s: float

    def __post_init__(self):
        if not 0.0 - STATE_TOL <= self.eta <= 1.0 + STATE_TOL:
            raise ValueError(f"eta={self.eta} outside [0, 1]")
        if not 0.0 - STATE_TOL <= self.s <= 1.0 + STATE_TOL:
            raise ValueError(f"s={self.s} outside [0, 1]")


class KrausSet:
    """Ordered list of 2x2 operators realizing a channel in operator-sum form.

    Construction checks completeness sum_k A_k^dag A_k = 1 to 1e-12.
    """

    def __init__(self, operators):
        ops = tuple(np.array(op, dtype=complex) for op in operators)
        if not ops:
            raise ValueError("empty Kraus set")
        for op in ops:
            if op.shape != (2, 2):
                raise ValueError(f"Kraus operator has shape {op.shape}, expected 2x2")
            op.setflags(write=False)
        total = sum(op.conj().T @ op for op in ops)
        if np.max(np.abs(total - np.eye(2))) > COMPLETENESS_TOL:
            raise ValueError("Kraus set is not complete: sum A^dag A != identity")
        self.operators = ops

    def __iter__(self):
        return iter(self.operators)

    def __len__(self):
        return len(self.operators)

    def apply(self, rho: QubitState) -> QubitState:
        return QubitState.from_matrix(self.apply_matrix(rho.matrix()))

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Operator-sum action extended linearly to arbitrary 2x2 matrices."""
        mat = np.asarray(mat, dtype=complex)
        out = np.zeros((2, 2), dtype=complex)
        for op in self.operators:
            out += op @ mat @ op.conj().T
        return out


@dataclass(frozen=True)
class ChoiState:
    """Channel applied to one half of a maximally entangled qubit pair."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (4, 4):
            raise ValueError(f"Choi matrix has shape {mat.shape}, expected 4x4")
        if np.max(np.abs(mat - mat.conj().T)) > STATE_TOL:
            raise ValueError("Choi matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > STATE_TOL:
            raise ValueError(f"Choi trace {np.trace(mat):.12g} != 1")
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -COMPLETENESS_TOL:
            raise ValueError(f"Choi matrix not PSD: min eigenvalue {eigs.min():.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


def apply_channel(params: ChannelParams, rho: QubitState) -> QubitState:
    """Map (p, gamma) to (eta*p, sqrt(eta*s)*gamma)."""
    return QubitState(
        p=params.eta * rho.p,
        gamma=math.sqrt(params.eta * params.s) * rho.gamma,
    )


def channel_matrix_action(params: ChannelParams, mat: np.ndarray) -> np.ndarray:
    """Linear extension of the channel to arbitrary 2x2 matrices."""
    mat = np.asarray(mat, dtype=complex)
    c = math.sqrt(params.eta * params.s)
    return np.array(
        [
            [params.eta * mat[0, 0], c * mat[0, 1]],
            [c * mat[1, 0], (1.0 - params.eta) * mat[0, 0] + mat[1, 1]],
        ],
        dtype=complex,
    )


def amplitude_damping(eta: float) -> KrausSet:
    """Population damping with survival probability eta (two operators)."""
    params = ChannelParams(eta=eta, s=1.0)
    keep = np.array([[math.sqrt(params.eta), 0.0], [0.0, 1.0]], dtype=complex)
    jump = np.array([[0.0, 0.0], [math.sqrt(1.0 - params.eta), 0.0]], dtype=complex)
    return KrausSet([keep, jump])


def phase_flip(s: float) -> KrausSet:
    """Sign flip of the qubit phase with probability (1 - sqrt(s))/2."""
    params = ChannelParams(eta=1.0, s=s)
    q = (1.0 - math.sqrt(params.s)) / 2.0
    identity = math.sqrt(1.0 - q) * np.eye(2, dtype=complex)
    flip = math.sqrt(q) * np.diag([1.0, -1.0]).astype(complex)
    return KrausSet([identity, flip])


def compose(outer: KrausSet, inner: KrausSet) -> KrausSet:
    """Kraus set of the composed map outer(inner(rho))."""
    return KrausSet([a @ b for a in outer.operators for b in inner.operators])


def kraus_set(params: ChannelParams) -> KrausSet:
    """Three-operator realization of the channel.

    Composing the damping and phase-flip factors yields four operators, two
    of which are proportional to the damping jump; merging those gives

        B1 = sqrt((1+sqrt(s))/2) * diag(sqrt(eta), 1)
        B2 = sqrt(1-eta) * |ground><excited|
        B3 = sqrt((1-sqrt(s))/2) * diag(sqrt(eta), -1)
    """
    root_s = math.sqrt(params.s)
    root_eta = math.sqrt(params.eta)
    b1 = math.sqrt((1.0 + root_s) / 2.0) * np.diag([root_eta, 1.0]).astype(complex)
    b2 = np.array([[0.0, 0.0], [math.sqrt(1.0 - params.eta), 0.0]], dtype=complex)
    b3 = math.sqrt((1.0 - root_s) / 2.0) * np.diag([root_eta, -1.0]).astype(complex)
    return KrausSet([b1, b2, b3])


def choi_state(params: ChannelParams) -> ChoiState:
    """Send half of (|ee> + |gg>)/sqrt(2) through the channel (first factor)."""
    units = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[i, j] = 1.0
            units[i, j] = channel_matrix_action(params, unit)
    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            ref = np.zeros((2, 2), dtype=complex)
            ref[i, j] = 1.0
            choi += 0.5 * np.kron(units[i, j], ref)
    return ChoiState(matrix=choi)


def choi_spectrum(params: ChannelParams) -> tuple[float, float, float, float]:
    """Closed-form Choi eigenvalues: ((1-eta)/2, lam+, lam-, 0).

    The structural zero corresponds to the |excited, ground> coherence
    sector, which the channel never populates.
    """
    eta, s = params.eta, params.s
    root = math.sqrt(4.0 * eta * s + (1.0 - eta) ** 2)
    lam_plus = (1.0 + eta + root) / 4.0
    lam_minus = (1.0 + eta - root) / 4.0
    return ((1.0 - eta) / 2.0, lam_plus, lam_minus, 0.0)


def channel_fidelity(params: ChannelParams) -> float:
    """Overlap of the Choi state with the maximally entangled state."""
    return (1.0 + params.eta + 2.0 * math.sqrt(params.eta * params.s)) / 4.0


def channel_entropy(params: ChannelParams) -> float:
    """Entropy in bits of the Choi state, from the closed-form spectrum."""
    return -sum(lam * math.log2(lam) for lam in choi_spectrum(params) if lam > 0.0)


def von_neumann_entropy(matrix: np.ndarray) -> float:
    """Entropy -tr[rho log2 rho] in bits, with 0*log(0) = 0."""
    mat = np.asarray(matrix, dtype=complex)
    if np.max(np.abs(mat - mat.conj().T)) > STATE_TOL:
        raise ValueError("matrix is not Hermitian")
    eigs = np.linalg.eigvalsh(mat)
    if eigs.min() < -STATE_TOL:
        raise ValueError(f"negative eigenvalue {eigs.min():.3e}")
    eigs = eigs[eigs > 0.0]
    return float(-np.sum(eigs * np.log2(eigs))) + 0.0


def environment_state(ks: KrausSet, rho: QubitState) -> np.ndarray:
    """Environment density matrix W with W_ij = tr[A_i rho A_j^dag]."""
    mat = rho.matrix()
    n = len(ks)
    w = np.zeros((n, n), dtype=complex)
    sandwiched = [op @ mat for op in ks.operators]
    for i in range(n):
        for j in range(n):
            w[i, j] = np.trace(sandwiched[i] @ ks.operators[j].conj().T)
    return w


def exchange_entropy(params: ChannelParams, rho: QubitState) -> float:
    """Entropy in bits exchanged with the environment by one channel use.

    Independent of the Kraus realization; computed from the three-operator
    set of :func:`kraus_set`.
    """
    return von_neumann_entropy(environment_state(kraus_set(params), rho))
