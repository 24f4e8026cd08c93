"""Cross-module invariant checks behind the ``verify`` CLI command.

Each check recomputes a structural identity two independent ways and
compares at the tolerance the identity deserves: algebraic structure at
1e-12, eigen/entropy identities at 1e-8, optimizer results at 1e-4.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .capacity import (
    OptimizerOptions,
    blahut_arimoto,
    c1_fully_dephased,
    c1_numeric,
    q1_numeric,
)
from .channel import (
    ChannelParams,
    QubitState,
    amplitude_damping,
    apply_channel,
    channel_entropy,
    channel_fidelity,
    choi_state,
    compose,
    environment_state,
    kraus_set,
    phase_flip,
    von_neumann_entropy,
)
from .dynamics import IntegratorConfig, NetworkSpec, trajectory

# Test hook: setting this environment variable perturbs the Kraus weights
# inside the completeness check so the negative path can be exercised.
CORRUPT_KRAUS_ENV = "QNETCAP_VERIFY_CORRUPT_KRAUS"

_MATRIX_UNITS = [np.eye(2, dtype=complex)[i][:, None] @ np.eye(2, dtype=complex)[j][None, :]
                 for i in range(2) for j in range(2)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_states(rng, count):
    states = []
    for _ in range(count):
        p = rng.uniform(0.0, 1.0)
        radius = rng.uniform(0.0, 1.0) * math.sqrt(p * (1.0 - p))
        phase = rng.uniform(0.0, 2.0 * math.pi)
        states.append(QubitState(p=p, gamma=radius * np.exp(1j * phase)))
    return states


def _check_kraus_completeness(rng) -> CheckResult:
    worst = 0.0
    corrupt = bool(os.environ.get(CORRUPT_KRAUS_ENV))
    for _ in range(50):
        params = ChannelParams(eta=rng.uniform(0, 1), s=rng.uniform(0, 1))
        ops = [op.copy() for op in kraus_set(params).operators]
        if corrupt:
            ops[0] = ops[0] * (1.0 + 1e-6)
        total = sum(op.conj().T @ op for op in ops)
        worst = max(worst, float(np.max(np.abs(total - np.eye(2)))))
    return CheckResult("kraus-completeness", worst <= 1e-12,
                       f"max |sum A^dag A - 1| = {worst:.2e}")


def _check_operator_sum(rng) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        params = ChannelParams(eta=rng.uniform(0, 1), s=rng.uniform(0, 1))
        ks = kraus_set(params)
        for rho in _random_states(rng, 5):
            direct = apply_channel(params, rho).matrix()
            summed = ks.apply_matrix(rho.matrix())
            worst = max(worst, float(np.max(np.abs(direct - summed))))
    return CheckResult("operator-sum-matches-map", worst <= 1e-12,
                       f"max deviation = {worst:.2e}")


def _check_composition() -> CheckResult:
    worst = 0.0
    for eta in np.linspace(0, 1, 21):
        for s in np.linspace(0, 1, 21):
            params = ChannelParams(eta=float(eta), s=float(s))
            ks = kraus_set(params)
            dn = compose(amplitude_damping(params.eta), phase_flip(params.s))
            nd = compose(phase_flip(params.s), amplitude_damping(params.eta))
            for unit in _MATRIX_UNITS:
                ref = ks.apply_matrix(unit)
                worst = max(worst, float(np.max(np.abs(dn.apply_matrix(unit) - ref))))
                worst = max(worst, float(np.max(np.abs(nd.apply_matrix(unit) - ref))))
    return CheckResult("composition-law", worst <= 1e-12,
                       f"max map deviation = {worst:.2e}")


def _check_blahut_arimoto() -> CheckResult:
    worst = 0.0
    for eta in np.arange(0.05, 1.0001, 0.05):
        eta = float(eta)
        closed = c1_fully_dephased(eta).value
        oracle = blahut_arimoto([[eta, 1.0 - eta], [0.0, 1.0]], tolerance=1e-12)
        worst = max(worst, abs(closed - oracle))
    return CheckResult("closed-form-vs-blahut-arimoto", worst <= 1e-6,
                       f"max |closed form - oracle| = {worst:.2e}")


def _check_holevo_optimizer() -> CheckResult:
    etas = (0.3, 0.6, 0.9)
    opts = OptimizerOptions(restarts=2)
    worst = 0.0
    for eta in etas:
        numeric = c1_numeric(ChannelParams(eta=eta, s=0.0), opts).value
        worst = max(worst, abs(numeric - c1_fully_dephased(eta).value))
    return CheckResult("holevo-vs-closed-form", worst <= 1e-4,
                       f"max deviation at s=0: {worst:.2e}")


def _check_c1_monotonicity(level: str) -> CheckResult:
    ss = (0.0, 0.25, 0.5, 0.75, 1.0) if level == "full" else (0.0, 0.5, 1.0)
    opts = OptimizerOptions(restarts=2)
    worst_drop = 0.0
    for eta in (0.3, 0.6, 0.9):
        values = [c1_numeric(ChannelParams(eta=eta, s=s), opts).value for s in ss]
        for a, b in zip(values, values[1:]):
            worst_drop = max(worst_drop, a - b)
    return CheckResult("c1-monotone-in-s", worst_drop <= 1e-4,
                       f"worst decrease = {worst_drop:.2e}")


def _check_noiseless_coherence() -> CheckResult:
    spec = NetworkSpec(n_sites=2, omega=(0.0, 0.0), v=((0.0, 1.0), (1.0, 0.0)),
                       gamma_deph=(0.0, 0.0), gamma_diss=(0.0, 0.0))
    cfg = IntegratorConfig(dt=0.002, t_max=10.0)
    points = trajectory(spec, cfg, np.linspace(0.05, 6.0, 120))
    worst = max((abs(p.s - 1.0) for _, p in points if p.eta > 1e-6), default=0.0)
    return CheckResult("noiseless-s-equals-one", worst <= 1e-6,
                       f"max |s - 1| where eta > 1e-6: {worst:.2e}")


def _check_threesite_bound() -> CheckResult:
    spec = NetworkSpec(n_sites=3, omega=(0.0,) * 3,
                       v=((0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)),
                       gamma_deph=(0.0,) * 3, gamma_diss=(0.0,) * 3)
    cfg = IntegratorConfig(dt=0.01, t_max=5.0)
    points = trajectory(spec, cfg, np.arange(0.001, 2.5, 0.004))
    peak = max(p.eta for _, p in points)
    return CheckResult("threesite-transfer-bound", abs(peak - 4.0 / 9.0) <= 1e-4,
                       f"max transfer = {peak:.6f}, expected {4.0 / 9.0:.6f}")


def _check_fidelity_entropy_grid() -> CheckResult:
    worst = 0.0
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / math.sqrt(2.0)
    for eta in np.linspace(0, 1, 21):
        for s in np.linspace(0, 1, 21):
            params = ChannelParams(eta=float(eta), s=float(s))
            choi = choi_state(params)
            overlap = float((bell.conj() @ choi.matrix @ bell).real)
            worst = max(worst, abs(channel_fidelity(params) - overlap))
            worst = max(worst, abs(channel_entropy(params)
                                   - von_neumann_entropy(choi.matrix)))
    return CheckResult("fidelity-entropy-closed-forms", worst <= 1e-8,
                       f"max |closed form - Choi numerics| = {worst:.2e}")


def _check_exchange_invariance(rng) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        params = ChannelParams(eta=rng.uniform(0, 1), s=rng.uniform(0, 1))
        rho = _random_states(rng, 1)[0]
        base = von_neumann_entropy(environment_state(kraus_set(params), rho))
        other = von_neumann_entropy(
            environment_state(
                compose(phase_flip(params.s), amplitude_damping(params.eta)), rho
            )
        )
        worst = max(worst, abs(base - other))
    return CheckResult("exchange-entropy-invariance", worst <= 1e-10,
                       f"max |S(W) difference| = {worst:.2e}")


def _check_q1_regime() -> CheckResult:
    opts = OptimizerOptions(restarts=2)
    for eta in np.linspace(0.0, 0.5, 6):
        for s in (0.0, 0.5, 1.0):
            value = q1_numeric(ChannelParams(eta=float(eta), s=s), opts).value
            if value != 0.0:
                return CheckResult("q1-zero-regime", False,
                                   f"q1({eta:.2f},{s:.2f}) = {value}")
    top = q1_numeric(ChannelParams(eta=1.0, s=1.0), opts).value
    return CheckResult("q1-zero-regime", abs(top - 1.0) <= 1e-6,
                       f"clamped regime exact, q1(1,1) = {top:.9f}")


def run_checks(level: str = "fast") -> list[CheckResult]:
    """Run the invariant suite; ``full`` adds the 21x21 grid consistency checks."""
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    rng = np.random.default_rng(20260810)
    results = [
        _check_kraus_completeness(rng),
        _check_operator_sum(rng),
        _check_composition(),
        _check_blahut_arimoto(),
        _check_holevo_optimizer(),
        _check_c1_monotonicity(level),
        _check_noiseless_coherence(),
        _check_threesite_bound(),
    ]
    if level == "full":
        results.append(_check_fidelity_entropy_grid())
        results.append(_check_exchange_invariance(rng))
        results.append(_check_q1_regime())
    return results
