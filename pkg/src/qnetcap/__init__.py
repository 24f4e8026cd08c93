"""Qubit-network dynamics and the information capacities they induce.

The package simulates excitation-preserving qubit networks with dephasing
and dissipation, extracts the induced single-qubit channel toward a chosen
output at each time, and evaluates classical/quantum transmission figures
of merit for that channel family.
"""

from .channel import (
    ChannelParams,
    ChoiState,
    KrausSet,
    QubitState,
    amplitude_damping,
    apply_channel,
    channel_entropy,
    channel_fidelity,
    channel_matrix_action,
    choi_spectrum,
    choi_state,
    compose,
    environment_state,
    exchange_entropy,
    kraus_set,
    phase_flip,
    von_neumann_entropy,
)
from .capacity import (
    CapacityResult,
    Ensemble,
    OptimizerOptions,
    SurfaceResult,
    binary_entropy,
    blahut_arimoto,
    c1_fully_dephased,
    c1_numeric,
    capacity_surface,
    coherent_information,
    holevo_information,
    optimal_input_weight,
    q1_numeric,
)
from .dynamics import (
    DEGENERATE_ETA,
    EvolvedOperator,
    IntegratorConfig,
    IntegratorError,
    NetworkSpec,
    SINK,
    SinkSpec,
    extract_channel,
    is_degenerate,
    liouvillian,
    propagate,
    step_halving_defect,
    trajectory,
)
from .modelio import (
    BUILTIN_MODELS,
    ConfigError,
    ResultTable,
    SweepSettings,
    WAVENUMBER_TO_RAD_PER_PS,
    builtin_model,
    parse_config,
    serialize_config,
    write_table,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
