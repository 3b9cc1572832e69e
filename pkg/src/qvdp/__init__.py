"""Quantum van der Pol oscillator synchronization toolkit.

Simulates the driven, squeezed quantum van der Pol oscillator with an extra
single-photon loss channel on a truncated Fock space, and analyzes phase
synchronization: steady states, the mean-resultant-length measure, regime
classification, a three-level reduced model, and the closed-form criterion
for when a little extra loss boosts synchronization.
"""

from .analysis import (
    RegimeLabel,
    SqueezeDriveComparison,
    SyncMetrics,
    ansatz_steady_state,
    classify_regime,
    mrl,
    squeeze_vs_drive,
    sync_metrics,
)
from .boost import (
    BoostReport,
    boost_verdict,
    deep_quantum_boost_coefficient,
    kappa_derivatives,
    sync_denominator,
    sync_numerator,
)
from .errors import (
    AnsatzError,
    ConfigError,
    InstabilityError,
    InvalidDimensionError,
    InvalidParamsError,
    MultiplicityError,
    QvdpError,
    SolverError,
    StepSizeError,
    SweepError,
    TruncationError,
)
from .fock import (
    DensityDiagnostics,
    annihilation,
    creation,
    fock_projector,
    number_operator,
    validate_density,
)
from .model import (
    Liouvillian,
    ModelParams,
    build_liouvillian,
    dissipator,
    hamiltonian,
    master_rhs,
    unvectorize,
    vectorize,
)
from .solvers import (
    EvolveResult,
    SteadySolution,
    TruncationOptions,
    choose_truncation,
    evolve,
    kappa_slope,
    steady_state,
    steady_state_auto,
)
from .sweep import Axis, SweepSpec, SweepTable, emit_csv, run_sweep

__version__ = "0.1.0"
