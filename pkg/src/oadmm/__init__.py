"""Decentralized consensus-ADMM simulator with censored and ordered transmissions."""

from .backend import NUMBA_AVAILABLE, default_backend, get_kernels
from .engine import (
    AlgorithmConfig,
    DegenerateTimer,
    InvariantViolation,
    IterationSchedule,
    NetworkState,
    NodeState,
    ScheduleEntry,
    SolverBank,
    StopRule,
    TransmitLog,
    VARIANTS,
    censor_threshold,
    censoring_iteration,
    classical_iteration,
    compute_cutoff,
    compute_timer,
    dual_update,
    initial_primal,
    mid_iteration_update,
    ordered_iteration,
    run,
    schedule_iteration,
)
from .metrics import (
    DegenerateDenominator,
    Trace,
    TraceRecord,
    accuracy,
    count_transmissions,
    transmissions_to_accuracy,
)
from .problem import (
    DimensionMismatch,
    GroundTruth,
    LocalSolver,
    NodeData,
    RankDeficient,
    SingularSystem,
    build_local_solver,
    generate_regression,
    global_optimum_oracle,
    load_dataset,
    local_loss,
    save_dataset,
    solve_primal,
)
from .topology import (
    ConnectivityExhausted,
    Graph,
    InfeasibleDensity,
    density,
    edge_fraction,
    generate_random_graph,
    is_connected,
    load_graph,
    save_graph,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
