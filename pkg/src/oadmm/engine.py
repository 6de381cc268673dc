"""Iteration engine for the four consensus-ADMM variants.

A run is a strictly sequential state machine over shared arrays: primals
theta, duals, broadcast state variables (own_state) and each node's
stored copies of its neighbors' state variables (neighbor_copy, CSR
slot-aligned). Classical iterations are synchronous Jacobi sweeps where
everyone broadcasts; the censoring variant gates each broadcast on how
much the fresh solve moved; the ordered variants additionally serialize
broadcasts within an iteration (most informative first) so later senders
can fold already-heard values into a mid-iteration re-solve.

Time is simulated: timers tau/(c0 + ||change||) are computed numerically
and only their order matters, so the transmit gate is evaluated in the
equivalent norm form ||change|| >= c1 * rho^k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .backend import get_kernels
from .metrics import Trace, TraceRecord, accuracy, count_transmissions
from .problem import GroundTruth, LocalSolver, NodeData, build_local_solver, solve_primal
from .topology import Graph, density, is_connected

VARIANTS = ("classical", "censoring", "oadmm", "soadmm")


class DegenerateTimer(ValueError):
    """Timer denominator c0 + ||change|| is zero."""


class InvariantViolation(RuntimeError):
    """A per-iteration run invariant failed (checked when enabled)."""


@dataclass(frozen=True)
class AlgorithmConfig:
    """Variant selection and the shared constants of one run."""

    variant: str
    alpha: float = 0.4
    tau: float = 1.0
    c0: float = 1.0
    c1: float = 5.0
    rho: float = 0.87

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.c0 < 0:
            raise ValueError(f"c0 must be >= 0, got {self.c0}")
        if self.variant == "soadmm" and self.c0 <= 0:
            raise ValueError("soadmm needs c0 > 0 (its cutoff is tau/c0)")
        if self.variant in ("oadmm", "censoring"):
            # c1 = 0 is the degenerate always-transmit gate, still valid
            if self.c1 < 0:
                raise ValueError(f"c1 must be >= 0, got {self.c1}")
            if not (0.0 < self.rho < 1.0):
                raise ValueError(f"rho must be in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class StopRule:
    target_accuracy: float = 1e-8
    max_iterations: int = 2000


@dataclass(frozen=True)
class NodeState:
    """Snapshot of one node: primal, dual, own broadcast state, and the
    copies it stores for each neighbor."""

    theta: np.ndarray
    dual: np.ndarray
    own_state: np.ndarray
    neighbor_state: dict[int, np.ndarray]


class NetworkState:
    """Mutable whole-network state, zero-initialized.

    theta, dual, own_state are (M, q); neighbor_copy is slot-aligned with
    graph.indices, row j being the slot owner's stored value of node
    indices[j] + 1.
    """

    def __init__(self, graph: Graph, dimension: int):
        m_count = graph.node_count
        self.graph = graph
        self.dimension = dimension
        self.theta = np.zeros((m_count, dimension))
        self.dual = np.zeros((m_count, dimension))
        self.own_state = np.zeros((m_count, dimension))
        self.neighbor_copy = np.zeros((graph.indices.shape[0], dimension))

    def node(self, m: int) -> NodeState:
        i = m - 1
        g = self.graph
        copies = {
            int(g.indices[j]) + 1: self.neighbor_copy[j].copy()
            for j in range(g.indptr[i], g.indptr[i + 1])
        }
        return NodeState(
            theta=self.theta[i].copy(),
            dual=self.dual[i].copy(),
            own_state=self.own_state[i].copy(),
            neighbor_state=copies,
        )


class SolverBank:
    """All per-node solvers of a run plus their kernel-ready dense views."""

    def __init__(self, solvers: Sequence[LocalSolver]):
        if not solvers:
            raise ValueError("empty solver list")
        alphas = {s.alpha for s in solvers}
        if len(alphas) != 1:
            raise ValueError("all nodes must share the same alpha")
        self.solvers = list(solvers)
        self.alpha = solvers[0].alpha
        self.dimension = solvers[0].dimension
        self.inv_mats = np.stack([s.inverse() for s in solvers])
        self.system_mats = np.stack([s.system_matrix for s in solvers])
        self.xty = np.stack([s.xty for s in solvers])

    @classmethod
    def build(cls, dataset: Sequence[NodeData], graph: Graph, alpha: float) -> "SolverBank":
        if len(dataset) != graph.node_count:
            raise ValueError(f"{len(dataset)} data blocks for {graph.node_count} nodes")
        return cls([
            build_local_solver(dataset[m], alpha, graph.degree(m + 1))
            for m in range(graph.node_count)
        ])


@dataclass(frozen=True)
class TransmitLog:
    """Who broadcast this iteration, with their degrees for link counting."""

    iteration: int
    transmitted: tuple[int, ...]
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class ScheduleEntry:
    node: int
    timer: float
    transmits: bool


@dataclass(frozen=True)
class IterationSchedule:
    """Per-iteration transmit order, fixed at iteration start.

    Entries are sorted by timer ascending (equivalently change-norm
    descending), node id ascending on ties.
    """

    iteration: int
    cutoff: float
    entries: tuple[ScheduleEntry, ...]


@dataclass(frozen=True)
class StepDiagnostics:
    """Kernel outputs kept for invariant checking and tests."""

    variant: str
    threshold: float | None
    cutoff: float | None
    diffs: np.ndarray | None
    transmit: np.ndarray
    order: np.ndarray | None
    theta_tilde: np.ndarray | None
    b_init: np.ndarray
    b_final: np.ndarray


# ---------------------------------------------------------------------------
# granular per-node operations (used by tests, schedules and oracles; the
# iteration drivers below run the same math through the batched kernels)

def initial_primal(m: int, state: NetworkState, solvers: SolverBank) -> np.ndarray:
    """Start-of-iteration solve from the state variables (self and stored
    neighbor copies both enter the linear term)."""
    g = state.graph
    i = m - 1
    lo, hi = g.indptr[i], g.indptr[i + 1]
    s = g.degrees[i] * state.own_state[i] + state.neighbor_copy[lo:hi].sum(axis=0)
    b = state.dual[i] - solvers.alpha * s
    return solve_primal(solvers.solvers[i], b)


def compute_timer(theta_tilde: np.ndarray, own_state: np.ndarray, tau: float, c0: float) -> float:
    """Broadcast delay tau / (c0 + ||theta_tilde - own_state||)."""
    denom = c0 + float(np.linalg.norm(theta_tilde - own_state))
    if denom == 0.0:
        raise DegenerateTimer("c0 + ||change|| is zero")
    return tau / denom


def compute_cutoff(k: int, tau: float, c0: float, c1: float, rho: float, variant: str) -> float:
    """Iteration deadline: tau/(c0 + c1 rho^k) for oadmm, tau/c0 for soadmm."""
    if variant == "oadmm":
        return tau / (c0 + c1 * rho ** k)
    if variant == "soadmm":
        return tau / c0
    raise ValueError(f"cutoff is defined for ordered variants only, got {variant!r}")


def censor_threshold(k: int, c1: float, rho: float) -> float:
    return c1 * rho ** k


def schedule_iteration(theta_tildes: np.ndarray, state: NetworkState,
                       config: AlgorithmConfig, k: int) -> IterationSchedule:
    """Order nodes by timer (ascending; node id breaks ties) and flag who
    beats the cutoff. The norm form of the gate decides; the timer form
    must agree and is asserted here."""
    if config.variant not in ("oadmm", "soadmm"):
        raise ValueError(f"schedule applies to ordered variants, got {config.variant!r}")
    m_count = state.graph.node_count
    diffs = np.linalg.norm(theta_tildes - state.own_state, axis=1)
    timers = np.array([
        compute_timer(theta_tildes[i], state.own_state[i], config.tau, config.c0)
        for i in range(m_count)
    ])
    cutoff = compute_cutoff(k, config.tau, config.c0, config.c1, config.rho, config.variant)
    if config.variant == "soadmm":
        transmits = np.ones(m_count, dtype=bool)
    else:
        transmits = diffs >= censor_threshold(k, config.c1, config.rho)
    timer_gate = timers <= cutoff
    if not np.array_equal(timer_gate, transmits):
        raise InvariantViolation(
            f"timer gate disagrees with norm gate at iteration {k}: "
            f"{np.flatnonzero(timer_gate != transmits) + 1}"
        )
    order = np.argsort(-diffs, kind="mergesort")
    entries = tuple(
        ScheduleEntry(node=int(i) + 1, timer=float(timers[i]), transmits=bool(transmits[i]))
        for i in order
    )
    return IterationSchedule(iteration=k, cutoff=cutoff, entries=entries)


def mid_iteration_update(m: int, theta_tilde_m: np.ndarray, state: NetworkState,
                         partition: tuple[Sequence[int], Sequence[int]],
                         solvers: SolverBank) -> np.ndarray:
    """Re-solve just before node m broadcasts: neighbors that already
    broadcast this iteration (first element of partition) contribute their
    fresh primal, the rest their stored state; the node's own initial
    primal replaces its state variable in both sums."""
    g = state.graph
    i = m - 1
    before, after = partition
    if sorted(list(before) + list(after)) != sorted(g.adjacency[m]):
        raise ValueError(f"partition does not cover exactly the neighbors of node {m}")
    s = np.zeros(state.dimension)
    for mp in after:
        s += theta_tilde_m + state.own_state[mp - 1]
    for mpp in before:
        s += theta_tilde_m + state.theta[mpp - 1]
    b = state.dual[i] - solvers.alpha * s
    return solve_primal(solvers.solvers[i], b)


def dual_update(m: int, state: NetworkState, alpha: float) -> np.ndarray:
    """End-of-iteration dual ascent from the finalized state variables."""
    g = state.graph
    i = m - 1
    lo, hi = g.indptr[i], g.indptr[i + 1]
    s = g.degrees[i] * state.own_state[i] - state.neighbor_copy[lo:hi].sum(axis=0)
    return state.dual[i] + alpha * s


# ---------------------------------------------------------------------------
# iteration drivers

def _log_from_transmit(k: int, transmit: np.ndarray, graph: Graph) -> TransmitLog:
    ids = tuple(int(i) + 1 for i in np.flatnonzero(transmit))
    return TransmitLog(iteration=k, transmitted=ids,
                       degrees=tuple(int(graph.degrees[i - 1]) for i in ids))


def _classical_step(state: NetworkState, solvers: SolverBank, k: int, kernels):
    g = state.graph
    m_count, q = state.theta.shape
    b = np.empty((m_count, q))
    kernels.classical_step(state.theta, state.dual, state.own_state, state.neighbor_copy,
                           g.indptr, g.indices, g.rev_slot,
                           solvers.inv_mats, solvers.xty, solvers.alpha, b)
    transmit = np.ones(m_count, dtype=bool)
    diag = StepDiagnostics(variant="classical", threshold=None, cutoff=None, diffs=None,
                           transmit=transmit, order=None, theta_tilde=None,
                           b_init=b, b_final=b)
    return _log_from_transmit(k, transmit, g), diag


def _censoring_step(state: NetworkState, solvers: SolverBank, config: AlgorithmConfig,
                    k: int, kernels):
    g = state.graph
    m_count, q = state.theta.shape
    threshold = censor_threshold(k, config.c1, config.rho)
    diffs = np.empty(m_count)
    transmit = np.empty(m_count, dtype=bool)
    b_init = np.empty((m_count, q))
    kernels.censoring_step(state.theta, state.dual, state.own_state, state.neighbor_copy,
                           g.indptr, g.indices, g.rev_slot,
                           solvers.inv_mats, solvers.xty, solvers.alpha, threshold,
                           diffs, transmit, b_init)
    diag = StepDiagnostics(variant="censoring", threshold=threshold, cutoff=None, diffs=diffs,
                           transmit=transmit, order=None, theta_tilde=state.theta.copy(),
                           b_init=b_init, b_final=b_init)
    return _log_from_transmit(k, transmit, g), diag


def _ordered_step(state: NetworkState, solvers: SolverBank, config: AlgorithmConfig,
                  k: int, kernels):
    g = state.graph
    m_count, q = state.theta.shape
    force_all = config.variant == "soadmm"
    threshold = censor_threshold(k, config.c1, config.rho)
    cutoff = compute_cutoff(k, config.tau, config.c0, config.c1, config.rho, config.variant)
    theta_tilde = np.empty((m_count, q))
    diffs = np.empty(m_count)
    transmit = np.empty(m_count, dtype=bool)
    order = np.empty(m_count, dtype=np.int64)
    b_init = np.empty((m_count, q))
    b_final = np.empty((m_count, q))
    kernels.ordered_step(state.theta, state.dual, state.own_state, state.neighbor_copy,
                         g.indptr, g.indices, g.rev_slot,
                         solvers.inv_mats, solvers.xty, solvers.alpha, threshold, force_all,
                         theta_tilde, diffs, transmit, order, b_init, b_final)
    diag = StepDiagnostics(variant=config.variant,
                           threshold=None if force_all else threshold,
                           cutoff=cutoff, diffs=diffs, transmit=transmit, order=order,
                           theta_tilde=theta_tilde, b_init=b_init, b_final=b_final)
    return _log_from_transmit(k, transmit, g), diag


def classical_iteration(state: NetworkState, solvers: SolverBank, k: int = 1,
                        backend: str | None = None) -> TransmitLog:
    """One synchronous iteration; every node broadcasts, states mirror theta."""
    log, _ = _classical_step(state, solvers, k, get_kernels(backend))
    return log


def censoring_iteration(state: NetworkState, solvers: SolverBank, config: AlgorithmConfig,
                        k: int, backend: str | None = None) -> TransmitLog:
    """One censoring iteration; broadcasts gated by ||change|| >= c1 rho^k."""
    if config.variant != "censoring":
        raise ValueError(f"expected censoring config, got {config.variant!r}")
    log, _ = _censoring_step(state, solvers, config, k, get_kernels(backend))
    return log


def ordered_iteration(state: NetworkState, solvers: SolverBank, config: AlgorithmConfig,
                      k: int, backend: str | None = None) -> TransmitLog:
    """One ordered iteration (oadmm or soadmm) in simulated time."""
    if config.variant not in ("oadmm", "soadmm"):
        raise ValueError(f"expected an ordered variant, got {config.variant!r}")
    log, _ = _ordered_step(state, solvers, config, k, get_kernels(backend))
    return log


# ---------------------------------------------------------------------------
# per-iteration invariant verification

def _verify_iteration(state: NetworkState, solvers: SolverBank, diag: StepDiagnostics,
                      config: AlgorithmConfig, k: int) -> None:
    g = state.graph

    if not np.array_equal(state.neighbor_copy, state.own_state[g.indices]):
        raise InvariantViolation(f"neighbor copies diverge from sources at iteration {k}")

    dual_sum = np.linalg.norm(state.dual.sum(axis=0))
    dual_cap = 1e-9 * (1.0 + float(np.max(np.linalg.norm(state.dual, axis=1), initial=0.0)))
    if dual_sum > dual_cap:
        raise InvariantViolation(f"dual sum {dual_sum:.3e} above {dual_cap:.3e} at iteration {k}")

    def check_stationarity(theta: np.ndarray, b: np.ndarray, label: str) -> None:
        resid = np.einsum("mrc,mc->mr", solvers.system_mats, theta) - (solvers.xty - b)
        caps = 1e-9 * (1.0 + np.linalg.norm(b, axis=1))
        bad = np.linalg.norm(resid, axis=1) > caps
        if bad.any():
            raise InvariantViolation(
                f"{label} stationarity failed at iteration {k}, nodes {np.flatnonzero(bad) + 1}"
            )

    check_stationarity(state.theta, diag.b_final, "final primal")
    if diag.theta_tilde is not None:
        check_stationarity(diag.theta_tilde, diag.b_init, "initial primal")

    if diag.variant in ("classical", "soadmm"):
        if not diag.transmit.all():
            raise InvariantViolation(f"{diag.variant} must transmit everywhere at iteration {k}")
    if diag.variant == "classical":
        if not np.array_equal(state.own_state, state.theta):
            raise InvariantViolation(f"classical states must mirror theta at iteration {k}")
        return

    if diag.threshold is not None:
        if not np.array_equal(diag.transmit, diag.diffs >= diag.threshold):
            raise InvariantViolation(f"norm gate mismatch at iteration {k}")
    if diag.variant in ("oadmm", "soadmm"):
        timers = config.tau / (config.c0 + diag.diffs)
        if not np.array_equal(timers <= diag.cutoff, diag.transmit):
            raise InvariantViolation(f"timer gate disagrees with transmit set at iteration {k}")
        ranked = diag.diffs[diag.order]
        if np.any(ranked[:-1] < ranked[1:]):
            raise InvariantViolation(f"broadcast order not change-sorted at iteration {k}")
        ties = ranked[:-1] == ranked[1:]
        if np.any(ties & (diag.order[:-1] > diag.order[1:])):
            raise InvariantViolation(f"tie-break order violated at iteration {k}")
        flags = diag.transmit[diag.order]
        if np.any(~flags[:-1] & flags[1:]):
            raise InvariantViolation(f"transmit set is not a schedule prefix at iteration {k}")


# ---------------------------------------------------------------------------
# run driver

def run(config: AlgorithmConfig, graph: Graph,
        dataset: tuple[Sequence[NodeData], GroundTruth],
        stop: StopRule | None = None, *, seed=None, backend: str | None = None,
        count_mode: str = "per-link", check_invariants: bool = True) -> Trace:
    """Iterate one variant until the accuracy target or the iteration cap.

    dataset is (node data list, ground truth) as produced by
    generate_regression. Hitting the cap without reaching the target is
    reported via Trace.converged, not an exception. Deterministic given
    the inputs.
    """
    if stop is None:
        stop = StopRule()
    node_data, truth = dataset
    if not is_connected(graph):
        raise ValueError("consensus needs a connected graph")
    kernels = get_kernels(backend)
    solvers = SolverBank.build(node_data, graph, config.alpha)
    state = NetworkState(graph, solvers.dimension)
    theta0 = state.theta.copy()
    theta_star = truth.theta_star

    records = [TraceRecord(iteration=0, accuracy=1.0, iter_tx=0, cum_tx=0, transmitted=())]
    cum_tx = 0
    converged = False
    for k in range(1, stop.max_iterations + 1):
        if config.variant == "classical":
            log, diag = _classical_step(state, solvers, k, kernels)
        elif config.variant == "censoring":
            log, diag = _censoring_step(state, solvers, config, k, kernels)
        else:
            log, diag = _ordered_step(state, solvers, config, k, kernels)
        if check_invariants:
            _verify_iteration(state, solvers, diag, config, k)
        acc = accuracy(state.theta, theta_star, theta0)
        tx = count_transmissions(log, graph, count_mode)
        cum_tx += tx
        records.append(TraceRecord(iteration=k, accuracy=acc, iter_tx=tx,
                                   cum_tx=cum_tx, transmitted=log.transmitted))
        if acc <= stop.target_accuracy:
            converged = True
            break

    return Trace(
        records=records,
        variant=config.variant,
        seed=seed,
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        density=density(graph),
        count_mode=count_mode,
        target_accuracy=stop.target_accuracy,
        converged=converged,
        config={
            "variant": config.variant, "alpha": config.alpha, "tau": config.tau,
            "c0": config.c0, "c1": config.c1, "rho": config.rho,
            "max_iterations": stop.max_iterations, "backend": kernels.BACKEND_NAME,
        },
    )
