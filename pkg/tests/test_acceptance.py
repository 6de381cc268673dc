"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live.
The paired default-setup runs execute with per-iteration invariant
checking enabled, so dual-sum conservation, state consistency, gate
equivalence and ordering correctness are verified on every iteration of
every run used here (a violation raises and fails the fixture).
"""

import numpy as np
import pytest

from oadmm.engine import (
    AlgorithmConfig,
    NetworkState,
    SolverBank,
    StopRule,
    censoring_iteration,
    classical_iteration,
    ordered_iteration,
    run,
)
from oadmm.metrics import transmissions_to_accuracy
from oadmm.problem import (
    build_local_solver,
    generate_regression,
    global_optimum_oracle,
    solve_primal,
)
from oadmm.topology import Graph, generate_random_graph

import oracles

TARGET = 1e-8
SEEDS = range(10)
VARIANTS = ("classical", "censoring", "oadmm", "soadmm")


def report(criterion, ok, detail):
    print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def paired_problem(seed, m_count=50, density=0.10):
    graph = generate_random_graph(m_count, density, (seed, 0))
    dataset = generate_regression(m_count, 3, 3, (seed, 1))
    return graph, dataset


@pytest.fixture(scope="module")
def paired_runs():
    """Default-setup runs, every iteration invariant-checked."""
    traces = {}
    for seed in SEEDS:
        graph, dataset = paired_problem(seed)
        for variant in VARIANTS:
            traces[(variant, seed)] = run(
                AlgorithmConfig(variant), graph, dataset, StopRule(TARGET, 2000),
                seed=seed, check_invariants=True,
            )
    return traces


def test_criterion_1_transmission_savings(paired_runs):
    reached = {v: sum(paired_runs[(v, s)].converged for s in SEEDS) for v in VARIANTS}
    ok_reached = all(n >= 9 for n in reached.values())
    med_tx = {
        v: np.median([transmissions_to_accuracy(paired_runs[(v, s)], TARGET)
                      for s in SEEDS if paired_runs[(v, s)].converged])
        for v in ("classical", "oadmm")
    }
    ratio = med_tx["oadmm"] / med_tx["classical"]
    report(1, ok_reached and ratio <= 0.5,
           f"reached={reached}, median tx oadmm/classical = {ratio:.3f} (bar 0.5)")


def test_criterion_2_soadmm_acceleration(paired_runs):
    med = {v: np.median([paired_runs[(v, s)].iterations for s in SEEDS
                         if paired_runs[(v, s)].converged])
           for v in ("classical", "soadmm")}
    strict = sum(
        paired_runs[("soadmm", s)].iterations < paired_runs[("classical", s)].iterations
        for s in SEEDS
        if paired_runs[("soadmm", s)].converged and paired_runs[("classical", s)].converged
    )
    report(2, med["soadmm"] <= med["classical"] and strict >= 6,
           f"median iters soadmm {med['soadmm']:.0f} vs classical {med['classical']:.0f}, "
           f"strictly fewer on {strict}/10 seeds (need 6)")


def test_criterion_3_density_sweep_savings():
    densities = (0.05, 0.10, 0.15, 0.20)
    savings = {}
    for dens in densities:
        med = {}
        for variant in ("classical", "oadmm"):
            cells = []
            for seed in range(5):
                graph, dataset = paired_problem(seed, m_count=100, density=dens)
                trace = run(AlgorithmConfig(variant), graph, dataset,
                            StopRule(TARGET, 2000), check_invariants=True)
                assert trace.converged, (variant, dens, seed)
                cells.append(transmissions_to_accuracy(trace, TARGET))
            med[variant] = np.median(cells)
        savings[dens] = 1.0 - med["oadmm"] / med["classical"]
    all_better = all(s > 0.0 for s in savings.values())
    big = sum(s >= 0.5 for s in savings.values())
    detail = ", ".join(f"{d}: {s:.3f}" for d, s in savings.items())
    report(3, all_better and big >= 3,
           f"savings by density {{{detail}}}; >=0.5 at {big}/4 densities (need 3)")


def test_criterion_4_invariants_and_trace_identities(paired_runs):
    # dual-sum, state consistency, gate equivalence and ordering were
    # verified on every iteration of every paired run (check_invariants);
    # here: system-level trace identities
    checked_iters = sum(paired_runs[(v, s)].iterations for v in VARIANTS for s in SEEDS)

    def trace_rows(trace):
        return [(r.iteration, r.accuracy, r.iter_tx, r.cum_tx, r.transmitted)
                for r in trace.records]

    identical_gate = True
    deterministic = True
    for seed in SEEDS:
        graph, dataset = paired_problem(seed)
        so = paired_runs[("soadmm", seed)]
        oa_zero = run(AlgorithmConfig("oadmm", c1=0.0), graph, dataset,
                      StopRule(TARGET, 2000), seed=seed)
        identical_gate &= trace_rows(so) == trace_rows(oa_zero)
        again = run(AlgorithmConfig("soadmm"), graph, dataset,
                    StopRule(TARGET, 2000), seed=seed)
        deterministic &= trace_rows(so) == trace_rows(again)
    report(4, identical_gate and deterministic,
           f"per-iteration invariants checked on {checked_iters} iterations; "
           f"soadmm == oadmm(c1=0) bit-identical: {identical_gate}; "
           f"repeat runs bit-identical: {deterministic}")


def test_criterion_5_oracle_equivalence():
    # (a) one full classical and one full ordered iteration on a 3-node line
    graph = Graph(3, ((1, 2), (2, 3)))
    data, truth = generate_regression(3, 3, 3, seed=40)
    solvers = SolverBank.build(data, graph, alpha=0.4)
    datasets = [(d.features, d.labels) for d in data]
    neighbors = [[nb - 1 for nb in graph.adjacency[m + 1]] for m in range(3)]

    state = NetworkState(graph, 3)
    classical_iteration(state, solvers, 1)
    theta_o, lam_o = oracles.classical_iteration_oracle(
        datasets, neighbors, 0.4, np.zeros((3, 3)), np.zeros((3, 3)))
    classical_ok = (np.max(np.abs(state.theta - theta_o)) <= 1e-12
                    and np.max(np.abs(state.dual - lam_o)) <= 1e-12)

    state = NetworkState(graph, 3)
    ordered_iteration(state, solvers, AlgorithmConfig("oadmm", c1=0.5), 1)
    theta = np.zeros((3, 3))
    lam = np.zeros((3, 3))
    own_hat = np.zeros((3, 3))
    copies = {m: {nb: np.zeros(3) for nb in neighbors[m]} for m in range(3)}
    oracles.ordered_iteration_oracle(datasets, neighbors, 0.4, 1.0, 1.0, 0.5, 0.87, 1,
                                     theta, lam, own_hat, copies, force_all=False)
    ordered_ok = (np.max(np.abs(state.theta - theta)) <= 1e-12
                  and np.max(np.abs(state.dual - lam)) <= 1e-12
                  and np.max(np.abs(state.own_state - own_hat)) <= 1e-12)

    # (b) stationarity on 1000 random solver instances
    rng = np.random.default_rng(50)
    stationary = 0
    for _ in range(1000):
        data, _ = generate_regression(1, 3, 3, seed=int(rng.integers(1 << 30)))
        degree = int(rng.integers(1, 10))
        solver = build_local_solver(data[0], alpha=0.4, degree=degree)
        b = rng.normal(size=3) * 10.0 ** rng.integers(-2, 3)
        theta_hat = solve_primal(solver, b)
        grad = (data[0].features.T @ (data[0].features @ theta_hat - data[0].labels)
                + b + 2 * 0.4 * degree * theta_hat)
        stationary += np.linalg.norm(grad) <= 1e-9 * (1 + np.linalg.norm(b))

    # (c) pooled oracle recovers the planted optimum on 100 datasets
    recovered = 0
    for seed in range(100):
        data, truth = generate_regression(50, 3, 3, seed=seed)
        est = global_optimum_oracle(data)
        recovered += bool(np.max(np.abs(est - truth.theta_star)) <= 1e-8)

    report(5, classical_ok and ordered_ok and stationary == 1000 and recovered == 100,
           f"line-graph classical match: {classical_ok}, ordered match: {ordered_ok}, "
           f"stationarity {stationary}/1000, optimum recovery {recovered}/100")


def test_criterion_6_censoring_baseline_sanity():
    graph, dataset = paired_problem(0, m_count=30, density=0.15)
    data, _truth = dataset
    solvers = SolverBank.build(data, graph, alpha=0.4)

    state_c = NetworkState(graph, 3)
    state_a = NetworkState(graph, 3)
    cfg_zero = AlgorithmConfig("censoring", c1=0.0)
    exact = True
    for k in range(1, 61):
        censoring_iteration(state_c, solvers, cfg_zero, k)
        classical_iteration(state_a, solvers, k)
        exact &= (np.array_equal(state_c.theta, state_a.theta)
                  and np.array_equal(state_c.dual, state_a.dual))

    trace_mute = run(AlgorithmConfig("censoring", c1=1e6), graph, dataset,
                     StopRule(TARGET, 50))
    never_sent = all(len(r.transmitted) == 0 for r in trace_mute.records[1:])
    accs = [r.accuracy for r in trace_mute.records]
    constant_after_1 = all(a == accs[1] for a in accs[1:])

    report(6, exact and never_sent and constant_after_1,
           f"c1=0 matches classical exactly over 60 iterations: {exact}; "
           f"c1=1e6 sends nothing: {never_sent}, accuracy constant after k=1: "
           f"{constant_after_1}")
