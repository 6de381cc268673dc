"""Experiment runner: seeded, paired, reproducible CSV traces.

Subcommands `run`, `sweep-density` and `compare` share one flag set; a
flat key=value config file can preload any flag, and explicit flags win.
For a given seed every algorithm sees the identical graph and dataset,
so cross-algorithm comparisons are paired.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .engine import AlgorithmConfig, StopRule, run
from .metrics import COUNT_MODES, Trace, transmissions_to_accuracy
from .problem import GroundTruth, generate_regression, global_optimum_oracle, load_dataset
from .topology import density as graph_density
from .topology import edge_fraction, generate_random_graph, load_graph

# CLI algorithm names -> engine variant names
ALGORITHMS = {
    "admm": "classical",
    "censoring": "censoring",
    "oadmm": "oadmm",
    "soadmm": "soadmm",
}

NOT_REACHED = -1  # sentinel written for cells that never hit the target

DEFAULTS = {
    "algorithms": "admm,censoring,oadmm,soadmm",
    "nodes": "50",
    "samples-per-node": "3",
    "dim": "3",
    "density": "0.10",
    "alpha": "0.4",
    "tau": "1.0",
    "c0": "1.0",
    "c1": "5.0",
    "rho": "0.87",
    "target": "1e-8",
    "max-iters": "2000",
    "seeds": "0-9",
    "count-mode": "per-link",
    "out": "results",
    "densities": "0.05,0.10,0.15,0.20,0.25,0.30",
}

TRACE_HEADER = "algorithm,seed,k,accuracy,iter_tx,cum_tx"
SUMMARY_HEADER = "algorithm,seed,iters_to_target,tx_to_target"
SWEEP_HEADER = "density,algorithm,seed,tx_to_target"
COMPARE_HEADER = "algorithm,median_iters_to_target,median_tx_to_target,savings_vs_admm"


class CliError(Exception):
    pass


def _parse_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token[1:]:
            lo, hi = token.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(token))
    if not seeds:
        raise CliError(f"no seeds in {text!r}")
    return seeds


def _parse_algorithms(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    for name in names:
        if name not in ALGORITHMS:
            raise CliError(f"unknown algorithm {name!r}; choose from {','.join(ALGORITHMS)}")
    if not names:
        raise CliError("empty algorithm list")
    return names


def _parse_floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


class Params:
    """Typed parameter bundle: defaults < config file < explicit flags."""

    def __init__(self, args: argparse.Namespace, nodes_default: str):
        layered = dict(DEFAULTS)
        layered["nodes"] = nodes_default
        if args.config:
            layered.update(_parse_config_file(args.config))
        for key in DEFAULTS:
            flag_value = getattr(args, key.replace("-", "_"), None)
            if flag_value is not None:
                layered[key] = flag_value

        self.algorithms = _parse_algorithms(layered["algorithms"])
        self.nodes = int(layered["nodes"])
        self.samples_per_node = int(layered["samples-per-node"])
        self.dim = int(layered["dim"])
        self.density = float(layered["density"])
        self.alpha = float(layered["alpha"])
        self.tau = float(layered["tau"])
        self.c0 = float(layered["c0"])
        self.c1 = float(layered["c1"])
        self.rho = float(layered["rho"])
        self.target = float(layered["target"])
        self.max_iters = int(layered["max-iters"])
        self.seeds = _parse_seeds(layered["seeds"])
        self.count_mode = layered["count-mode"]
        if self.count_mode not in COUNT_MODES:
            raise CliError(f"count-mode must be one of {COUNT_MODES}")
        self.out = Path(layered["out"])
        self.densities = _parse_floats(layered["densities"])
        self.graph_file = args.graph_file
        self.data_file = args.data_file

    def algorithm_config(self, name: str) -> AlgorithmConfig:
        return AlgorithmConfig(variant=ALGORITHMS[name], alpha=self.alpha, tau=self.tau,
                               c0=self.c0, c1=self.c1, rho=self.rho)

    def stop_rule(self) -> StopRule:
        return StopRule(target_accuracy=self.target, max_iterations=self.max_iters)


def _load_or_generate(params: Params, seed: int, density: float):
    """Graph and dataset for one cell; both are functions of the seed only
    (plus density for the graph), so algorithms pair up."""
    if params.graph_file:
        graph = load_graph(params.graph_file)
    else:
        graph = generate_random_graph(params.nodes, density, (seed, 0))
    if params.data_file:
        node_data = load_dataset(params.data_file)
        # format carries no optimum; recover it from the noiseless data
        truth = GroundTruth(global_optimum_oracle(node_data))
    else:
        node_data, truth = generate_regression(graph.node_count, params.samples_per_node,
                                               params.dim, (seed, 1))
    if len(node_data) != graph.node_count:
        raise CliError(f"{len(node_data)} data blocks for {graph.node_count} nodes")
    return graph, (node_data, truth)


def _run_cell(params: Params, algorithm: str, graph, dataset, seed: int) -> Trace:
    return run(params.algorithm_config(algorithm), graph, dataset, params.stop_rule(),
               seed=seed, count_mode=params.count_mode)


def _write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _trace_lines(trace: Trace, algorithm: str, seed: int) -> list[str]:
    lines = [TRACE_HEADER]
    for rec in trace.records:
        if rec.iteration == 0:
            continue
        lines.append(f"{algorithm},{seed},{rec.iteration},{rec.accuracy:.17e},"
                     f"{rec.iter_tx},{rec.cum_tx}")
    return lines


def _targets(trace: Trace, target: float) -> tuple[int, int]:
    iters = trace.iterations_to_accuracy(target)
    tx = transmissions_to_accuracy(trace, target)
    return (NOT_REACHED if iters is None else iters,
            NOT_REACHED if tx is None else tx)


def cmd_run(params: Params) -> int:
    summary = [SUMMARY_HEADER]
    for seed in params.seeds:
        graph, dataset = _load_or_generate(params, seed, params.density)
        # the two density readings differ by M/(M-1); sweeps key on the
        # edge-fraction sense, which also drives generation
        print(f"# seed {seed}: M={graph.node_count} |E|={graph.edge_count} "
              f"avg_degree_over_M={graph_density(graph):.6g} "
              f"edge_fraction={edge_fraction(graph):.6g}")
        for algorithm in params.algorithms:
            trace = _run_cell(params, algorithm, graph, dataset, seed)
            _write_lines(params.out / f"trace_{algorithm}_seed{seed}.csv",
                         _trace_lines(trace, algorithm, seed))
            iters, tx = _targets(trace, params.target)
            summary.append(f"{algorithm},{seed},{iters},{tx}")
    _write_lines(params.out / "summary.csv", summary)
    for line in summary:
        print(line)
    return 0


def cmd_sweep_density(params: Params) -> int:
    if params.graph_file:
        raise CliError("sweep-density generates a graph per density; --graph-file is unsupported")
    rows = [SWEEP_HEADER]
    for dens in params.densities:
        cells = [_load_or_generate(params, seed, dens) for seed in params.seeds]
        for algorithm in params.algorithms:
            for seed, (graph, dataset) in zip(params.seeds, cells):
                trace = _run_cell(params, algorithm, graph, dataset, seed)
                _, tx = _targets(trace, params.target)
                rows.append(f"{dens!r},{algorithm},{seed},{tx}")
    _write_lines(params.out / "sweep.csv", rows)
    for line in rows:
        print(line)
    return 0


def _median_reached(values: list[int]) -> float:
    reached = [v for v in values if v != NOT_REACHED]
    if not reached:
        return float(NOT_REACHED)
    return float(np.median(reached))


def cmd_compare(params: Params) -> int:
    if "admm" not in params.algorithms:
        raise CliError("compare needs 'admm' in --algorithms as the savings baseline")
    iters_by_alg = {a: [] for a in params.algorithms}
    tx_by_alg = {a: [] for a in params.algorithms}
    for seed in params.seeds:
        graph, dataset = _load_or_generate(params, seed, params.density)
        for algorithm in params.algorithms:
            trace = _run_cell(params, algorithm, graph, dataset, seed)
            iters, tx = _targets(trace, params.target)
            iters_by_alg[algorithm].append(iters)
            tx_by_alg[algorithm].append(tx)
    baseline_tx = _median_reached(tx_by_alg["admm"])
    rows = [COMPARE_HEADER]
    print(f"{'algorithm':<10} {'iters_to_target':>16} {'tx_to_target':>14} {'savings_vs_admm':>16}")
    for algorithm in params.algorithms:
        med_iters = _median_reached(iters_by_alg[algorithm])
        med_tx = _median_reached(tx_by_alg[algorithm])
        if baseline_tx > 0 and med_tx >= 0:
            savings = 1.0 - med_tx / baseline_tx
        else:
            savings = float("nan")
        rows.append(f"{algorithm},{med_iters:.1f},{med_tx:.1f},{savings:.6f}")
        print(f"{algorithm:<10} {med_iters:>16.1f} {med_tx:>14.1f} {savings:>16.3f}")
    _write_lines(params.out / "compare.csv", rows)
    return 0


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--algorithms", help=f"comma list from {{{','.join(ALGORITHMS)}}}")
    sub.add_argument("--nodes", help="network size M")
    sub.add_argument("--samples-per-node", help="samples per node N_m")
    sub.add_argument("--dim", help="model dimension q")
    sub.add_argument("--density", help="fraction of possible edges to sample")
    sub.add_argument("--alpha", help="step size")
    sub.add_argument("--tau", help="timer scale (ratios only; default 1.0)")
    sub.add_argument("--c0", help="timer offset (default 1.0)")
    sub.add_argument("--c1", help="transmit gate scale")
    sub.add_argument("--rho", help="transmit gate decay in (0,1)")
    sub.add_argument("--target", help="accuracy target")
    sub.add_argument("--max-iters", help="iteration cap per run")
    sub.add_argument("--seeds", help="comma list of seeds; ranges like 0-9 allowed")
    sub.add_argument("--count-mode", choices=COUNT_MODES,
                     help="per-link counts sender degree, per-broadcast counts senders")
    sub.add_argument("--graph-file", help="edge-list file replayed instead of sampling")
    sub.add_argument("--data-file", help="dataset file replayed instead of sampling")
    sub.add_argument("--out", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oadmm",
        description="Decentralized consensus-ADMM experiments with censored/ordered transmissions",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_run = subparsers.add_parser("run", help="write per-(algorithm,seed) traces and summary.csv")
    _add_common_flags(p_run)

    p_sweep = subparsers.add_parser("sweep-density",
                                    help="transmissions-to-target across densities (M defaults to 200)")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--densities", help="comma list of edge fractions to sweep")

    p_cmp = subparsers.add_parser("compare",
                                  help="per-algorithm medians and savings vs classical ADMM")
    _add_common_flags(p_cmp)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(Params(args, nodes_default="50"))
        if args.command == "sweep-density":
            return cmd_sweep_density(Params(args, nodes_default="200"))
        if args.command == "compare":
            return cmd_compare(Params(args, nodes_default="50"))
        raise CliError(f"unknown command {args.command!r}")
    except (CliError, OSError, ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
