"""Accuracy and transmission accounting for run traces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COUNT_MODES = ("per-link", "per-broadcast")


class DegenerateDenominator(ValueError):
    """All initial primals already sit at the optimum."""


def accuracy(theta: np.ndarray, theta_star: np.ndarray, theta_initial: np.ndarray) -> float:
    """Squared distance to the optimum, summed over nodes and normalized
    by its value at initialization."""
    num = float(np.sum((theta - theta_star) ** 2))
    den = float(np.sum((theta_initial - theta_star) ** 2))
    if den == 0.0:
        raise DegenerateDenominator("initial states coincide with the optimum")
    return num / den


def count_transmissions(log, graph, mode: str = "per-link") -> int:
    """Messages caused by one iteration's broadcasts.

    per-link counts each broadcast once per neighbor (sum of sender
    degrees); per-broadcast counts senders.
    """
    if mode == "per-link":
        return int(sum(log.degrees))
    if mode == "per-broadcast":
        return len(log.transmitted)
    raise ValueError(f"mode must be one of {COUNT_MODES}, got {mode!r}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    accuracy: float
    iter_tx: int
    cum_tx: int
    transmitted: tuple[int, ...]


@dataclass
class Trace:
    """Per-iteration record of one run (row 0 is the initial state)."""

    records: list[TraceRecord]
    variant: str
    seed: object = None
    node_count: int = 0
    edge_count: int = 0
    density: float = 0.0
    count_mode: str = "per-link"
    target_accuracy: float = 1e-8
    converged: bool = False
    config: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration

    @property
    def final_accuracy(self) -> float:
        return self.records[-1].accuracy

    def iterations_to_accuracy(self, target: float):
        """First iteration whose accuracy is at or below target; None if never."""
        for rec in self.records:
            if rec.accuracy <= target:
                return rec.iteration
        return None


def transmissions_to_accuracy(trace: Trace, target: float):
    """Cumulative transmissions at the first iteration at or below target;
    None when the trace never reaches it."""
    for rec in trace.records:
        if rec.accuracy <= target:
            return rec.cum_tx
    return None
