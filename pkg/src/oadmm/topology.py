"""Random peer graphs for decentralized consensus.

Nodes are numbered 1..M. Graphs are sampled with a fixed edge count
(floor of density * M(M-1)/2 pairs chosen uniformly without replacement)
and resampled until connected, so consensus on a single optimum is
well-posed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

RESAMPLE_CAP = 1000


class InfeasibleDensity(ValueError):
    """Edge budget below M-1: no connected graph can exist."""


class ConnectivityExhausted(RuntimeError):
    """No connected sample found within the resample cap."""


@dataclass(frozen=True)
class Graph:
    """Undirected peer topology, immutable after construction.

    edges hold canonical (m, m') pairs with m < m', sorted. adjacency maps
    each node to its sorted neighbor tuple. The flat CSR views (indptr,
    indices, degrees, rev_slot) back the simulation kernels: slot j of
    node m (indptr[m-1] <= j < indptr[m]) refers to neighbor indices[j]
    (0-based), and rev_slot[j] is the mirror slot of the same edge seen
    from the other endpoint.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    adjacency: dict[int, tuple[int, ...]] = field(init=False, repr=False, compare=False)
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)
    degrees: np.ndarray = field(init=False, repr=False, compare=False)
    rev_slot: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m_count = self.node_count
        if m_count < 1:
            raise ValueError(f"node_count must be positive, got {m_count}")
        canon = []
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (1 <= a <= m_count and 1 <= b <= m_count):
                raise ValueError(f"edge ({a},{b}) outside 1..{m_count}")
            pair = (a, b) if a < b else (b, a)
            if pair in seen:
                raise ValueError(f"duplicate edge {pair}")
            seen.add(pair)
            canon.append(pair)
        canon.sort()
        object.__setattr__(self, "edges", tuple(canon))

        neigh: list[list[int]] = [[] for _ in range(m_count)]
        for a, b in canon:
            neigh[a - 1].append(b)
            neigh[b - 1].append(a)
        adjacency = {m + 1: tuple(sorted(ns)) for m, ns in enumerate(neigh)}
        object.__setattr__(self, "adjacency", adjacency)

        degrees = np.array([len(adjacency[m + 1]) for m in range(m_count)], dtype=np.int64)
        indptr = np.zeros(m_count + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        slot_of = {}
        for m in range(m_count):
            for offset, nb in enumerate(adjacency[m + 1]):
                j = int(indptr[m]) + offset
                indices[j] = nb - 1
                slot_of[(m, nb - 1)] = j
        rev_slot = np.empty_like(indices)
        for (m, nb), j in slot_of.items():
            rev_slot[j] = slot_of[(nb, m)]
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "rev_slot", rev_slot)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, m: int) -> tuple[int, ...]:
        return self.adjacency[m]

    def degree(self, m: int) -> int:
        return len(self.adjacency[m])


def _seed_entropy(seed) -> tuple:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def _unrank_pairs(pair_ids: np.ndarray, node_count: int) -> list[tuple[int, int]]:
    """Map lexicographic pair ranks to 1-based (a, b) with a < b."""
    # row a-1 (0-based) starts at rank a_start = sum of (M-1), (M-2), ...
    row_sizes = np.arange(node_count - 1, 0, -1)
    row_ends = np.cumsum(row_sizes)
    rows = np.searchsorted(row_ends, pair_ids, side="right")
    row_starts = row_ends - row_sizes
    edges = []
    for pid, row in zip(pair_ids, rows):
        a = int(row) + 1
        b = a + 1 + int(pid - row_starts[row])
        edges.append((a, b))
    return edges


def generate_random_graph(node_count: int, density: float, seed) -> Graph:
    """Sample a connected graph with floor(density * M(M-1)/2) edges.

    Edges are drawn uniformly without replacement from all unordered
    pairs; disconnected samples are rejected and redrawn from an advancing
    sub-seed, up to RESAMPLE_CAP attempts. Deterministic given seed.
    """
    if node_count < 2:
        raise ValueError(f"need at least 2 nodes, got {node_count}")
    if not (0.0 < density <= 1.0):
        raise ValueError(f"density must be in (0, 1], got {density}")
    total_pairs = node_count * (node_count - 1) // 2
    n_edges = int(density * total_pairs)
    if n_edges < node_count - 1:
        raise InfeasibleDensity(
            f"edge budget {n_edges} below the {node_count - 1} needed to connect {node_count} nodes"
        )
    entropy = _seed_entropy(seed)
    for attempt in range(RESAMPLE_CAP):
        rng = np.random.default_rng(entropy + (attempt,))
        pair_ids = np.sort(rng.choice(total_pairs, size=n_edges, replace=False))
        graph = Graph(node_count, tuple(_unrank_pairs(pair_ids, node_count)))
        if is_connected(graph):
            return graph
    raise ConnectivityExhausted(
        f"no connected graph in {RESAMPLE_CAP} attempts (M={node_count}, density={density})"
    )


def density(graph: Graph) -> float:
    """Average neighbor count divided by network size: 2|E| / M^2."""
    m_count = graph.node_count
    return 2.0 * graph.edge_count / (m_count * m_count)


def edge_fraction(graph: Graph) -> float:
    """Fraction of all possible edges present: 2|E| / (M(M-1))."""
    m_count = graph.node_count
    if m_count < 2:
        return 0.0
    return 2.0 * graph.edge_count / (m_count * (m_count - 1))


def is_connected(graph: Graph) -> bool:
    """True iff a traversal from node 1 reaches every node."""
    m_count = graph.node_count
    if m_count == 1:
        return True
    seen = np.zeros(m_count, dtype=bool)
    seen[0] = True
    stack = [0]
    reached = 1
    indptr, indices = graph.indptr, graph.indices
    while stack:
        m = stack.pop()
        for j in range(indptr[m], indptr[m + 1]):
            nb = indices[j]
            if not seen[nb]:
                seen[nb] = True
                reached += 1
                stack.append(nb)
    return reached == m_count


def save_graph(graph: Graph, path) -> None:
    """Write the edge-list text format: 'M |E|' header, one 'm m'' per line."""
    lines = [f"{graph.node_count} {graph.edge_count}"]
    lines.extend(f"{a} {b}" for a, b in graph.edges)
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path) -> Graph:
    """Read the edge-list format written by save_graph."""
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'M |E|' header")
    m_count, n_edges = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * n_edges:
        raise ValueError(f"{path}: expected {n_edges} edges, found {(len(tokens) - 2) // 2}")
    pairs = tuple(
        (int(tokens[2 + 2 * i]), int(tokens[3 + 2 * i])) for i in range(n_edges)
    )
    return Graph(m_count, pairs)
