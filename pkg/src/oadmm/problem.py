"""Noiseless linear-regression task and the per-node augmented solvers.

Every algorithm variant minimizes the same local objective each iteration:

    L_m(theta) + <theta, b> + alpha * d_m * ||theta||^2

with L_m the half squared error on node m's samples. Only the linear
term b changes between variants, so each node factorizes its system
matrix (X^T X + 2 alpha d_m I) once per run and reuses it every solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve

# feature/optimum entries come from this 10-point grid
GRID = np.arange(1, 11) / 10.0


class DimensionMismatch(ValueError):
    """Vector or matrix shape does not match the problem dimension."""


class SingularSystem(ValueError):
    """Isolated node with a singular Gram matrix: no ridge term to save it."""


class RankDeficient(ValueError):
    """Pooled feature matrix has rank below q."""


@dataclass(frozen=True)
class NodeData:
    """One node's samples: features (N_m, q), labels (N_m,)."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.features.ndim != 2 or self.labels.ndim != 1:
            raise DimensionMismatch("features must be 2-D, labels 1-D")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DimensionMismatch(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )

    @property
    def sample_count(self) -> int:
        return self.features.shape[0]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """The planted optimum theta_star, entries on the 10-point grid."""

    theta_star: np.ndarray

    @property
    def dimension(self) -> int:
        return self.theta_star.shape[0]


def generate_regression(node_count: int, samples_per_node: int, dimension: int, seed):
    """Draw the planted optimum and per-node data, all i.i.d. on the grid.

    Labels are exact products y_n = x_n . theta_star (computed per sample,
    so they reproduce bit-for-bit from the stored features). Returns
    (list of NodeData, GroundTruth).
    """
    if node_count < 1 or samples_per_node < 1 or dimension < 1:
        raise ValueError("node_count, samples_per_node, dimension must be >= 1")
    rng = np.random.default_rng(seed)
    theta_star = GRID[rng.integers(0, 10, size=dimension)]
    blocks = []
    for _ in range(node_count):
        feats = GRID[rng.integers(0, 10, size=(samples_per_node, dimension))]
        labels = np.array([np.dot(row, theta_star) for row in feats])
        blocks.append(NodeData(feats, labels))
    return blocks, GroundTruth(theta_star)


def local_loss(data: NodeData, theta: np.ndarray) -> float:
    """Half squared error of theta on one node's samples.

    Residuals use the same per-sample dot products as label generation,
    so the loss at the planted optimum is exactly zero.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (data.dimension,):
        raise DimensionMismatch(f"theta shape {theta.shape}, expected ({data.dimension},)")
    total = 0.0
    for x, y in zip(data.features, data.labels):
        resid = y - np.dot(x, theta)
        total += resid * resid
    return 0.5 * float(total)


class LocalSolver:
    """Factorized normal equations for one node's augmented local problem.

    Holds the Cholesky factor of (X^T X + 2 alpha d I), the vector X^T y,
    and the constants; immutable once built. solve() returns the unique
    minimizer of L_m(theta) + <theta, b> + alpha d ||theta||^2.
    """

    def __init__(self, data: NodeData, alpha: float, degree: int):
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        q = data.dimension
        x = data.features
        system = x.T @ x + (2.0 * alpha * degree) * np.eye(q)
        try:
            factor = cho_factor(system, lower=True)
        except np.linalg.LinAlgError as err:
            raise SingularSystem(
                f"system matrix not positive definite (degree={degree}): {err}"
            ) from err
        # dpotrf accepts exactly singular matrices when rounding leaves a
        # denormal-scale pivot; reject those explicitly
        pivots = np.diag(factor[0]) ** 2
        if pivots.min() <= q * np.finfo(float).eps * pivots.max():
            raise SingularSystem(f"system matrix numerically singular (degree={degree})")
        self._factor = factor
        self.system_matrix = system
        self.xty = x.T @ data.labels
        self.alpha = float(alpha)
        self.degree = int(degree)
        self.dimension = q

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.dimension,):
            raise DimensionMismatch(f"b shape {b.shape}, expected ({self.dimension},)")
        return cho_solve(self._factor, self.xty - b)

    def inverse(self) -> np.ndarray:
        """Dense inverse of the system matrix (for the batched kernels)."""
        return cho_solve(self._factor, np.eye(self.dimension))


def build_local_solver(data: NodeData, alpha: float, degree: int) -> LocalSolver:
    return LocalSolver(data, alpha, degree)


def solve_primal(solver: LocalSolver, b: np.ndarray) -> np.ndarray:
    """Minimize L_m(theta) + <theta, b> + alpha d ||theta||^2 for a given b."""
    return solver.solve(b)


def global_optimum_oracle(dataset: list[NodeData]) -> np.ndarray:
    """Pooled least squares over every node's samples, via normal equations.

    Independent of the per-node solvers; on noiseless data this recovers
    the planted optimum. Raises RankDeficient when the stacked features
    have rank below q.
    """
    if not dataset:
        raise ValueError("empty dataset")
    q = dataset[0].dimension
    stacked = np.vstack([d.features for d in dataset])
    if np.linalg.matrix_rank(stacked) < q:
        raise RankDeficient(f"pooled feature rank below {q}; regenerate with a new seed")
    gram = np.zeros((q, q))
    rhs = np.zeros(q)
    for d in dataset:
        gram += d.features.T @ d.features
        rhs += d.features.T @ d.labels
    return np.linalg.solve(gram, rhs)


def save_dataset(dataset: list[NodeData], path) -> None:
    """Write the per-node text format: 'm N_m q' header then 'x_1 .. x_q y' rows.

    Floats are written with repr so a reload reproduces them bit-for-bit.
    """
    lines = []
    for m, d in enumerate(dataset, start=1):
        lines.append(f"{m} {d.sample_count} {d.dimension}")
        for row, y in zip(d.features, d.labels):
            lines.append(" ".join(repr(float(v)) for v in row) + " " + repr(float(y)))
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path) -> list[NodeData]:
    """Read the format written by save_dataset."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    dataset = []
    pos = 0
    expect_m = 1
    while pos < len(lines):
        header = lines[pos].split()
        if len(header) != 3:
            raise ValueError(f"{path}: bad node header {lines[pos]!r}")
        m, n_samples, q = (int(t) for t in header)
        if m != expect_m:
            raise ValueError(f"{path}: expected node {expect_m}, found {m}")
        rows = lines[pos + 1 : pos + 1 + n_samples]
        if len(rows) != n_samples:
            raise ValueError(f"{path}: node {m} truncated")
        feats = np.empty((n_samples, q))
        labels = np.empty(n_samples)
        for i, ln in enumerate(rows):
            vals = [float(t) for t in ln.split()]
            if len(vals) != q + 1:
                raise ValueError(f"{path}: node {m} row {i} has {len(vals)} values, expected {q + 1}")
            feats[i] = vals[:q]
            labels[i] = vals[q]
        dataset.append(NodeData(feats, labels))
        pos += 1 + n_samples
        expect_m += 1
    if not dataset:
        raise ValueError(f"{path}: no nodes found")
    return dataset
