"""Data generation, local losses, solver factorization and the pooled oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oadmm.problem import (
    GRID,
    DimensionMismatch,
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

from oracles import solve_augmented


def test_generate_default_shapes_and_grid():
    data, truth = generate_regression(50, 3, 3, seed=0)
    assert len(data) == 50
    grid = set(GRID.tolist())
    for block in data:
        assert block.features.shape == (3, 3)
        assert set(block.features.ravel().tolist()) <= grid
    assert set(truth.theta_star.tolist()) <= grid


def test_scalar_example():
    data, truth = generate_regression(1, 1, 1, seed=102)
    assert truth.theta_star[0] == 0.5
    assert data[0].features[0, 0] == 0.2
    assert data[0].labels[0] == 0.1


def test_labels_are_exact_products():
    data, truth = generate_regression(20, 3, 3, seed=4)
    worst = 0.0
    for block in data:
        for x, y in zip(block.features, block.labels):
            worst = max(worst, abs(y - np.dot(x, truth.theta_star)))
    assert worst == 0.0


def test_generation_deterministic():
    a, ta = generate_regression(10, 3, 3, seed=9)
    b, tb = generate_regression(10, 3, 3, seed=9)
    assert np.array_equal(ta.theta_star, tb.theta_star)
    for ba, bb in zip(a, b):
        assert np.array_equal(ba.features, bb.features)
        assert np.array_equal(ba.labels, bb.labels)


def test_local_loss_zero_at_optimum():
    data, truth = generate_regression(5, 3, 3, seed=1)
    for block in data:
        assert local_loss(block, truth.theta_star) == 0.0


def test_local_loss_arithmetic():
    block = NodeData(np.array([[1.0]]), np.array([2.0]))
    assert local_loss(block, np.array([0.0])) == 2.0


def test_local_loss_matches_summation_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n, q = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        block = NodeData(rng.normal(size=(n, q)), rng.normal(size=n))
        theta = rng.normal(size=q)
        direct = 0.5 * sum((block.labels[i] - np.dot(block.features[i], theta)) ** 2
                           for i in range(n))
        assert local_loss(block, theta) == pytest.approx(direct, rel=1e-12)


def test_local_loss_dimension_mismatch():
    block = NodeData(np.eye(2), np.ones(2))
    with pytest.raises(DimensionMismatch):
        local_loss(block, np.ones(3))


def test_solver_identity_features():
    block = NodeData(np.eye(2), np.ones(2))
    solver = build_local_solver(block, alpha=0.4, degree=2)
    assert np.allclose(solver.system_matrix, 2.6 * np.eye(2), rtol=0, atol=1e-15)
    theta = solve_primal(solver, np.zeros(2))
    assert np.allclose(theta, np.full(2, 1 / 2.6), rtol=1e-14)


def test_solver_multiply_back():
    data, _ = generate_regression(1, 3, 3, seed=5)
    solver = build_local_solver(data[0], alpha=0.4, degree=5)
    product = solver.inverse() @ solver.system_matrix
    assert np.allclose(product, np.eye(3), atol=1e-10)


def test_ridge_dominates_zero_data():
    block = NodeData(np.zeros((1, 1)), np.zeros(1))
    solver = build_local_solver(block, alpha=0.3, degree=1)
    assert solver.system_matrix == pytest.approx(np.array([[0.6]]))


def test_singular_isolated_node_raises():
    block = NodeData(np.array([[1.0, 1.0], [1.0, 1.0]]), np.ones(2))
    with pytest.raises(SingularSystem):
        build_local_solver(block, alpha=0.4, degree=0)


def test_isolated_node_recovers_optimum():
    # invertible 3x3 features, no neighbors: plain least squares is exact
    for seed in range(20):
        data, truth = generate_regression(1, 3, 3, seed=seed)
        if np.linalg.matrix_rank(data[0].features) < 3:
            continue
        solver = build_local_solver(data[0], alpha=0.4, degree=0)
        theta = solve_primal(solver, np.zeros(3))
        assert np.allclose(theta, truth.theta_star, atol=1e-10)
        return
    pytest.fail("no invertible sample found")


def test_solve_primal_beats_perturbations():
    data, _ = generate_regression(1, 3, 3, seed=12)
    block = data[0]
    solver = build_local_solver(block, alpha=0.4, degree=3)
    rng = np.random.default_rng(0)
    b = rng.normal(size=3)
    theta = solve_primal(solver, b)

    def objective(points):
        resid = points @ block.features.T - block.labels
        return (0.5 * np.sum(resid ** 2, axis=-1) + points @ b
                + 0.4 * 3 * np.sum(points ** 2, axis=-1))

    deltas = rng.normal(size=(1_000_000, 3))
    deltas *= 1e-3 / np.linalg.norm(deltas, axis=1, keepdims=True)
    assert np.all(objective(theta + deltas) > objective(theta[None, :]))


def test_solve_primal_stationarity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        data, _ = generate_regression(1, 3, 3, seed=int(rng.integers(1 << 30)))
        degree = int(rng.integers(1, 8))
        solver = build_local_solver(data[0], alpha=0.4, degree=degree)
        b = rng.normal(size=3) * 10.0 ** rng.integers(-3, 3)
        theta = solve_primal(solver, b)
        grad = (data[0].features.T @ (data[0].features @ theta - data[0].labels)
                + b + 2 * 0.4 * degree * theta)
        assert np.linalg.norm(grad) <= 1e-9 * (1 + np.linalg.norm(b))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_solve_primal_linear_in_b(seed):
    rng = np.random.default_rng(seed)
    data, _ = generate_regression(1, 3, 3, seed=seed)
    solver = build_local_solver(data[0], alpha=0.4, degree=int(rng.integers(1, 6)))
    b1, b2 = rng.normal(size=3), rng.normal(size=3)
    lhs = solve_primal(solver, b1) + solve_primal(solver, b2) - solve_primal(solver, np.zeros(3))
    rhs = solve_primal(solver, b1 + b2)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_solve_primal_matches_direct_oracle():
    rng = np.random.default_rng(8)
    for seed in range(20):
        data, _ = generate_regression(1, 3, 3, seed=seed)
        degree = int(rng.integers(0, 6))
        if degree == 0 and np.linalg.matrix_rank(data[0].features) < 3:
            continue
        solver = build_local_solver(data[0], alpha=0.4, degree=degree)
        b = rng.normal(size=3)
        expected = solve_augmented(data[0].features, data[0].labels, 0.4, degree, b)
        assert np.allclose(solve_primal(solver, b), expected, atol=1e-12)


def test_solve_primal_dimension_mismatch():
    data, _ = generate_regression(1, 3, 3, seed=0)
    solver = build_local_solver(data[0], alpha=0.4, degree=1)
    with pytest.raises(DimensionMismatch):
        solve_primal(solver, np.zeros(2))


def test_global_optimum_recovers_theta_star():
    data, truth = generate_regression(50, 3, 3, seed=21)
    assert np.allclose(global_optimum_oracle(data), truth.theta_star, atol=1e-8)


def test_global_optimum_single_square_node():
    for seed in range(20):
        data, _ = generate_regression(1, 3, 3, seed=seed)
        if np.linalg.matrix_rank(data[0].features) < 3:
            continue
        solver = build_local_solver(data[0], alpha=0.4, degree=0)
        assert np.allclose(global_optimum_oracle(data),
                           solve_primal(solver, np.zeros(3)), atol=1e-9)
        return
    pytest.fail("no invertible sample found")


def test_global_optimum_duplication_invariant():
    data, _ = generate_regression(10, 3, 3, seed=2)
    doubled = [NodeData(np.vstack([d.features, d.features]),
                        np.concatenate([d.labels, d.labels])) for d in data]
    assert np.allclose(global_optimum_oracle(data), global_optimum_oracle(doubled), atol=1e-12)


def test_global_optimum_rank_deficient():
    row = GRID[np.array([0, 4, 9])]
    data = [NodeData(np.tile(row, (3, 1)), np.full(3, row @ np.ones(3)))
            for _ in range(4)]
    with pytest.raises(RankDeficient):
        global_optimum_oracle(data)


def test_dataset_round_trip_bit_exact(tmp_path):
    data, _ = generate_regression(7, 3, 3, seed=17)
    path = tmp_path / "data.txt"
    save_dataset(data, path)
    loaded = load_dataset(path)
    assert len(loaded) == 7
    for orig, back in zip(data, loaded):
        assert np.array_equal(orig.features, back.features)
        assert np.array_equal(orig.labels, back.labels)


def test_load_dataset_rejects_bad_rows(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 1 3\n0.1 0.2\n")
    with pytest.raises(ValueError):
        load_dataset(path)
