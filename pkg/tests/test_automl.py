from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from ahmose.automl import (
    GridConfig,
    LeaderboardEntry,
    default_grid,
    format_leaderboard,
    kfold_rmse,
    run_automl,
    select_top_per_family,
)
from ahmose.errors import AhmoseError
from ahmose.models import ModelSpec

from helpers import make_dataset


def test_kfold_perfect_on_constant_data():
    rng = np.random.default_rng(0)
    ds = make_dataset(rng.uniform(0, 1, size=(20, 3)), np.full(20, 3.0))
    for spec in (ModelSpec("TREE", {"max_depth": 2}), ModelSpec("GLM", {"l2_penalty": 1e-6})):
        assert kfold_rmse(spec, ds, k=5, seed=1) == pytest.approx(0.0, abs=1e-9)


def test_kfold_glm_recovers_linear_data(linear_ds):
    rmse = kfold_rmse(ModelSpec("GLM", {"l2_penalty": 1e-8}), linear_ds, k=5, seed=1)
    assert rmse < 1e-6


def test_kfold_leave_one_out_hand_arithmetic():
    # constant model, targets {1,2,3}: each fold predicts the mean of the other
    # two, so pooled RMSE = sqrt((1.5^2 + 0 + 1.5^2)/3) = sqrt(1.5)
    ds = make_dataset(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 2.0, 3.0]))
    rmse = kfold_rmse(ModelSpec("TREE", {"max_depth": 0}), ds, k=3, seed=7)
    assert rmse == pytest.approx(math.sqrt(1.5), abs=1e-12)
    assert rmse == pytest.approx(1.2247, abs=1e-4)


def test_kfold_k_larger_than_rows_errors():
    ds = make_dataset(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(AhmoseError, match="exceeds"):
        kfold_rmse(ModelSpec("TREE"), ds, k=4, seed=0)


def test_singleton_grid(linear_ds):
    board = run_automl(linear_ds, GridConfig(grids={"GLM": {"l2_penalty": [1e-8]}}, k=5, seed=1))
    assert len(board) == 1
    assert board[0].rank == 1
    assert board[0].alias == "M0"
    assert board[0].model_id == "GLM_grid_0"


def test_same_seed_same_board(suite_ds):
    grid = GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-6, 1.0]},
            "TREE": {"max_depth": [2, 4]},
        },
        k=5,
        seed=11,
    )
    a = run_automl(suite_ds, grid)
    b = run_automl(suite_ds, grid)
    assert a == b


def test_leaderboard_invariant_to_row_permutation(suite_ds):
    grid = GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-6, 1.0]},
            "DRF": {"n_trees": [5], "max_depth": [3]},
            "GBM": {"n_trees": [10], "learning_rate": [0.2], "max_depth": [2]},
        },
        k=5,
        seed=11,
    )
    rng = np.random.default_rng(5)
    permuted = suite_ds.subset(list(rng.permutation(len(suite_ds))))
    a = run_automl(suite_ds, grid)
    b = run_automl(permuted, grid)
    assert [(e.model_id, e.cv_rmse, e.rank) for e in a] == [
        (e.model_id, e.cv_rmse, e.rank) for e in b
    ]


def test_duplicated_grid_point_scores_identically(suite_ds):
    grid = GridConfig(
        grids={"TREE": [{"max_depth": 3}, {"max_depth": 3}]},
        k=5,
        seed=2,
    )
    board = run_automl(suite_ds, grid)
    assert len(board) == 2
    assert board[0].cv_rmse == board[1].cv_rmse
    assert [e.rank for e in board] == [1, 2]


def test_board_sorted_and_non_negative(suite_ds):
    grid = GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-6, 0.1, 10.0]},
            "TREE": {"max_depth": [1, 3, 5]},
        },
        k=5,
        seed=3,
    )
    board = run_automl(suite_ds, grid)
    scores = [e.cv_rmse for e in board]
    assert scores == sorted(scores)
    assert all(s >= 0 for s in scores)
    assert [e.rank for e in board] == list(range(1, len(board) + 1))


def test_failed_grid_points_excluded_with_report(caplog):
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1, size=30)
    ds = make_dataset(np.column_stack([x, x]), 3 * x)  # collinear features
    grid = GridConfig(grids={"GLM": {"l2_penalty": [0.0, 1e-4]}}, k=5, seed=1)
    with caplog.at_level(logging.WARNING, logger="ahmose.automl"):
        board = run_automl(ds, grid)
    assert len(board) == 1
    assert board[0].model_id == "GLM_grid_1"
    assert any("GLM_grid_0" in rec.message for rec in caplog.records)


def _entry(model_id, family, rmse, rank):
    return LeaderboardEntry(
        model_id=model_id,
        alias=f"M{rank - 1}",
        spec=ModelSpec(family),
        cv_rmse=rmse,
        rank=rank,
    )


def test_select_top_per_family_example():
    board = [
        _entry("GBM_grid_0", "GBM", 0.396, 1),
        _entry("GBM_grid_1", "GBM", 0.406, 2),
        _entry("GBM_grid_2", "GBM", 0.409, 3),
        _entry("GLM_grid_0", "GLM", 0.464, 4),
    ]
    selected = select_top_per_family(board, 2)
    assert [e.model_id for e in selected] == ["GBM_grid_0", "GBM_grid_1", "GLM_grid_0"]
    assert [e.alias for e in selected] == ["M0", "M1", "M2"]


def test_select_top_zero_and_large():
    board = [
        _entry("GBM_grid_0", "GBM", 0.4, 1),
        _entry("GLM_grid_0", "GLM", 0.5, 2),
    ]
    assert select_top_per_family(board, 0) == []
    everything = select_top_per_family(board, 10)
    assert [e.model_id for e in everything] == ["GBM_grid_0", "GLM_grid_0"]
    assert [e.alias for e in everything] == ["M0", "M1"]


def test_selection_is_subsequence_of_board(suite_ds):
    grid = GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-6, 0.1, 10.0]},
            "TREE": {"max_depth": [1, 2, 3, 5]},
        },
        k=5,
        seed=4,
    )
    board = run_automl(suite_ds, grid)
    selected = select_top_per_family(board, 2)
    ids = [e.model_id for e in board]
    positions = [ids.index(e.model_id) for e in selected]
    assert positions == sorted(positions)


def test_grid_config_validation():
    with pytest.raises(AhmoseError, match="k must be >= 2"):
        GridConfig(grids={"GLM": {"l2_penalty": [1.0]}}, k=1)
    with pytest.raises(AhmoseError, match="unknown family"):
        GridConfig(grids={"SVM": {"c": [1.0]}})
    with pytest.raises(AhmoseError, match="no grid points"):
        GridConfig(grids={"GLM": []})
    with pytest.raises(AhmoseError, match="empty grid"):
        GridConfig(grids={})


def test_default_grid_is_desk_scale():
    grid = default_grid(seed=1)
    total = sum(len(grid.expand(f)) for f in grid.grids)
    assert 40 <= total <= 120


def test_format_leaderboard_mentions_every_alias(suite_ds):
    board = run_automl(
        suite_ds, GridConfig(grids={"TREE": {"max_depth": [2, 3]}}, k=5, seed=0)
    )
    text = format_leaderboard(board)
    for entry in board:
        assert entry.alias in text
        assert entry.model_id in text
