"""Seeded mini-AutoML: grid enumeration, k-fold CV scoring, leaderboard.

Scoring convention: a single RMSE pooled over all held-out predictions (not
the mean of per-fold RMSEs) — well defined with unequal folds. Folds are
identical for every candidate: rows are first put in a canonical order (sorted
by content) and then shuffled with the grid seed, so the leaderboard is
invariant both to dataset row order and to the order grid points happen to be
evaluated in.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import Dataset
from .errors import AhmoseError, ModelError
from .models import FAMILIES, ModelSpec, fit, predict_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridConfig:
    """Per-family grids plus the CV protocol (k folds, master seed, RMSE metric).

    A family's grid is either a mapping ``param -> list of values`` (expanded
    as a cross product, insertion order) or an explicit list of hyperparameter
    dicts (taken as-is, duplicates allowed).
    """

    grids: Mapping[str, Mapping[str, Sequence] | Sequence[Mapping]]
    k: int = 5
    seed: int = 93

    def __post_init__(self) -> None:
        if self.k < 2:
            raise AhmoseError(f"fold count k must be >= 2, got {self.k}")
        if not self.grids:
            raise AhmoseError("empty grid")
        for family in self.grids:
            if family not in FAMILIES:
                raise AhmoseError(f"unknown family {family!r} in grid")
            if not list(self.expand(family)):
                raise AhmoseError(f"family {family!r} has no grid points")

    def expand(self, family: str) -> list[ModelSpec]:
        grid = self.grids[family]
        if isinstance(grid, Mapping):
            names = list(grid)
            points = [
                dict(zip(names, combo))
                for combo in itertools.product(*(grid[name] for name in names))
            ]
        else:
            points = [dict(p) for p in grid]
        return [ModelSpec(family=family, hyperparameters=p) for p in points]


@dataclass(frozen=True)
class LeaderboardEntry:
    model_id: str
    alias: str
    spec: ModelSpec
    cv_rmse: float
    rank: int


def default_grid(seed: int = 93, k: int = 5) -> GridConfig:
    """Desk-scale default grid (~70 candidates across the four families)."""
    return GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-8, 1e-4, 1e-2, 0.1, 1.0, 10.0]},
            "TREE": {"max_depth": [2, 3, 4, 5], "min_leaf": [1, 3, 5]},
            "DRF": [
                # bagged forests
                *(
                    {"n_trees": n, "max_depth": d, "feature_subsample_fraction": f}
                    for n in (25, 50)
                    for d in (3, 5, 7)
                    for f in (0.5, 1.0)
                ),
                # extremely-randomized variants
                *(
                    {"n_trees": n, "max_depth": d, "random_splits": True, "bootstrap": False}
                    for n in (25, 50)
                    for d in (5, 7)
                ),
            ],
            "GBM": {
                "n_trees": [25, 50, 100],
                "learning_rate": [0.05, 0.1, 0.3],
                "max_depth": [2, 3, 4],
            },
        },
        k=k,
        seed=seed,
    )


def _canonical_label_order(ds: Dataset) -> np.ndarray:
    """Indices of labeled rows sorted by row content, making folds row-order invariant."""
    labeled = np.nonzero(ds.labeled_mask)[0]
    keys = [
        (
            tuple(ds.rows[i].values[name] for name in ds.feature_names),
            ds.rows[i].target,
            ds.rows[i].group_tag or "",
        )
        for i in labeled
    ]
    order = sorted(range(len(labeled)), key=lambda j: keys[j])
    return labeled[order]


def _fold_seeds(seed: int, k: int) -> list[int]:
    state = np.random.SeedSequence(seed).generate_state(k + 1)
    return [int(s) for s in state[1:]]


def kfold_rmse(spec: ModelSpec, ds: Dataset, k: int, seed: int) -> float:
    """Pooled k-fold cross-validated RMSE for one model spec."""
    labeled = _canonical_label_order(ds)
    n = labeled.size
    if k > n:
        raise AhmoseError(f"k={k} exceeds the {n} labeled rows")
    rng = np.random.default_rng(seed)
    shuffled = labeled[rng.permutation(n)]
    folds = np.array_split(shuffled, k)
    fold_seeds = _fold_seeds(seed, k)
    sq_errors: list[np.ndarray] = []
    for fold_idx, fold in enumerate(folds):
        holdout = set(int(i) for i in fold)
        train_rows = [int(i) for i in shuffled if int(i) not in holdout]
        train_ds = ds.subset(train_rows)
        model = fit(spec, train_ds, fold_seeds[fold_idx])
        X_hold = ds.feature_matrix[fold]
        y_hold = ds.targets[fold]
        pred = predict_matrix(model, X_hold)
        sq_errors.append((pred - y_hold) ** 2)
    pooled = np.concatenate(sq_errors)
    return float(np.sqrt(pooled.mean()))


def run_automl(ds: Dataset, grid: GridConfig) -> list[LeaderboardEntry]:
    """Score every grid point by CV RMSE and return the sorted leaderboard.

    Failed fits are excluded from the board and reported via logging, never
    silently ranked. Ties in cv_rmse break by (family, grid index) so the
    ordering is total and reproducible.
    """
    if ds.n_labeled < grid.k:
        raise AhmoseError(f"dataset has {ds.n_labeled} labeled rows; need >= k={grid.k}")
    scored: list[tuple[float, str, int, ModelSpec, str]] = []
    for family in sorted(grid.grids):
        for grid_index, spec in enumerate(grid.expand(family)):
            model_id = f"{family}_grid_{grid_index}"
            try:
                score = kfold_rmse(spec, ds, grid.k, grid.seed)
            except AhmoseError as exc:
                log.warning("excluding failed grid point %s: %s", model_id, exc)
                continue
            scored.append((score, family, grid_index, spec, model_id))
    scored.sort(key=lambda item: (item[0], item[1], item[2]))
    return [
        LeaderboardEntry(
            model_id=model_id,
            alias=f"M{rank - 1}",
            spec=spec,
            cv_rmse=score,
            rank=rank,
        )
        for rank, (score, _family, _gi, spec, model_id) in enumerate(scored, start=1)
    ]


def select_top_per_family(
    board: Sequence[LeaderboardEntry], n_per_family: int
) -> list[LeaderboardEntry]:
    """Keep the best ``n_per_family`` entries of each family, re-aliased M0..Mk in rank order."""
    taken: dict[str, int] = {}
    selected: list[LeaderboardEntry] = []
    for entry in board:
        family = entry.spec.family
        if taken.get(family, 0) < n_per_family:
            taken[family] = taken.get(family, 0) + 1
            selected.append(entry)
    return [
        LeaderboardEntry(
            model_id=e.model_id,
            alias=f"M{i}",
            spec=e.spec,
            cv_rmse=e.cv_rmse,
            rank=e.rank,
        )
        for i, e in enumerate(selected)
    ]


def leaderboard_to_doc(board: Sequence[LeaderboardEntry]) -> list[dict]:
    return [
        {
            "model_id": e.model_id,
            "alias": e.alias,
            "family": e.spec.family,
            "hyperparameters": dict(e.spec.hyperparameters),
            "cv_rmse": e.cv_rmse,
            "rank": e.rank,
        }
        for e in board
    ]


def leaderboard_from_doc(doc: Sequence[Mapping]) -> list[LeaderboardEntry]:
    return [
        LeaderboardEntry(
            model_id=d["model_id"],
            alias=d["alias"],
            spec=ModelSpec(family=d["family"], hyperparameters=dict(d["hyperparameters"])),
            cv_rmse=float(d["cv_rmse"]),
            rank=int(d["rank"]),
        )
        for d in doc
    ]


def format_leaderboard(board: Sequence[LeaderboardEntry]) -> str:
    """Human-readable table (alias, model id, cv RMSE, rank)."""
    lines = [f"{'alias':<6} {'model_id':<24} {'cv_rmse':>10} {'rank':>5}"]
    for e in board:
        lines.append(f"{e.alias:<6} {e.model_id:<24} {e.cv_rmse:>10.4f} {e.rank:>5}")
    return "\n".join(lines)
