"""Shared test helpers, including the independent Shapley permutation oracle.

The oracle deliberately avoids the library's coalition-enumeration path: it
walks all M! feature orders with a plain per-row Python value function, so an
agreement between the two is a genuine dual-route check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ahmose.dataset import Dataset, Observation
from ahmose.models import TrainedModel, predict_matrix


def make_dataset(
    X: np.ndarray,
    y: np.ndarray | None,
    feature_names: tuple[str, ...] | None = None,
    group_tags: list[str] | None = None,
) -> Dataset:
    n, m = X.shape
    names = feature_names or tuple(f"x{j + 1}" for j in range(m))
    rows = []
    for i in range(n):
        rows.append(
            Observation(
                values={names[j]: float(X[i, j]) for j in range(m)},
                target=None if y is None or np.isnan(y[i]) else float(y[i]),
                group_tag=group_tags[i] if group_tags else None,
            )
        )
    return Dataset(feature_names=names, target_name="y", rows=tuple(rows))


def duplicated_column_ds(n=30, seed=4) -> Dataset:
    """x1 and x2 identical; the symmetry premise needs matching background columns."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0, 4, size=n)
    X = np.column_stack([base, base, rng.uniform(0, 4, n), rng.uniform(0, 4, n)])
    y = X[:, 0] + X[:, 1] + rng.normal(0, 0.1, n)
    return make_dataset(X, y)


def mirrored_tree(split_feature: int, other: int):
    """Depth-2 tree with equal cross leaves: swapping the two features leaves
    the prediction function unchanged."""
    from ahmose.models import Tree

    return Tree(
        feature=np.array([split_feature, other, other, -1, -1, -1, -1], dtype=np.int64),
        threshold=np.array([2.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0]),
        left=np.array([1, 3, 5, -1, -1, -1, -1], dtype=np.int64),
        right=np.array([2, 4, 6, -1, -1, -1, -1], dtype=np.int64),
        value=np.array([0.0, 0.0, 0.0, 1.0, 2.5, 2.5, 4.0]),
    )


def symmetric_model(family: str, names: tuple[str, ...]) -> TrainedModel:
    """A model of the given family whose prediction function is exactly
    invariant under swapping the first two features."""
    from ahmose.models import ModelSpec

    if family == "GLM":
        return TrainedModel(
            spec=ModelSpec("GLM", {"l2_penalty": 0.1}),
            feature_names=names,
            coefficients=np.array([1.0, 1.0, 0.0, -0.5]),
            intercept=0.25,
        )
    if family == "TREE":
        return TrainedModel(
            spec=ModelSpec("TREE", {"max_depth": 2}),
            feature_names=names,
            trees=(mirrored_tree(0, 1),),
        )
    if family == "DRF":
        return TrainedModel(
            spec=ModelSpec("DRF", {"n_trees": 2, "max_depth": 2}),
            feature_names=names,
            trees=(mirrored_tree(0, 1), mirrored_tree(1, 0)),
        )
    return TrainedModel(
        spec=ModelSpec("GBM", {"n_trees": 2, "learning_rate": 1.0, "max_depth": 2}),
        feature_names=names,
        trees=(mirrored_tree(0, 1), mirrored_tree(1, 0)),
        initial=0.5,
    )


def dummy_feature_setup(spec):
    """(model, ds) where the model provably never reads feature x5.

    Tree families: x5 is constant in training, so no split can use it.
    GLM: fitted without x5, then extended with an exactly-zero coefficient
    (a fit on the constant column leaves numerical dust in the coefficient,
    which would make x5 weakly read rather than a true dummy).
    """
    from ahmose.models import fit

    rng = np.random.default_rng(9)
    X = rng.uniform(0, 10, size=(40, 5))
    X[:, 4] = 7.0
    y = 0.7 * X[:, 0] - 0.4 * X[:, 1] + 0.1 * X[:, 2] ** 2 + rng.normal(0, 0.2, 40)
    ds = make_dataset(X, y)
    if spec.family == "GLM":
        reduced = fit(spec, make_dataset(X[:, :4], y), seed=5)
        model = TrainedModel(
            spec=spec,
            feature_names=ds.feature_names,
            coefficients=np.append(np.asarray(reduced.coefficients), 0.0),
            intercept=reduced.intercept,
        )
    else:
        model = fit(spec, ds, seed=5)
    return model, ds


def oracle_interventional_value(
    model: TrainedModel, background_X: np.ndarray, x: np.ndarray, subset: frozenset[int]
) -> float:
    """Mean prediction with subset features pinned to x, rest from each background row."""
    total = 0.0
    for b in range(background_X.shape[0]):
        hybrid = background_X[b].copy()
        for j in subset:
            hybrid[j] = x[j]
        total += float(predict_matrix(model, hybrid.reshape(1, -1))[0])
    return total / background_X.shape[0]


def oracle_permutation_shapley(
    model: TrainedModel, background_X: np.ndarray, x: np.ndarray
) -> np.ndarray:
    """Shapley values as the average marginal contribution over all M! orders."""
    m = x.size
    cache: dict[frozenset[int], float] = {}

    def value(subset: frozenset[int]) -> float:
        if subset not in cache:
            cache[subset] = oracle_interventional_value(model, background_X, x, subset)
        return cache[subset]

    phi = np.zeros(m)
    for perm in itertools.permutations(range(m)):
        members: set[int] = set()
        before = value(frozenset())
        for i in perm:
            members.add(i)
            after = value(frozenset(members))
            phi[i] += after - before
            before = after
    return phi / math.factorial(m)
