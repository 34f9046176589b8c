"""Regression model families for the AutoML harness.

Four families, all trained under squared loss:

* ``GLM``  — l2-penalized linear model solved exactly via normal equations
  (intercept unpenalized).
* ``TREE`` — greedy regression tree splitting on variance reduction.
* ``DRF``  — bootstrap-aggregated trees with per-split feature subsampling;
  with ``random_splits`` enabled the split thresholds are drawn uniformly per
  candidate feature instead of optimized (the extremely-randomized variant).
* ``GBM``  — boosted trees fit to residuals with shrinkage; fixed number of
  rounds, no early stopping.

Everything is deterministic for a fixed (spec, data, seed): per-tree random
streams are derived from the master seed by index, never from scheduling
order, so a parallel build would be bit-identical to the sequential one.
Trained models are immutable and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dataset import Dataset, Observation
from .errors import ModelError, SingularSystemError
from .jsonio import canonical_dumps, loads

MODEL_SCHEMA_VERSION = 1

FAMILIES = ("GLM", "TREE", "DRF", "GBM")

# name -> (default, validator); None default means the parameter is required
_HYPERPARAMETERS: dict[str, dict[str, tuple[object, str]]] = {
    "GLM": {
        "l2_penalty": (1e-6, "non_negative"),
    },
    "TREE": {
        "max_depth": (3, "depth"),
        "min_leaf": (1, "positive_int"),
    },
    "DRF": {
        "n_trees": (50, "positive_int"),
        "max_depth": (5, "depth"),
        "feature_subsample_fraction": (1.0, "fraction"),
        "min_leaf": (1, "positive_int"),
        "bootstrap": (True, "bool"),
        "random_splits": (False, "bool"),
    },
    "GBM": {
        "n_trees": (50, "positive_int"),
        "learning_rate": (0.1, "rate"),
        "max_depth": (3, "depth"),
        "min_leaf": (1, "positive_int"),
    },
}


def _check_hyperparameter(family: str, name: str, value: object, rule: str) -> object:
    ok = True
    if rule == "positive_int":
        ok = isinstance(value, (int, np.integer)) and not isinstance(value, bool) and value >= 1
    elif rule == "depth":
        # depth 0 is the documented degenerate case: a root-only constant tree
        ok = isinstance(value, (int, np.integer)) and not isinstance(value, bool) and value >= 0
    elif rule == "non_negative":
        ok = isinstance(value, (int, float, np.floating, np.integer)) and not isinstance(value, bool) and value >= 0
        value = float(value)
    elif rule == "rate":
        # rate 0 is the documented degenerate case: predictor frozen at the initial constant
        ok = isinstance(value, (int, float, np.floating, np.integer)) and not isinstance(value, bool) and 0 <= value <= 1
        value = float(value)
    elif rule == "fraction":
        ok = isinstance(value, (int, float, np.floating, np.integer)) and not isinstance(value, bool) and 0 < value <= 1
        value = float(value)
    elif rule == "bool":
        ok = isinstance(value, bool)
    if not ok:
        raise ModelError(f"{family}: invalid hyperparameter {name}={value!r}")
    return value


@dataclass(frozen=True)
class ModelSpec:
    """Family tag plus fully-resolved hyperparameters (defaults filled in)."""

    family: str
    hyperparameters: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ModelError(f"unknown model family {self.family!r}; expected one of {FAMILIES}")
        table = _HYPERPARAMETERS[self.family]
        given = dict(self.hyperparameters)
        unknown = set(given) - set(table)
        if unknown:
            raise ModelError(f"{self.family}: unknown hyperparameters {sorted(unknown)}")
        resolved: dict[str, object] = {}
        for name, (default, rule) in table.items():
            value = given.get(name, default)
            resolved[name] = _check_hyperparameter(self.family, name, value, rule)
        object.__setattr__(self, "hyperparameters", resolved)

    def __getitem__(self, name: str) -> object:
        return self.hyperparameters[name]


@dataclass(frozen=True)
class Tree:
    """Flat-array binary regression tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[idx]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            node = idx[rows]
            go_left = X[rows, feat[rows]] <= self.threshold[node]
            idx[rows] = np.where(go_left, self.left[node], self.right[node])
        return self.value[idx]

    def to_doc(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "Tree":
        return Tree(
            feature=np.asarray(doc["feature"], dtype=np.int64),
            threshold=np.asarray(doc["threshold"], dtype=float),
            left=np.asarray(doc["left"], dtype=np.int64),
            right=np.asarray(doc["right"], dtype=np.int64),
            value=np.asarray(doc["value"], dtype=float),
        )


class _TreeBuilder:
    """Accumulates nodes for one tree; split search is vectorized per feature."""

    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        max_depth: int,
        min_leaf: int,
        n_candidate_features: int | None = None,
        rng: np.random.Generator | None = None,
        random_thresholds: bool = False,
    ) -> None:
        self.X = X
        self.y = y
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.n_candidates = n_candidate_features
        self.rng = rng
        self.random_thresholds = random_thresholds
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def build(self) -> Tree:
        self._grow(np.arange(self.X.shape[0]), depth=0)
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=float),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=float),
        )

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def _candidate_features(self) -> np.ndarray:
        m = self.X.shape[1]
        if self.n_candidates is None or self.n_candidates >= m:
            return np.arange(m)
        chosen = self.rng.choice(m, size=self.n_candidates, replace=False)
        chosen.sort()  # ascending order keeps the tie-break on lowest feature index
        return chosen

    def _grow(self, idx: np.ndarray, depth: int) -> int:
        node = self._new_node()
        y = self.y[idx]
        self.value[node] = float(y.mean())
        if depth >= self.max_depth or idx.size < 2 * self.min_leaf:
            return node
        split = self._find_split(idx)
        if split is None:
            return node
        f, thr = split
        go_left = self.X[idx, f] <= thr
        self.feature[node] = f
        self.threshold[node] = thr
        self.left[node] = self._grow(idx[go_left], depth + 1)
        self.right[node] = self._grow(idx[~go_left], depth + 1)
        return node

    def _find_split(self, idx: np.ndarray) -> tuple[int, float] | None:
        y = self.y[idx]
        n = idx.size
        sse_parent = float(np.sum((y - y.mean()) ** 2))
        best_gain = 0.0
        best: tuple[int, float] | None = None
        for f in self._candidate_features():
            x = self.X[idx, f]
            if self.random_thresholds:
                found = self._random_threshold(x, y, n, f)
            else:
                found = self._exhaustive_threshold(x, y, n, sse_parent)
            if found is None:
                continue
            gain, thr = found
            # strict > keeps the first (lowest-index) feature on equal gain
            if gain > best_gain:
                best_gain = gain
                best = (int(f), float(thr))
        return best

    def _exhaustive_threshold(
        self, x: np.ndarray, y: np.ndarray, n: int, sse_parent: float
    ) -> tuple[float, float] | None:
        order = np.argsort(x, kind="stable")
        xs = x[order]
        ys = y[order]
        csum = np.cumsum(ys)
        csum2 = np.cumsum(ys * ys)
        total = csum[-1]
        total2 = csum2[-1]
        pos = np.arange(1, n)
        valid = xs[1:] != xs[:-1]
        pos = pos[valid & (pos >= self.min_leaf) & ((n - pos) >= self.min_leaf)]
        if pos.size == 0:
            return None
        left_sum = csum[pos - 1]
        sse_left = csum2[pos - 1] - left_sum**2 / pos
        sse_right = (total2 - csum2[pos - 1]) - (total - left_sum) ** 2 / (n - pos)
        gains = sse_parent - (sse_left + sse_right)
        j = int(np.argmax(gains))  # thresholds ascend with pos, so first max = lowest threshold
        if gains[j] <= 0:
            return None
        thr = (xs[pos[j] - 1] + xs[pos[j]]) / 2.0
        return float(gains[j]), float(thr)

    def _random_threshold(
        self, x: np.ndarray, y: np.ndarray, n: int, f: int
    ) -> tuple[float, float] | None:
        lo = float(x.min())
        hi = float(x.max())
        if lo == hi:
            return None
        thr = float(self.rng.uniform(lo, hi))
        go_left = x <= thr
        n_left = int(go_left.sum())
        if n_left < self.min_leaf or (n - n_left) < self.min_leaf:
            return None
        y_left = y[go_left]
        y_right = y[~go_left]
        sse_parent = float(np.sum((y - y.mean()) ** 2))
        gain = sse_parent - float(np.sum((y_left - y_left.mean()) ** 2)) - float(
            np.sum((y_right - y_right.mean()) ** 2)
        )
        if gain <= 0:
            return None
        return gain, thr


@dataclass(frozen=True)
class TrainedModel:
    """Immutable fitted model; ``predict`` is a pure function of the feature vector."""

    spec: ModelSpec
    feature_names: tuple[str, ...]
    coefficients: np.ndarray | None = None
    intercept: float | None = None
    trees: tuple[Tree, ...] = ()
    initial: float | None = None
    loss_trace: tuple[float, ...] = ()  # GBM diagnostic, not serialized

    @property
    def family(self) -> str:
        return self.spec.family


def fit(spec: ModelSpec, train: Dataset, seed: int) -> TrainedModel:
    """Train one model. Deterministic given (spec, train, seed)."""
    X, y = train.labeled_arrays()
    if X.shape[0] < 2:
        raise ModelError(f"training set needs >= 2 labeled rows, got {X.shape[0]}")
    names = train.feature_names
    if spec.family == "GLM":
        coef, intercept = _fit_glm(X, y, float(spec["l2_penalty"]))
        return TrainedModel(spec=spec, feature_names=names, coefficients=coef, intercept=intercept)
    if spec.family == "TREE":
        tree = _TreeBuilder(X, y, int(spec["max_depth"]), int(spec["min_leaf"])).build()
        return TrainedModel(spec=spec, feature_names=names, trees=(tree,))
    if spec.family == "DRF":
        trees = _fit_forest(X, y, spec, seed)
        return TrainedModel(spec=spec, feature_names=names, trees=trees)
    if spec.family == "GBM":
        initial, trees, trace = _fit_gbm(X, y, spec)
        return TrainedModel(
            spec=spec, feature_names=names, trees=trees, initial=initial, loss_trace=trace
        )
    raise ModelError(f"unknown family {spec.family!r}")


def _fit_glm(X: np.ndarray, y: np.ndarray, penalty: float) -> tuple[np.ndarray, float]:
    n, m = X.shape
    X1 = np.hstack([X, np.ones((n, 1))])
    A = X1.T @ X1
    A[np.arange(m), np.arange(m)] += penalty  # intercept stays unpenalized
    b = X1.T @ y
    if penalty == 0.0:
        if np.linalg.matrix_rank(A) < m + 1:
            raise SingularSystemError(
                "normal equations are singular with zero l2 penalty; set l2_penalty > 0"
            )
    beta = np.linalg.solve(A, b)
    coef = beta[:m].copy()
    coef.setflags(write=False)
    return coef, float(beta[m])


def _fit_forest(X: np.ndarray, y: np.ndarray, spec: ModelSpec, seed: int) -> tuple[Tree, ...]:
    n, m = X.shape
    n_trees = int(spec["n_trees"])
    fraction = float(spec["feature_subsample_fraction"])
    n_candidates = max(1, math.ceil(fraction * m))
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees: list[Tree] = []
    for t in range(n_trees):
        rng = np.random.default_rng(children[t])
        if bool(spec["bootstrap"]):
            idx = rng.integers(0, n, size=n)
            Xt, yt = X[idx], y[idx]
        else:
            Xt, yt = X, y
        builder = _TreeBuilder(
            Xt,
            yt,
            int(spec["max_depth"]),
            int(spec["min_leaf"]),
            n_candidate_features=(n_candidates if n_candidates < m else None),
            rng=rng,
            random_thresholds=bool(spec["random_splits"]),
        )
        trees.append(builder.build())
    return tuple(trees)


def _fit_gbm(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> tuple[float, tuple[Tree, ...], tuple[float, ...]]:
    initial = float(y.mean())
    lr = float(spec["learning_rate"])
    pred = np.full_like(y, initial)
    trees: list[Tree] = []
    trace: list[float] = [float(np.sqrt(np.mean((y - pred) ** 2)))]
    for _ in range(int(spec["n_trees"])):
        residual = y - pred
        tree = _TreeBuilder(X, residual, int(spec["max_depth"]), int(spec["min_leaf"])).build()
        trees.append(tree)
        pred = pred + lr * tree.predict(X)
        trace.append(float(np.sqrt(np.mean((y - pred) ** 2))))
    return initial, tuple(trees), tuple(trace)


def predict_matrix(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Vectorized prediction over an (n, n_features) matrix."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(model.feature_names):
        raise ModelError(
            f"expected matrix with {len(model.feature_names)} columns, got shape {X.shape}"
        )
    family = model.family
    if family == "GLM":
        return X @ model.coefficients + model.intercept
    if family == "TREE":
        return model.trees[0].predict(X)
    if family == "DRF":
        acc = np.zeros(X.shape[0])
        for tree in model.trees:
            acc += tree.predict(X)
        return acc / len(model.trees)
    if family == "GBM":
        acc = np.full(X.shape[0], model.initial)
        lr = float(model.spec["learning_rate"])
        for tree in model.trees:
            acc += lr * tree.predict(X)
        return acc
    raise ModelError(f"unknown family {family!r}")


def predict(model: TrainedModel, obs: Observation) -> float:
    """Predict one observation; every model feature must be present."""
    missing = [name for name in model.feature_names if name not in obs.values]
    if missing:
        raise ModelError(f"observation missing features {missing}")
    x = np.array([[obs.values[name] for name in model.feature_names]], dtype=float)
    value = float(predict_matrix(model, x)[0])
    if not math.isfinite(value):
        raise ModelError(f"non-finite prediction {value!r}")
    return value


# ---------------------------------------------------------------------------
# serialization


def model_to_json(model: TrainedModel) -> str:
    family = model.family
    if family == "GLM":
        parameters = {
            "coefficients": model.coefficients.tolist(),
            "intercept": model.intercept,
        }
    elif family in ("TREE", "DRF"):
        parameters = {"trees": [t.to_doc() for t in model.trees]}
    elif family == "GBM":
        parameters = {
            "initial": model.initial,
            "trees": [t.to_doc() for t in model.trees],
        }
    else:
        raise ModelError(f"unknown family {family!r}")
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": "trained_model",
        "family": family,
        "hyperparameters": dict(model.spec.hyperparameters),
        "feature_names": list(model.feature_names),
        "parameters": parameters,
    }
    return canonical_dumps(doc)


def parse_model_file(text: str) -> TrainedModel:
    doc = loads(text)
    if not isinstance(doc, dict) or doc.get("kind") != "trained_model":
        raise ModelError("expected a 'trained_model' document")
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ModelError(f"unsupported model schema_version {doc.get('schema_version')!r}")
    spec = ModelSpec(family=doc["family"], hyperparameters=doc["hyperparameters"])
    names = tuple(doc["feature_names"])
    params = doc["parameters"]
    if spec.family == "GLM":
        coef = np.asarray(params["coefficients"], dtype=float)
        coef.setflags(write=False)
        return TrainedModel(
            spec=spec, feature_names=names, coefficients=coef, intercept=float(params["intercept"])
        )
    trees = tuple(Tree.from_doc(t) for t in params["trees"])
    if spec.family == "GBM":
        return TrainedModel(
            spec=spec, feature_names=names, trees=trees, initial=float(params["initial"])
        )
    return TrainedModel(spec=spec, feature_names=names, trees=trees)
