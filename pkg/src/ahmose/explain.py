"""Exact interventional Shapley explanations in target space.

For each observation and feature, the attribution is the Shapley value of the
coalition game ``v(S) = mean over background rows b of f(x restricted to S, b
elsewhere)``, computed exactly by enumerating all ``2^M`` coalitions with the
standard weighting. No sampling is ever used: requests beyond the feature cap
fail loudly instead of silently approximating.

The base value is the average model output over the background (by default
the training data). ``expected_value = shap_value + base_value`` translates
each attribution into target units, the quantity compared against expert
knowledge intervals downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dataset import Dataset, Observation
from .errors import ExplainError
from .models import TrainedModel, predict_matrix

MAX_EXACT_FEATURES = 12


@dataclass(frozen=True)
class ExplanationRecord:
    observation_index: int
    feature: str
    feature_value: float
    shap_value: float
    expected_value: float


@dataclass(frozen=True)
class ExplanationSet:
    """All (observation, feature) attributions for one model, plus its base value."""

    model_id: str
    base_value: float
    feature_names: tuple[str, ...]
    records: tuple[ExplanationRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[tuple[int, str]] = set()
        for rec in self.records:
            key = (rec.observation_index, rec.feature)
            if key in seen:
                raise ExplainError(f"duplicate record for observation {key[0]}, feature {key[1]!r}")
            seen.add(key)
            if rec.feature not in self.feature_names:
                raise ExplainError(f"record feature {rec.feature!r} not in feature set")
            if abs(rec.expected_value - (rec.shap_value + self.base_value)) > 1e-9:
                raise ExplainError(
                    f"record ({key[0]}, {key[1]}): expected_value must equal shap + base"
                )

    @property
    def n_observations(self) -> int:
        return len({rec.observation_index for rec in self.records})

    def records_for(self, feature: str) -> list[ExplanationRecord]:
        return [rec for rec in self.records if rec.feature == feature]

    def to_doc(self) -> dict:
        return {
            "model_id": self.model_id,
            "base_value": self.base_value,
            "feature_names": list(self.feature_names),
            "records": [
                {
                    "observation_index": rec.observation_index,
                    "feature": rec.feature,
                    "feature_value": rec.feature_value,
                    "shap_value": rec.shap_value,
                    "expected_value": rec.expected_value,
                }
                for rec in self.records
            ],
        }

    @staticmethod
    def from_doc(doc: dict) -> "ExplanationSet":
        return ExplanationSet(
            model_id=doc["model_id"],
            base_value=float(doc["base_value"]),
            feature_names=tuple(doc["feature_names"]),
            records=tuple(
                ExplanationRecord(
                    observation_index=int(r["observation_index"]),
                    feature=r["feature"],
                    feature_value=float(r["feature_value"]),
                    shap_value=float(r["shap_value"]),
                    expected_value=float(r["expected_value"]),
                )
                for r in doc["records"]
            ),
        )


@dataclass(frozen=True)
class ImportanceVector:
    """Normalized mean |shap| per feature; weights sum to 1."""

    model_id: str
    weights: dict[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", dict(self.weights))
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ExplainError(f"importance weights must sum to 1, got {total}")
        for name, w in self.weights.items():
            if not 0.0 <= w <= 1.0 + 1e-12:
                raise ExplainError(f"importance weight out of [0,1] for {name!r}: {w}")


def base_value(model: TrainedModel, background: Dataset) -> float:
    """Arithmetic mean of model output over the background rows."""
    if len(background) == 0:
        raise ExplainError("background dataset is empty")
    return float(predict_matrix(model, background.feature_matrix).mean())


@lru_cache(maxsize=16)
def _coalition_tables(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(masks, sizes, shapley weight per coalition size) for m features."""
    n_sub = 1 << m
    masks = np.zeros((n_sub, m), dtype=bool)
    sizes = np.zeros(n_sub, dtype=np.int64)
    for s in range(n_sub):
        bits = [(s >> j) & 1 for j in range(m)]
        masks[s] = bits
        sizes[s] = sum(bits)
    fact = [math.factorial(i) for i in range(m + 1)]
    weights = np.array(
        [fact[s] * fact[m - 1 - s] / fact[m] for s in range(m)], dtype=float
    )
    return masks, sizes, weights


def _coalition_values(model: TrainedModel, background_X: np.ndarray, x: np.ndarray) -> np.ndarray:
    m = x.size
    n_sub = 1 << m
    n_b = background_X.shape[0]
    masks, _, _ = _coalition_tables(m)
    hybrid = np.where(masks[:, None, :], x[None, None, :], background_X[None, :, :])
    preds = predict_matrix(model, hybrid.reshape(n_sub * n_b, m))
    return preds.reshape(n_sub, n_b).mean(axis=1)


def _shapley_from_values(values: np.ndarray, m: int) -> np.ndarray:
    _, sizes, weights = _coalition_tables(m)
    phi = np.zeros(m)
    all_s = np.arange(values.size)
    for i in range(m):
        without = all_s[(all_s >> i) & 1 == 0]
        with_i = without | (1 << i)
        phi[i] = float(np.sum(weights[sizes[without]] * (values[with_i] - values[without])))
    return phi


def _check_inputs(model: TrainedModel, background: Dataset, max_features: int) -> None:
    if tuple(background.feature_names) != tuple(model.feature_names):
        raise ExplainError(
            f"background features {background.feature_names} do not match model features {model.feature_names}"
        )
    if len(background) == 0:
        raise ExplainError("background dataset is empty")
    m = len(model.feature_names)
    if m > max_features:
        raise ExplainError(
            f"exact enumeration infeasible: {m} features exceeds the cap of {max_features} "
            f"(2^{m} coalitions); this explainer never approximates"
        )


def shapley_values(
    model: TrainedModel,
    background: Dataset,
    obs: Observation,
    max_features: int = MAX_EXACT_FEATURES,
) -> dict[str, float]:
    """Exact Shapley value per feature for one observation.

    Satisfies efficiency: the values sum to ``predict(obs) - base_value``
    within 1e-9.
    """
    _check_inputs(model, background, max_features)
    x = np.array([obs.values[name] for name in model.feature_names], dtype=float)
    values = _coalition_values(model, background.feature_matrix, x)
    phi = _shapley_from_values(values, x.size)
    return {name: float(phi[j]) for j, name in enumerate(model.feature_names)}


def explain_dataset(
    model: TrainedModel,
    background: Dataset,
    data_of_interest: Dataset,
    model_id: str | None = None,
    max_features: int = MAX_EXACT_FEATURES,
) -> ExplanationSet:
    """One exact Shapley explanation per (observation, feature) of the data of interest."""
    _check_inputs(model, background, max_features)
    if tuple(data_of_interest.feature_names) != tuple(model.feature_names):
        raise ExplainError("data of interest features do not match model features")
    base = base_value(model, background)
    records: list[ExplanationRecord] = []
    X = data_of_interest.feature_matrix
    for obs_index in range(X.shape[0]):
        x = X[obs_index]
        values = _coalition_values(model, background.feature_matrix, x)
        phi = _shapley_from_values(values, x.size)
        for j, name in enumerate(model.feature_names):
            records.append(
                ExplanationRecord(
                    observation_index=obs_index,
                    feature=name,
                    feature_value=float(x[j]),
                    shap_value=float(phi[j]),
                    expected_value=float(phi[j] + base),
                )
            )
    return ExplanationSet(
        model_id=model_id if model_id is not None else model.family,
        base_value=base,
        feature_names=tuple(model.feature_names),
        records=tuple(records),
    )


def feature_importance(expl: ExplanationSet) -> ImportanceVector:
    """Mean |shap| per feature over the data of interest, normalized to sum to 1.

    The all-zero degenerate case (e.g. a constant predictor) falls back to
    uniform weights.
    """
    if not expl.records:
        raise ExplainError("cannot compute importance from an empty explanation set")
    sums = {name: 0.0 for name in expl.feature_names}
    counts = {name: 0 for name in expl.feature_names}
    for rec in expl.records:
        sums[rec.feature] += abs(rec.shap_value)
        counts[rec.feature] += 1
    means = {
        name: (sums[name] / counts[name]) if counts[name] else 0.0 for name in expl.feature_names
    }
    total = sum(means.values())
    m = len(expl.feature_names)
    if total == 0.0:
        weights = {name: 1.0 / m for name in expl.feature_names}
    else:
        weights = {name: means[name] / total for name in expl.feature_names}
    return ImportanceVector(model_id=expl.model_id, weights=weights)
