"""Scoring explanations against expert knowledge.

Every explanation point is classified against the knowledge interval covering
its feature value: inside the interval's target range (inclusive endpoints)
it agrees, outside it disagrees with a direction (over/under), and without a
covering interval it is "no knowledge". Per-feature class fractions combine
with feature importance into the weighted mean agreement (WMA) — identically
the blue area of the summary plot — which ranks models.

Grey (no-knowledge) points stay in the denominator of the agree fraction, so
features the expert knows nothing about dilute a model's WMA rather than
being ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from .automl import LeaderboardEntry
from .errors import AgreementError
from .explain import ExplanationSet, ImportanceVector
from .knowledge import IntervalSet, KnowledgeInterval, lookup_interval


class PointClass(enum.Enum):
    """Agreement class of one explanation point; direction exists only for disagreement."""

    AGREE = "agree"
    OVER = "over"
    UNDER = "under"
    NO_KNOWLEDGE = "no_knowledge"

    @property
    def is_disagree(self) -> bool:
        return self in (PointClass.OVER, PointClass.UNDER)


def classify_point(expected_value: float, interval: KnowledgeInterval | None) -> PointClass:
    """Classify a target-space expected value against one (optional) interval."""
    if interval is None:
        return PointClass.NO_KNOWLEDGE
    lo, hi = interval.target_range
    if expected_value > hi:
        return PointClass.OVER
    if expected_value < lo:
        return PointClass.UNDER
    return PointClass.AGREE


@dataclass(frozen=True)
class FeatureAgreement:
    feature: str
    agree_fraction: float
    disagree_fraction: float
    noknowledge_fraction: float
    importance_weight: float

    def __post_init__(self) -> None:
        total = self.agree_fraction + self.disagree_fraction + self.noknowledge_fraction
        if abs(total - 1.0) > 1e-9:
            raise AgreementError(f"{self.feature}: class fractions sum to {total}, not 1")


@dataclass(frozen=True)
class AgreementSummary:
    """Per-feature agreement fractions and importance for one model, plus its WMA."""

    model_id: str
    interval_set: str
    features: tuple[FeatureAgreement, ...]
    wma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        expected = sum(f.importance_weight * f.agree_fraction for f in self.features)
        if abs(self.wma - expected) > 1e-9:
            raise AgreementError(f"wma {self.wma} does not match sum(importance * agree) {expected}")

    def to_doc(self) -> dict:
        return {
            "model_id": self.model_id,
            "interval_set": self.interval_set,
            "features": [
                {
                    "feature": f.feature,
                    "agree_fraction": f.agree_fraction,
                    "disagree_fraction": f.disagree_fraction,
                    "noknowledge_fraction": f.noknowledge_fraction,
                    "importance_weight": f.importance_weight,
                }
                for f in self.features
            ],
            "wma": self.wma,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "AgreementSummary":
        return AgreementSummary(
            model_id=doc["model_id"],
            interval_set=doc["interval_set"],
            features=tuple(
                FeatureAgreement(
                    feature=f["feature"],
                    agree_fraction=float(f["agree_fraction"]),
                    disagree_fraction=float(f["disagree_fraction"]),
                    noknowledge_fraction=float(f["noknowledge_fraction"]),
                    importance_weight=float(f["importance_weight"]),
                )
                for f in doc["features"]
            ),
            wma=float(doc["wma"]),
        )


def classify_record(
    intervals: IntervalSet, feature: str, feature_value: float, expected_value: float
) -> PointClass:
    """Lookup + classify in one step; this is the classification the service serves."""
    return classify_point(expected_value, lookup_interval(intervals, feature, feature_value))


def summarize(
    expl: ExplanationSet, importance: ImportanceVector, intervals: IntervalSet
) -> AgreementSummary:
    """Aggregate per-feature class fractions and weighted mean agreement for one model."""
    if expl.model_id != importance.model_id:
        raise AgreementError(
            f"explanations are for {expl.model_id!r} but importance for {importance.model_id!r}"
        )
    missing = [name for name in expl.feature_names if name not in importance.weights]
    if missing:
        raise AgreementError(f"features {missing} missing from importance vector")
    per_feature: list[FeatureAgreement] = []
    wma = 0.0
    for name in expl.feature_names:
        records = expl.records_for(name)
        if not records:
            raise AgreementError(f"no explanation records for feature {name!r}")
        n = len(records)
        counts = {PointClass.AGREE: 0, PointClass.OVER: 0, PointClass.UNDER: 0, PointClass.NO_KNOWLEDGE: 0}
        for rec in records:
            cls = classify_record(intervals, name, rec.feature_value, rec.expected_value)
            counts[cls] += 1
        agree = counts[PointClass.AGREE] / n
        disagree = (counts[PointClass.OVER] + counts[PointClass.UNDER]) / n
        nok = counts[PointClass.NO_KNOWLEDGE] / n
        weight = importance.weights[name]
        per_feature.append(
            FeatureAgreement(
                feature=name,
                agree_fraction=agree,
                disagree_fraction=disagree,
                noknowledge_fraction=nok,
                importance_weight=weight,
            )
        )
        wma += weight * agree
    return AgreementSummary(
        model_id=expl.model_id,
        interval_set=intervals.name,
        features=tuple(per_feature),
        wma=wma,
    )


@dataclass(frozen=True)
class RankedModel:
    model_id: str
    alias: str
    wma: float
    cv_rmse: float


def rank_by_wma(
    summaries: Sequence[AgreementSummary], board: Sequence[LeaderboardEntry]
) -> list[RankedModel]:
    """Order models by descending WMA; ties fall back to CV RMSE, then model id."""
    by_id = {e.model_id: e for e in board}
    ranked: list[RankedModel] = []
    for summary in summaries:
        entry = by_id.get(summary.model_id)
        if entry is None:
            raise AgreementError(f"summary for {summary.model_id!r} has no leaderboard entry")
        ranked.append(
            RankedModel(
                model_id=summary.model_id,
                alias=entry.alias,
                wma=summary.wma,
                cv_rmse=entry.cv_rmse,
            )
        )
    ranked.sort(key=lambda r: (-r.wma, r.cv_rmse, r.model_id))
    return ranked


@dataclass(frozen=True)
class IntervalBias:
    """Aggregate class counts for one knowledge interval across models, plus a flag."""

    feature: str
    label: str
    agree: int
    over: int
    under: int
    models_over: int
    models_under: int
    n_models: int
    flag: str | None  # "over" / "under" when enough models disagree that way


def bias_report(
    explanations: Sequence[ExplanationSet],
    intervals: IntervalSet,
    flag_share: float = 0.5,
) -> list[IntervalBias]:
    """Find intervals where models systematically over- or under-estimate.

    A model's verdict on an interval is the majority class of its points
    falling inside that interval's feature range. An interval is flagged
    "over" (or "under") when the share of models with that disagreeing
    verdict exceeds ``flag_share``.
    """
    report: list[IntervalBias] = []
    for iv in intervals.intervals:
        agree = over = under = 0
        models_over = models_under = 0
        n_models = 0
        for expl in explanations:
            m_counts = {PointClass.AGREE: 0, PointClass.OVER: 0, PointClass.UNDER: 0}
            for rec in expl.records_for(iv.feature):
                if not iv.contains(rec.feature_value):
                    continue
                cls = classify_point(rec.expected_value, iv)
                m_counts[cls] += 1
            if sum(m_counts.values()) == 0:
                continue
            n_models += 1
            agree += m_counts[PointClass.AGREE]
            over += m_counts[PointClass.OVER]
            under += m_counts[PointClass.UNDER]
            if m_counts[PointClass.OVER] > max(m_counts[PointClass.AGREE], m_counts[PointClass.UNDER]):
                models_over += 1
            elif m_counts[PointClass.UNDER] > max(m_counts[PointClass.AGREE], m_counts[PointClass.OVER]):
                models_under += 1
        flag = None
        if n_models:
            if models_over / n_models > flag_share:
                flag = "over"
            elif models_under / n_models > flag_share:
                flag = "under"
        report.append(
            IntervalBias(
                feature=iv.feature,
                label=iv.label,
                agree=agree,
                over=over,
                under=under,
                models_over=models_over,
                models_under=models_under,
                n_models=n_models,
                flag=flag,
            )
        )
    return report
