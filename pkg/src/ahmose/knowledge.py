"""Expert knowledge intervals and their construction from weighted IF-THEN rules.

A knowledge interval states, for one range of one input feature, the range
where the expert expects the *mean* of the target to fall. Interval sets can
be authored directly or derived from a rule table: each rule assigns one
label per feature and an output value, weighted by how often that input
combination occurred. The weighted mean of rule outputs over all rules
containing a given (feature, label) is the center of that label's target
range.

Feature ranges follow half-open bracket semantics: every interval is
``(lo, hi]`` except the first interval of a feature, which is closed
``[lo, hi]`` so the global minimum belongs somewhere.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import KnowledgeError
from .jsonio import canonical_dumps, loads

RULE_TABLE_SCHEMA_VERSION = 1
INTERVAL_SET_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class KnowledgeInterval:
    """Expert belief: target mean lies in ``target_range`` when ``feature`` is in ``feature_range``."""

    feature: str
    label: str
    feature_range: tuple[float, float]
    target_range: tuple[float, float]
    closed_low: bool = False

    def __post_init__(self) -> None:
        lo, hi = self.feature_range
        a, b = self.target_range
        if not lo < hi:
            raise KnowledgeError(f"{self.feature} {self.label}: feature range [{lo}, {hi}] needs lo < hi")
        if not a < b:
            raise KnowledgeError(f"{self.feature} {self.label}: target range [{a}, {b}] needs a < b")

    def contains(self, value: float) -> bool:
        lo, hi = self.feature_range
        if self.closed_low:
            return lo <= value <= hi
        return lo < value <= hi


@dataclass(frozen=True)
class IntervalSet:
    """Named collection of knowledge intervals, disjoint per feature (gaps allowed)."""

    name: str
    intervals: tuple[KnowledgeInterval, ...]
    target_bounds: tuple[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", tuple(self.intervals))
        object.__setattr__(self, "target_bounds", tuple(self.target_bounds))
        lo_b, hi_b = self.target_bounds
        if not lo_b < hi_b:
            raise KnowledgeError(f"target bounds [{lo_b}, {hi_b}] need lo < hi")
        for iv in self.intervals:
            a, b = iv.target_range
            if a < lo_b or b > hi_b:
                raise KnowledgeError(
                    f"{iv.feature} {iv.label}: target range [{a}, {b}] outside bounds [{lo_b}, {hi_b}]"
                )
        by_feature: dict[str, list[KnowledgeInterval]] = {}
        for iv in self.intervals:
            by_feature.setdefault(iv.feature, []).append(iv)
        for feature, ivs in by_feature.items():
            ordered = sorted(ivs, key=lambda iv: iv.feature_range)
            for left, right in zip(ordered, ordered[1:]):
                if _ranges_overlap(left, right):
                    raise KnowledgeError(
                        f"{feature}: intervals {left.label} and {right.label} overlap"
                    )

    def features(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for iv in self.intervals:
            seen.setdefault(iv.feature)
        return tuple(seen)


def _ranges_overlap(a: KnowledgeInterval, b: KnowledgeInterval) -> bool:
    # a sorted before b; right endpoints always included, left per closed_low
    a_lo, a_hi = a.feature_range
    b_lo, b_hi = b.feature_range
    if b_lo < a_hi:
        return True
    if b_lo == a_hi:
        return b.closed_low  # hi belongs to a; shared point only if b also takes it
    return False


@dataclass(frozen=True)
class GridFeature:
    """One feature's labeled interval grid: label i covers (edges[i], edges[i+1]]."""

    name: str
    labels: tuple[str, ...]
    edges: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "edges", tuple(float(e) for e in self.edges))
        if len(self.labels) < 1:
            raise KnowledgeError(f"{self.name}: needs at least one label")
        if len(self.edges) != len(self.labels) + 1:
            raise KnowledgeError(f"{self.name}: {len(self.labels)} labels need {len(self.labels) + 1} edges")
        if any(lo >= hi for lo, hi in zip(self.edges, self.edges[1:])):
            raise KnowledgeError(f"{self.name}: edges must be strictly increasing")
        if len(set(self.labels)) != len(self.labels):
            raise KnowledgeError(f"{self.name}: duplicate labels")

    def label_range(self, label: str) -> tuple[float, float]:
        i = self.labels.index(label)
        return (self.edges[i], self.edges[i + 1])

    def label_for(self, value: float) -> str | None:
        if value < self.edges[0] or value > self.edges[-1]:
            return None
        for i, label in enumerate(self.labels):
            lo, hi = self.edges[i], self.edges[i + 1]
            if (value >= lo if i == 0 else value > lo) and value <= hi:
                return label
        return None


@dataclass(frozen=True)
class Rule:
    """IF-THEN rule: one label per feature -> output value, with an occurrence weight."""

    labels: Mapping[str, str]
    output: float
    weight: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", dict(self.labels))
        if self.weight < 0 or int(self.weight) != self.weight:
            raise KnowledgeError(f"rule weight must be a non-negative integer, got {self.weight}")
        object.__setattr__(self, "weight", int(self.weight))
        object.__setattr__(self, "output", float(self.output))


@dataclass(frozen=True)
class RuleTable:
    features: tuple[GridFeature, ...]
    rules: tuple[Rule, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise KnowledgeError("duplicate feature names in rule table")
        by_name = {f.name: f for f in self.features}
        for rule in self.rules:
            if set(rule.labels) != set(names):
                raise KnowledgeError(
                    f"rule must assign exactly one label per feature {names}, got {sorted(rule.labels)}"
                )
            for fname, label in rule.labels.items():
                if label not in by_name[fname].labels:
                    raise KnowledgeError(f"unknown label {label!r} for feature {fname!r}")

    def feature(self, name: str) -> GridFeature:
        for f in self.features:
            if f.name == name:
                return f
        raise KnowledgeError(f"unknown feature {name!r}")

    def total_weight(self) -> int:
        return sum(r.weight for r in self.rules)


def weighted_quality_mean(rules: RuleTable, feature: str, label: str) -> float:
    """Occurrence-weighted mean of rule outputs over rules mapping ``feature`` to ``label``.

    Raises :class:`KnowledgeError` when no matching rule carries positive
    weight ("no evidence for interval").
    """
    grid = rules.feature(feature)
    if label not in grid.labels:
        raise KnowledgeError(f"unknown label {label!r} for feature {feature!r}")
    total = 0
    weighted_sum = 0.0
    for rule in rules.rules:
        if rule.labels[feature] == label:
            total += rule.weight
            weighted_sum += rule.weight * rule.output
    if total == 0:
        raise KnowledgeError(f"no evidence for interval {feature}={label} (total weight 0)")
    return weighted_sum / total


def build_intervals(
    rules: RuleTable,
    radius: float,
    target_bounds: tuple[float, float],
    name: str = "expert-knowledge",
) -> IntervalSet:
    """Turn a weighted rule table into knowledge intervals.

    Each (feature, label) with positive evidence gets the target range
    ``[wqm - radius, wqm + radius]`` clamped to ``target_bounds``; its feature
    range comes from the grid definition. Labels with zero evidence are
    omitted with a warning — incomplete knowledge is legal, not an error.
    """
    if radius <= 0:
        raise KnowledgeError(f"radius must be > 0, got {radius}")
    lo_b, hi_b = target_bounds
    intervals: list[KnowledgeInterval] = []
    for grid in rules.features:
        for i, label in enumerate(grid.labels):
            try:
                wqm = weighted_quality_mean(rules, grid.name, label)
            except KnowledgeError:
                warnings.warn(
                    f"no evidence for {grid.name}={label}; interval omitted",
                    stacklevel=2,
                )
                continue
            target_range = (max(wqm - radius, lo_b), min(wqm + radius, hi_b))
            intervals.append(
                KnowledgeInterval(
                    feature=grid.name,
                    label=label,
                    feature_range=grid.label_range(label),
                    target_range=target_range,
                    closed_low=(i == 0),
                )
            )
    return IntervalSet(name=name, intervals=tuple(intervals), target_bounds=(float(lo_b), float(hi_b)))


def lookup_interval(interval_set: IntervalSet, feature: str, value: float) -> KnowledgeInterval | None:
    """The unique interval of ``feature`` covering ``value``, or None (absence is a value)."""
    for iv in interval_set.intervals:
        if iv.feature == feature and iv.contains(value):
            return iv
    return None


# ---------------------------------------------------------------------------
# serialization


def rule_table_to_json(rules: RuleTable) -> str:
    doc = {
        "schema_version": RULE_TABLE_SCHEMA_VERSION,
        "kind": "rule_table",
        "features": [
            {"name": f.name, "labels": list(f.labels), "edges": list(f.edges)}
            for f in rules.features
        ],
        "rules": [
            {"labels": dict(r.labels), "output": r.output, "weight": r.weight}
            for r in rules.rules
        ],
    }
    return canonical_dumps(doc)


def parse_rule_file(text: str) -> RuleTable:
    doc = _load_doc(text, "rule_table", RULE_TABLE_SCHEMA_VERSION)
    try:
        features = tuple(
            GridFeature(name=f["name"], labels=tuple(f["labels"]), edges=tuple(f["edges"]))
            for f in doc["features"]
        )
        rules = tuple(
            Rule(labels=r["labels"], output=r["output"], weight=r["weight"])
            for r in doc["rules"]
        )
    except (KeyError, TypeError) as exc:
        raise KnowledgeError(f"malformed rule table document: {exc}") from exc
    return RuleTable(features=features, rules=rules)


def interval_set_to_json(interval_set: IntervalSet) -> str:
    doc = {
        "schema_version": INTERVAL_SET_SCHEMA_VERSION,
        "kind": "interval_set",
        "name": interval_set.name,
        "target_bounds": list(interval_set.target_bounds),
        "intervals": [
            {
                "feature": iv.feature,
                "label": iv.label,
                "feature_range": list(iv.feature_range),
                "target_range": list(iv.target_range),
                "closed_low": iv.closed_low,
            }
            for iv in interval_set.intervals
        ],
    }
    return canonical_dumps(doc)


def parse_interval_file(text: str) -> IntervalSet:
    doc = _load_doc(text, "interval_set", INTERVAL_SET_SCHEMA_VERSION)
    try:
        intervals = tuple(
            KnowledgeInterval(
                feature=iv["feature"],
                label=iv["label"],
                feature_range=tuple(iv["feature_range"]),
                target_range=tuple(iv["target_range"]),
                closed_low=bool(iv.get("closed_low", False)),
            )
            for iv in doc["intervals"]
        )
        return IntervalSet(
            name=doc["name"],
            intervals=intervals,
            target_bounds=tuple(doc["target_bounds"]),
        )
    except (KeyError, TypeError) as exc:
        raise KnowledgeError(f"malformed interval set document: {exc}") from exc


def _load_doc(text: str, kind: str, version: int) -> dict:
    try:
        doc = loads(text)
    except ValueError as exc:
        raise KnowledgeError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") != kind:
        raise KnowledgeError(f"expected a {kind!r} document")
    if doc.get("schema_version") != version:
        raise KnowledgeError(
            f"unsupported {kind} schema_version {doc.get('schema_version')!r} (reader supports {version})"
        )
    return doc
