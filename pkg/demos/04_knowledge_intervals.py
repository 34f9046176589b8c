"""
Expert knowledge: weighted rules -> intervals
=============================================

Experts state IF-THEN rules over labeled feature ranges (low / medium / high
...), each weighted by how often its input combination actually occurred.
The weighted mean of rule outputs per (feature, label) centers a radius-0.5
belief interval for the target mean, clamped to the target bounds.
"""

from pathlib import Path

from ahmose.knowledge import (
    build_intervals,
    lookup_interval,
    parse_rule_file,
    weighted_quality_mean,
)

rules_path = Path(__file__).resolve().parent.parent / "docs" / "examples" / "grape_quality_rules.json"
rules = parse_rule_file(rules_path.read_text(encoding="utf-8"))

print(f"{len(rules.rules)} rules, total weight {rules.total_weight()}")

print(f"\n{'feature':<8} {'label':<6} {'wqm':>6}   target range")
interval_set = build_intervals(rules, radius=0.5, target_bounds=(1.0, 5.0), name="expert")
for iv in interval_set.intervals:
    wqm = weighted_quality_mean(rules, iv.feature, iv.label)
    lo, hi = iv.target_range
    print(f"{iv.feature:<8} {iv.label:<6} {wqm:>6.2f}   [{lo:.2f}, {hi:.2f}]")

# The very-high anthocyanin interval shows the upper clamp: 4.75 + 0.5 would
# exceed the 1-5 quality scale, so the range ends at 5.00.
vh = [iv for iv in interval_set.intervals if (iv.feature, iv.label) == ("Anth", "VH")][0]
print("\nAnth VH range:", vh.target_range)

# Boundary semantics: the first interval of a feature is closed, later ones
# are (lo, hi], so a shared edge belongs to the lower label.
print("Anth=600.00 falls in:", lookup_interval(interval_set, "Anth", 600.0).label)
print("Anth=600.01 falls in:", lookup_interval(interval_set, "Anth", 600.01).label)
print("Anth=150 falls in:", lookup_interval(interval_set, "Anth", 150.0))
