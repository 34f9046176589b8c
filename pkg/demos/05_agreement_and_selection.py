"""
Knowledge agreement and model selection
=======================================

The selection score is the weighted mean agreement (WMA): per feature, the
share of explanation points whose expected value falls inside the covering
knowledge interval, weighted by feature importance. It equals the blue area
of the summary (Marimekko) plot. On a distribution-shifted test year, the
WMA winner generalizes better than the cross-validation winner.
"""

import numpy as np

from ahmose.agreement import bias_report, rank_by_wma
from ahmose.automl import GridConfig
from ahmose.models import predict_matrix
from ahmose.project import build_bundle
from ahmose.scenario import generate_shift_scenario

train, test, truth_rules = generate_shift_scenario(seed=93)

grid = GridConfig(
    grids={
        "GLM": {"l2_penalty": [1e-6, 1e-2, 1.0]},
        "TREE": {"max_depth": [3, 5]},
        "DRF": {"n_trees": [25], "max_depth": [5], "feature_subsample_fraction": [0.75, 1.0]},
        "GBM": {"n_trees": [50], "learning_rate": [0.1], "max_depth": [2, 3]},
    },
    k=5,
    seed=93,
)

bundle = build_bundle(
    name="grape-shift-93",
    train=train,
    interest=test,
    rules=truth_rules,
    seed=93,
    grid=grid,
    top_per_family=2,
)

X_test, y_test = test.labeled_arrays()


def test_rmse(model_id: str) -> float:
    pred = predict_matrix(bundle.models[model_id], X_test)
    return float(np.sqrt(np.mean((pred - y_test) ** 2)))


summaries = [bundle.summaries[(m, "expert")] for m in bundle.model_ids()]
ranked = rank_by_wma(summaries, bundle.board)

print(f"{'alias':<6} {'model_id':<14} {'wma':>7} {'cv_rmse':>9} {'test_rmse':>10}")
for r in ranked:
    print(f"{r.alias:<6} {r.model_id:<14} {r.wma:>7.3f} {r.cv_rmse:>9.4f} {test_rmse(r.model_id):>10.4f}")

cv_top = bundle.board[0]
wma_top = ranked[0]
print(f"\ncross-validation would pick {cv_top.model_id} (test RMSE {test_rmse(cv_top.model_id):.4f})")
print(f"knowledge agreement picks   {wma_top.model_id} (test RMSE {test_rmse(wma_top.model_id):.4f})")

# Where do models disagree with the experts systematically? The bias report
# flags intervals where a majority of models over- or under-estimate.
report = bias_report(list(bundle.explanations.values()), bundle.interval_sets["expert"])
flagged = [b for b in report if b.flag]
if flagged:
    print("\nflagged intervals:")
    for b in flagged:
        print(f"  {b.feature} {b.label}: {b.flag} ({b.models_over} of {b.n_models} models over, "
              f"{b.models_under} under)")
else:
    print("\nno interval has a majority-disagreement flag; most contested:")
    for b in sorted(report, key=lambda b: -(b.over + b.under))[:3]:
        print(f"  {b.feature} {b.label}: {b.agree} agree / {b.over} over / {b.under} under")
