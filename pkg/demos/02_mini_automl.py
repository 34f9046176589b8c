"""
Mini-AutoML: seeded grids, k-fold RMSE, leaderboards
====================================================

Every grid point is scored with the same seeded 5-fold split (pooled RMSE
over all held-out predictions), so the board is reproducible and invariant
to dataset row order. The best few models per family move on to explanation.
"""

from ahmose.automl import GridConfig, format_leaderboard, run_automl, select_top_per_family
from ahmose.scenario import generate_shift_scenario

train, _, _ = generate_shift_scenario(seed=93)

# A compact grid keeps this demo quick; ahmose.automl.default_grid() is the
# desk-scale one (~60 candidates).
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

board = run_automl(train, grid)
print(format_leaderboard(board))

# Keep the two best models of each family; aliases are reassigned M0..Mk in
# global rank order.
selected = select_top_per_family(board, n_per_family=2)
print("\nselected for the decision interface:")
print(format_leaderboard(selected))

# Determinism: the same seed gives the same board, down to the last float.
again = run_automl(train, grid)
print("\nrerun identical:", board == again)
