"""
Exact Shapley explanations in target units
==========================================

For every (observation, feature) pair the explainer enumerates all 2^M
coalitions of the interventional game, so the attributions are exact: they
always sum to prediction - base value. Adding the base value puts each
attribution on the target scale, where it can be compared with expert
knowledge.
"""

import numpy as np

from ahmose.explain import base_value, explain_dataset, feature_importance, shapley_values
from ahmose.models import ModelSpec, fit, predict_matrix
from ahmose.scenario import generate_shift_scenario

train, test, _ = generate_shift_scenario(seed=93)

glm = fit(ModelSpec("GLM", {"l2_penalty": 1e-2}), train, seed=0)
gbm = fit(ModelSpec("GBM", {"n_trees": 50, "learning_rate": 0.1, "max_depth": 3}), train, seed=0)

base = base_value(glm, train)
print(f"GLM base value (mean training prediction): {base:.4f}")

obs = test.rows[0]
phi = shapley_values(glm, train, obs)
print("\nobservation:", {k: round(v, 2) for k, v in obs.values.items()})
for name, value in phi.items():
    print(f"  phi[{name}] = {value:+.4f}   expected value = {base + value:.4f}")

pred = predict_matrix(glm, test.feature_matrix[:1])[0]
print(f"efficiency: base + sum(phi) = {base + sum(phi.values()):.6f} vs prediction {pred:.6f}")

# For a linear model the exact values collapse to the closed form
# w_j * (x_j - background mean of feature j).
w = np.asarray(glm.coefficients)
means = train.feature_matrix.mean(axis=0)
x = test.feature_matrix[0]
closed = w * (x - means)
print("closed form matches:", np.allclose(closed, list(phi.values()), atol=1e-9))

# Whole-dataset explanations feed the decision interface; normalized mean
# |phi| per feature is the importance (the Marimekko column widths).
expl = explain_dataset(gbm, train, test, model_id="GBM_demo")
importance = feature_importance(expl)
print("\nGBM feature importance on the held-out year:")
for name, weight in sorted(importance.weights.items(), key=lambda kv: -kv[1]):
    print(f"  {name:<5} {weight:.3f}")
