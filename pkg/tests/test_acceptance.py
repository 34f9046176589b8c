"""Acceptance suite: one test per criterion, each at its stated tolerance.

Each test prints a single `ACCEPTANCE <name>: PASS` line on success (visible
with `pytest -s` / `-rA`); a pytest failure is the corresponding FAIL line.

Golden numbers in the selection-effect test were recorded after the first
verified run of the committed scenario (seed 93). The original field
measurements behind this workflow's motivating case study were never
published, so the improvement figures reported there (RMSE 0.430 -> 0.403,
6.3%; 0.458 -> 0.385, 16.0%) are NOT reproduction targets: the synthetic
shift scenario stands in for them, and its own verified numbers are frozen
below.
"""

from __future__ import annotations

import hashlib
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from ahmose.agreement import rank_by_wma
from ahmose.automl import GridConfig, kfold_rmse, run_automl
from ahmose.cli import main as cli_main
from ahmose.dataset import dataset_to_csv
from ahmose.explain import explain_dataset, shapley_values
from ahmose.knowledge import build_intervals, rule_table_to_json, weighted_quality_mean
from ahmose.models import ModelSpec, TrainedModel, fit, predict_matrix
from ahmose.project import export_project, summary_doc
from ahmose.scenario import ShiftConfig, generate_shift_scenario
from ahmose.service import create_app

from helpers import (
    duplicated_column_ds,
    dummy_feature_setup,
    make_dataset,
    oracle_permutation_shapley,
    symmetric_model,
)
from test_knowledge import EXPECTED_RANGES, EXPECTED_WQM

SCENARIO_SEED = 93

# frozen after the first verified run of the committed scenario (seed 93,
# compact grid); regenerated deterministically by the fixtures
GOLDEN_CV_TOP = "GBM_grid_0"
GOLDEN_CV_TOP_TEST_RMSE = 0.35787780559227117
GOLDEN_WMA_TOP = "GLM_grid_1"
GOLDEN_WMA_TOP_TEST_RMSE = 0.27552583981003154
GOLDEN_WMA_TOP_WMA = 0.987157410304401


def _ok(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------
# 1. reference-table reproduction


def test_acceptance_reference_table_reproduction(expert_rules):
    start = time.perf_counter()
    assert len(expert_rules.rules) == 33
    assert expert_rules.total_weight() == 144
    for (feature, label), expected in EXPECTED_WQM.items():
        wqm = weighted_quality_mean(expert_rules, feature, label)
        assert abs(wqm - expected) <= 0.005, (feature, label, wqm)
    interval_set = build_intervals(expert_rules, radius=0.5, target_bounds=(1.0, 5.0))
    by_key = {(iv.feature, iv.label): iv.target_range for iv in interval_set.intervals}
    assert set(by_key) == set(EXPECTED_RANGES)
    for key, (lo, hi) in EXPECTED_RANGES.items():
        assert round(by_key[key][0], 2) == lo, key
        assert round(by_key[key][1], 2) == hi, key
    assert by_key[("Anth", "VH")] == (4.25, 5.0)  # upper clamp, exact
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"took {elapsed:.3f}s, budget 1s"
    _ok("reference-table reproduction")


# ---------------------------------------------------------------------------
# 2. Shapley axiom suite


SUITE_SPECS = (
    ModelSpec("GLM", {"l2_penalty": 0.01}),
    ModelSpec("TREE", {"max_depth": 4}),
    ModelSpec("DRF", {"n_trees": 10, "max_depth": 4, "feature_subsample_fraction": 0.75}),
    ModelSpec("GBM", {"n_trees": 20, "learning_rate": 0.2, "max_depth": 2}),
)


def test_acceptance_shapley_axiom_suite(suite_ds):
    start = time.perf_counter()
    dup_ds = duplicated_column_ds()
    for spec in SUITE_SPECS:
        model = fit(spec, suite_ds, seed=3)

        # efficiency on all 50 rows
        expl = explain_dataset(model, suite_ds, suite_ds, model_id=spec.family)
        preds = predict_matrix(model, suite_ds.feature_matrix)
        sums = np.zeros(len(suite_ds))
        for rec in expl.records:
            sums[rec.observation_index] += rec.shap_value
        assert np.max(np.abs(sums + expl.base_value - preds)) < 1e-9, spec.family

        # dummy feature attribution is identically zero
        dummy_model, dummy_ds = dummy_feature_setup(spec)
        for obs in (dummy_ds.rows[0], dummy_ds.rows[17]):
            phi = shapley_values(dummy_model, dummy_ds, obs)
            assert phi["x5"] == pytest.approx(0.0, abs=1e-12), spec.family

        # symmetry on duplicated columns
        sym = symmetric_model(spec.family, dup_ds.feature_names)
        phi = shapley_values(
            sym, dup_ds, dup_ds.rows[0].__class__(values={"x1": 2.5, "x2": 2.5, "x3": 1.0, "x4": 3.0})
        )
        assert phi["x1"] == pytest.approx(phi["x2"], abs=1e-9), spec.family

        # permutation-average oracle (M = 4 here; M = 5 below)
        background = suite_ds.subset(range(12))
        for obs in (suite_ds.rows[0], suite_ds.rows[25]):
            got = shapley_values(model, background, obs)
            x = np.array([obs.values[n] for n in model.feature_names])
            want = oracle_permutation_shapley(model, background.feature_matrix, x)
            assert np.allclose(
                [got[n] for n in model.feature_names], want, atol=1e-9
            ), spec.family

    # linearity of attributions for analytic GLM combinations
    model_f = fit(ModelSpec("GLM", {"l2_penalty": 0.5}), suite_ds, seed=0)
    model_g = fit(ModelSpec("GLM", {"l2_penalty": 5.0}), suite_ds, seed=0)
    alpha, beta = 2.0, -0.75
    combined = TrainedModel(
        spec=model_f.spec,
        feature_names=model_f.feature_names,
        coefficients=alpha * np.asarray(model_f.coefficients) + beta * np.asarray(model_g.coefficients),
        intercept=alpha * model_f.intercept + beta * model_g.intercept,
    )
    for obs in (suite_ds.rows[4], suite_ds.rows[44]):
        phi_f = shapley_values(model_f, suite_ds, obs)
        phi_g = shapley_values(model_g, suite_ds, obs)
        phi_c = shapley_values(combined, suite_ds, obs)
        for name in suite_ds.feature_names:
            assert phi_c[name] == pytest.approx(
                alpha * phi_f[name] + beta * phi_g[name], abs=1e-9
            )

    # M = 5 oracle agreement
    rng = np.random.default_rng(2)
    X5 = rng.uniform(0, 10, size=(15, 5))
    y5 = X5[:, 0] - 0.5 * X5[:, 1] + 0.2 * X5[:, 2] * X5[:, 3] + rng.normal(0, 0.1, 15)
    ds5 = make_dataset(X5, y5)
    m5 = fit(ModelSpec("GBM", {"n_trees": 10, "learning_rate": 0.3, "max_depth": 2}), ds5, seed=1)
    obs = ds5.rows[3]
    got = shapley_values(m5, ds5, obs)
    x = np.array([obs.values[n] for n in m5.feature_names])
    want = oracle_permutation_shapley(m5, ds5.feature_matrix, x)
    assert np.allclose([got[n] for n in m5.feature_names], want, atol=1e-9)

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"
    _ok(f"Shapley axiom suite ({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 3. additive-model closed form


def test_acceptance_additive_closed_form(suite_ds):
    model = fit(ModelSpec("GLM", {"l2_penalty": 0.3}), suite_ds, seed=0)
    w = np.asarray(model.coefficients)
    means = suite_ds.feature_matrix.mean(axis=0)
    rng = np.random.default_rng(123)
    n_checked = 0
    for _ in range(120):
        x = rng.uniform(-10, 20, size=4)
        obs = suite_ds.rows[0].__class__(
            values={n: float(x[j]) for j, n in enumerate(suite_ds.feature_names)}
        )
        phi = shapley_values(model, suite_ds, obs)
        for j, name in enumerate(suite_ds.feature_names):
            assert abs(phi[name] - w[j] * (x[j] - means[j])) < 1e-9
        n_checked += 1
    assert n_checked >= 100
    _ok(f"additive closed form ({n_checked} observations)")


# ---------------------------------------------------------------------------
# 4. WMA identity


def _independent_blue_area(expl, importance, interval_set) -> float:
    """classification re-implemented from the interval definitions alone."""
    area = 0.0
    for name in expl.feature_names:
        records = [r for r in expl.records if r.feature == name]
        agree = 0
        for rec in records:
            covering = None
            for iv in interval_set.intervals:
                if iv.feature != name:
                    continue
                lo, hi = iv.feature_range
                inside = (lo <= rec.feature_value <= hi) if iv.closed_low else (lo < rec.feature_value <= hi)
                if inside:
                    covering = iv
                    break
            if covering is not None:
                a, b = covering.target_range
                if a <= rec.expected_value <= b:
                    agree += 1
        area += importance.weights[name] * (agree / len(records))
    return area


def test_acceptance_wma_identity(fixture_bundle):
    assert fixture_bundle.summaries, "pipeline produced no summaries"
    for (model_id, set_name), summary in fixture_bundle.summaries.items():
        recomputed = sum(f.importance_weight * f.agree_fraction for f in summary.features)
        assert abs(summary.wma - recomputed) < 1e-12
        blue = _independent_blue_area(
            fixture_bundle.explanations[model_id],
            fixture_bundle.importances[model_id],
            fixture_bundle.interval_sets[set_name],
        )
        assert abs(summary.wma - blue) < 1e-12
        for f in summary.features:
            total = f.agree_fraction + f.disagree_fraction + f.noknowledge_fraction
            assert abs(total - 1.0) < 1e-12
    _ok(f"WMA identity ({len(fixture_bundle.summaries)} summaries)")


# ---------------------------------------------------------------------------
# 5. selection effect at desk scale


def test_acceptance_selection_effect(fixture_bundle, shift_data):
    _, test_ds, _ = shift_data
    X_test, y_test = test_ds.labeled_arrays()

    def test_rmse(model_id: str) -> float:
        pred = predict_matrix(fixture_bundle.models[model_id], X_test)
        return float(np.sqrt(np.mean((pred - y_test) ** 2)))

    summaries = [fixture_bundle.summaries[(m, "expert")] for m in fixture_bundle.model_ids()]
    ranked = rank_by_wma(summaries, fixture_bundle.board)
    cv_top = fixture_bundle.board[0]
    wma_top = ranked[0]

    cv_top_rmse = test_rmse(cv_top.model_id)
    wma_top_rmse = test_rmse(wma_top.model_id)
    # the central claim: knowledge agreement picks the better-generalizing model
    assert wma_top.model_id != cv_top.model_id
    assert wma_top_rmse < cv_top_rmse

    # golden numbers, frozen after the first verified run
    assert cv_top.model_id == GOLDEN_CV_TOP
    assert wma_top.model_id == GOLDEN_WMA_TOP
    assert cv_top_rmse == pytest.approx(GOLDEN_CV_TOP_TEST_RMSE, rel=1e-6)
    assert wma_top_rmse == pytest.approx(GOLDEN_WMA_TOP_TEST_RMSE, rel=1e-6)
    assert wma_top.wma == pytest.approx(GOLDEN_WMA_TOP_WMA, rel=1e-6)
    improvement = 100.0 * (cv_top_rmse - wma_top_rmse) / cv_top_rmse
    _ok(
        f"selection effect (test RMSE {cv_top_rmse:.4f} -> {wma_top_rmse:.4f}, "
        f"{improvement:.1f}% lower)"
    )


# ---------------------------------------------------------------------------
# 6. determinism


def test_acceptance_determinism(tmp_path, suite_ds):
    config = ShiftConfig(n_train=30, n_test=12)
    train, interest, rules = generate_shift_scenario(config, seed=7)
    inputs = tmp_path / "inputs"
    inputs.mkdir()
    (inputs / "train.csv").write_text(dataset_to_csv(train))
    (inputs / "interest.csv").write_text(dataset_to_csv(interest))
    (inputs / "rules.json").write_text(rule_table_to_json(rules))

    runner = CliRunner()
    digests = []
    for sub in ("run1", "run2"):
        out = tmp_path / sub
        result = runner.invoke(
            cli_main,
            ["run", "--train", str(inputs / "train.csv"), "--interest", str(inputs / "interest.csv"),
             "--rules", str(inputs / "rules.json"), "--target", "GTQ", "--group-tag", "year",
             "--seed", "7", "--k", "3", "--grid", "compact", "--top-per-family", "1",
             "--name", "det", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        digest = {
            str(p.relative_to(out)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(out.rglob("*"))
            if p.is_file()
        }
        digests.append(digest)
    assert digests[0] == digests[1], "rerun with the same seed changed project bytes"

    # leaderboard invariant to dataset row permutation
    grid = GridConfig(
        grids={"GLM": {"l2_penalty": [1e-6, 1.0]}, "TREE": {"max_depth": [2, 4]}},
        k=5,
        seed=11,
    )
    permuted = suite_ds.subset(list(np.random.default_rng(5).permutation(len(suite_ds))))
    board_a = run_automl(suite_ds, grid)
    board_b = run_automl(permuted, grid)
    assert [(e.model_id, e.cv_rmse, e.rank) for e in board_a] == [
        (e.model_id, e.cv_rmse, e.rank) for e in board_b
    ]
    _ok("determinism (byte-identical rerun, permutation-invariant leaderboard)")


# ---------------------------------------------------------------------------
# 7. mini-AutoML sanity


def test_acceptance_automl_sanity(linear_ds):
    grid = GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-8]},
            "TREE": {"max_depth": [3]},
            "GBM": {"n_trees": [20], "learning_rate": [0.2], "max_depth": [2]},
        },
        k=5,
        seed=1,
    )
    board = run_automl(linear_ds, grid)
    assert board[0].spec.family == "GLM"
    assert board[0].cv_rmse < 1e-6

    loo_ds = make_dataset(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 2.0, 3.0]))
    rmse = kfold_rmse(ModelSpec("TREE", {"max_depth": 0}), loo_ds, k=3, seed=7)
    assert rmse == pytest.approx(1.2247, abs=1e-4)
    _ok("mini-AutoML sanity (GLM first at <1e-6; leave-one-out 1.2247)")


# ---------------------------------------------------------------------------
# 8. service/offline equivalence


def test_acceptance_service_offline_equivalence(fixture_bundle, tmp_path):
    root = tmp_path / "served"
    export_project(fixture_bundle, root / fixture_bundle.name)
    client = TestClient(create_app(root))
    n = 0
    for model_id in fixture_bundle.model_ids():
        for set_name in fixture_bundle.interval_sets:
            served = client.get(
                f"/projects/{fixture_bundle.name}/models/{model_id}/summary",
                params={"intervals": set_name},
            )
            assert served.status_code == 200
            offline = summary_doc(fixture_bundle.summaries[(model_id, set_name)])
            assert served.json() == offline  # field-for-field
            n += 1
    assert n == len(fixture_bundle.summaries)
    _ok(f"service/offline equivalence ({n} summaries)")
