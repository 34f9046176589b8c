from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from ahmose.automl import GridConfig
from ahmose.dataset import Dataset
from ahmose.knowledge import RuleTable, build_intervals, parse_rule_file
from ahmose.project import ProjectBundle, build_bundle
from ahmose.scenario import generate_shift_scenario

from helpers import make_dataset

REPO_ROOT = Path(__file__).resolve().parent.parent
RULES_PATH = REPO_ROOT / "docs" / "examples" / "grape_quality_rules.json"

SCENARIO_SEED = 93


@pytest.fixture(scope="session")
def expert_rules() -> RuleTable:
    return parse_rule_file(RULES_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def expert_intervals(expert_rules):
    return build_intervals(expert_rules, radius=0.5, target_bounds=(1.0, 5.0), name="expert")


@pytest.fixture(scope="session")
def shift_data():
    """(train, test, truth_rules) for the committed scenario seed."""
    return generate_shift_scenario(seed=SCENARIO_SEED)


@pytest.fixture(scope="session")
def linear_ds() -> Dataset:
    """Noiseless y = 2*x1 + 1 over 4 independent features."""
    rng = np.random.default_rng(11)
    X = rng.uniform(-3, 3, size=(60, 4))
    y = 2.0 * X[:, 0] + 1.0
    return make_dataset(X, y)


@pytest.fixture(scope="session")
def suite_ds() -> Dataset:
    """50-row, 4-feature nonlinear dataset used by the explanation axiom suite."""
    rng = np.random.default_rng(7)
    X = rng.uniform(0, 10, size=(50, 4))
    y = (
        0.8 * X[:, 0]
        - 0.5 * X[:, 1]
        + 0.3 * X[:, 2] * (X[:, 2] > 5)
        + 0.2 * np.sin(X[:, 3])
        + rng.normal(0, 0.3, size=50)
    )
    return make_dataset(X, y)


def compact_grid(seed: int, k: int = 5) -> GridConfig:
    return GridConfig(
        grids={
            "GLM": {"l2_penalty": [1e-6, 1e-2, 1.0]},
            "TREE": {"max_depth": [3, 5]},
            "DRF": {"n_trees": [25], "max_depth": [5], "feature_subsample_fraction": [0.75, 1.0]},
            "GBM": {"n_trees": [50], "learning_rate": [0.1], "max_depth": [2, 3]},
        },
        k=k,
        seed=seed,
    )


@pytest.fixture(scope="session")
def fixture_bundle(shift_data) -> ProjectBundle:
    """Full pipeline on the committed scenario: the shared end-to-end fixture."""
    train, test, truth_rules = shift_data
    return build_bundle(
        name="grape-shift-93",
        train=train,
        interest=test,
        rules=truth_rules,
        seed=SCENARIO_SEED,
        grid=compact_grid(SCENARIO_SEED),
        top_per_family=2,
        radius=0.5,
        target_bounds=(1.0, 5.0),
        interval_set_name="expert",
    )
