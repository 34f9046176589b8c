"""Regenerate the committed service-response fixtures for the frontend tests.

Runs the full pipeline on the committed scenario (seed 93), exports it, and
captures real HTTP responses. Rerun after any change to the service schema:

    python3 frontend/scripts/capture_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from ahmose.automl import GridConfig
from ahmose.project import build_bundle, export_project
from ahmose.scenario import generate_shift_scenario
from ahmose.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
PROJECT = "grape-shift-93"
MODELS = ("GLM_grid_1", "GBM_grid_0")  # WMA winner and CV winner


def main() -> None:
    train, test, rules = generate_shift_scenario(seed=93)
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
    bundle = build_bundle(PROJECT, train, test, rules, seed=93, grid=grid, top_per_family=2)
    root = Path(tempfile.mkdtemp(prefix="fixture_capture_"))
    export_project(bundle, root / PROJECT)
    client = TestClient(create_app(root))

    def save(name: str, url: str, params: dict | None = None) -> None:
        response = client.get(url, params=params)
        response.raise_for_status()
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(response.json(), sort_keys=True, indent=1) + "\n")
        print("wrote", path.relative_to(OUT.parent.parent))

    OUT.mkdir(parents=True, exist_ok=True)
    save("projects", "/projects")
    save("project", f"/projects/{PROJECT}")
    save("interval_sets", f"/projects/{PROJECT}/intervals")
    save("intervals_expert", f"/projects/{PROJECT}/intervals/expert")
    save("models", f"/projects/{PROJECT}/models")
    for model_id in MODELS:
        save(
            f"explanations_{model_id}",
            f"/projects/{PROJECT}/models/{model_id}/explanations",
            {"intervals": "expert"},
        )
        save(
            f"summary_{model_id}",
            f"/projects/{PROJECT}/models/{model_id}/summary",
            {"intervals": "expert"},
        )


if __name__ == "__main__":
    main()
