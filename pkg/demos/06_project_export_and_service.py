"""
Project bundles and the read-only service
=========================================

Everything the browser frontend needs is precomputed into a directory of
JSON files and served read-only. This demo exports a bundle and walks the
HTTP endpoints in-process (no sockets); `ahmose serve --project-root <dir>`
runs the same app over the network.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from ahmose.automl import GridConfig
from ahmose.project import build_bundle, export_project
from ahmose.scenario import ShiftConfig, generate_shift_scenario
from ahmose.service import create_app

train, test, rules = generate_shift_scenario(ShiftConfig(n_train=40, n_test=16), seed=21)

bundle = build_bundle(
    name="demo-project",
    train=train,
    interest=test,
    rules=rules,
    seed=21,
    grid=GridConfig(
        grids={"GLM": {"l2_penalty": [1e-2]}, "GBM": {"n_trees": [30], "learning_rate": [0.1], "max_depth": [2]}},
        k=4,
        seed=21,
    ),
    top_per_family=1,
)

root = Path(tempfile.mkdtemp(prefix="ahmose_demo_"))
export_project(bundle, root / bundle.name)
print("exported to", root / bundle.name)
for path in sorted((root / bundle.name).rglob("*.json")):
    print("  ", path.relative_to(root))

client = TestClient(create_app(root))

print("\nGET /projects ->", client.get("/projects").json())

doc = client.get("/projects/demo-project").json()
print("leaderboard:", [(e["alias"], e["model_id"], round(e["cv_rmse"], 3)) for e in doc["leaderboard"]])

model_id = doc["models"][0]
summary = client.get(
    f"/projects/demo-project/models/{model_id}/summary", params={"intervals": "expert"}
).json()
print(f"\nsummary for {model_id}: wma = {summary['wma']:.3f}")

# With ?intervals= the explanations endpoint attaches the authoritative
# agreement class to every point, so clients never reclassify.
expl = client.get(
    f"/projects/demo-project/models/{model_id}/explanations", params={"intervals": "expert"}
).json()
classes = {}
for record in expl["records"]:
    classes[record["agreement"]] = classes.get(record["agreement"], 0) + 1
print("served point classes:", classes)

missing = client.get("/projects/demo-project/models/NOPE/explanations")
print("unknown model ->", missing.status_code, missing.json()["code"])
