"""Read-only JSON service over a directory of exported projects.

Serves precomputed bundles only — no endpoint trains, recomputes, or mutates
anything. Agreement classes for individual explanation points are attached by
the service (``?intervals=`` on the explanations endpoint) so clients render
served classes instead of reimplementing the classification.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse

from .agreement import classify_record
from .errors import ProjectError
from .jsonio import loads
from .knowledge import IntervalSet
from .project import ProjectBundle, explanation_doc, load_project, project_doc, summary_doc

DEFAULT_BIND = "127.0.0.1:8765"
BIND_ENV_VAR = "AHMOSE_BIND"


def _not_found(code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"code": code, "detail": detail})


def discover_projects(project_root: str | Path) -> dict[str, ProjectBundle]:
    """Load every subdirectory of ``project_root`` that holds a project.json."""
    root = Path(project_root)
    if not root.is_dir():
        raise ProjectError(f"project root {root} is not a directory")
    bundles: dict[str, ProjectBundle] = {}
    for child in sorted(root.iterdir()):
        if child.is_dir() and (child / "project.json").is_file():
            bundle = load_project(child)
            if bundle.name in bundles:
                raise ProjectError(f"duplicate project name {bundle.name!r} under {root}")
            bundles[bundle.name] = bundle
    if not bundles:
        raise ProjectError(f"no projects found under {root}")
    return bundles


def create_app(project_root: str | Path) -> FastAPI:
    bundles = discover_projects(project_root)
    app = FastAPI(title="ahmose project service")

    def get_bundle(p: str) -> ProjectBundle | None:
        return bundles.get(p)

    @app.get("/projects")
    def list_projects():
        return sorted(bundles)

    @app.get("/projects/{p}")
    def get_project(p: str):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        return project_doc(bundle)

    @app.get("/projects/{p}/intervals")
    def list_interval_sets(p: str):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        return sorted(bundle.interval_sets)

    @app.get("/projects/{p}/intervals/{i}")
    def get_interval_set(p: str, i: str):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        interval_set = bundle.interval_sets.get(i)
        if interval_set is None:
            return _not_found("interval_set_not_found", f"unknown interval set {i!r}")
        return loads(_interval_set_json(interval_set))

    @app.get("/projects/{p}/models")
    def list_models(p: str):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        return project_doc(bundle)["leaderboard"]

    @app.get("/projects/{p}/models/{m}/explanations")
    def get_explanations(p: str, m: str, intervals: str | None = Query(default=None)):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        if m not in bundle.explanations:
            return _not_found("model_not_found", f"unknown model {m!r}")
        doc = explanation_doc(bundle.explanations[m], bundle.importances[m])
        if intervals is not None:
            interval_set = bundle.interval_sets.get(intervals)
            if interval_set is None:
                return _not_found("interval_set_not_found", f"unknown interval set {intervals!r}")
            for record in doc["records"]:
                record["agreement"] = classify_record(
                    interval_set,
                    record["feature"],
                    record["feature_value"],
                    record["expected_value"],
                ).value
        return doc

    @app.get("/projects/{p}/models/{m}/summary")
    def get_summary(p: str, m: str, intervals: str = Query(...)):
        bundle = get_bundle(p)
        if bundle is None:
            return _not_found("project_not_found", f"unknown project {p!r}")
        if m not in bundle.explanations:
            return _not_found("model_not_found", f"unknown model {m!r}")
        summary = bundle.summaries.get((m, intervals))
        if summary is None:
            return _not_found("interval_set_not_found", f"unknown interval set {intervals!r}")
        return summary_doc(summary)

    return app


def _interval_set_json(interval_set: IntervalSet) -> str:
    from .knowledge import interval_set_to_json

    return interval_set_to_json(interval_set)


def parse_bind(bind: str | None) -> tuple[str, int]:
    raw = bind or os.environ.get(BIND_ENV_VAR, DEFAULT_BIND)
    host, _, port = raw.rpartition(":")
    if not host or not port.isdigit():
        raise ProjectError(f"bind address must look like HOST:PORT, got {raw!r}")
    return host, int(port)


def serve(project_root: str | Path, bind: str | None = None) -> None:
    """Run the read-only service with uvicorn (blocking)."""
    import uvicorn

    host, port = parse_bind(bind)
    uvicorn.run(create_app(project_root), host=host, port=port, log_level="info")
