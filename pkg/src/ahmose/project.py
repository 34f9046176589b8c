"""Project bundles: everything the decision interface needs, precomputed.

A project is a directory of JSON files — dataset descriptor, leaderboard,
serialized models, per-model explanations and importance, interval sets, and
one agreement summary per (model, interval set). Exports are byte-identical
for identical inputs (canonical key order, 17-significant-digit floats), so a
rerun of the same seed writes the same bytes.

``run_pipeline`` composes the whole flow: automl -> top-per-family selection
-> full-data refits -> exact explanations -> interval construction ->
summaries -> export.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .agreement import AgreementSummary, summarize
from .automl import (
    GridConfig,
    LeaderboardEntry,
    default_grid,
    leaderboard_from_doc,
    leaderboard_to_doc,
    run_automl,
    select_top_per_family,
)
from .dataset import Dataset
from .errors import AhmoseError, ProjectError
from .explain import ExplanationSet, ImportanceVector, explain_dataset, feature_importance
from .jsonio import canonical_dumps, loads
from .knowledge import IntervalSet, RuleTable, build_intervals, interval_set_to_json, parse_interval_file
from .models import TrainedModel, fit, model_to_json, parse_model_file

PROJECT_SCHEMA_VERSION = 1

_SAFE_NAME = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class DatasetInfo:
    feature_names: tuple[str, ...]
    target_name: str
    group_tag_name: str | None
    n_background_rows: int
    n_interest_rows: int


@dataclass
class ProjectBundle:
    name: str
    dataset: DatasetInfo
    target_bounds: tuple[float, float]
    board: list[LeaderboardEntry]
    models: dict[str, TrainedModel]
    explanations: dict[str, ExplanationSet]
    importances: dict[str, ImportanceVector]
    interval_sets: dict[str, IntervalSet]
    summaries: dict[tuple[str, str], AgreementSummary] = field(default_factory=dict)

    def model_ids(self) -> list[str]:
        return [e.model_id for e in self.board]


def validate_bundle(bundle: ProjectBundle) -> None:
    """Referential consistency: ids resolve, features exist, summaries complete."""
    if not _SAFE_NAME.match(bundle.name):
        raise ProjectError(f"project name {bundle.name!r} must match {_SAFE_NAME.pattern}")
    ids = bundle.model_ids()
    if len(set(ids)) != len(ids):
        raise ProjectError("duplicate model ids on the leaderboard")
    for collection, kind in (
        (bundle.models, "model"),
        (bundle.explanations, "explanation set"),
        (bundle.importances, "importance vector"),
    ):
        for model_id in ids:
            if model_id not in collection:
                raise ProjectError(f"dangling model id {model_id!r}: no {kind}")
        for model_id in collection:
            if model_id not in ids:
                raise ProjectError(f"{kind} for unknown model id {model_id!r}")
    for name in bundle.interval_sets:
        if not _SAFE_NAME.match(name):
            raise ProjectError(f"interval set name {name!r} must match {_SAFE_NAME.pattern}")
    for model_id, expl in bundle.explanations.items():
        if expl.model_id != model_id:
            raise ProjectError(
                f"explanation set stored under {model_id!r} claims model id {expl.model_id!r}"
            )
        unknown = set(expl.feature_names) - set(bundle.dataset.feature_names)
        if unknown:
            raise ProjectError(f"{model_id}: explanation features {sorted(unknown)} not in dataset")
    for (model_id, set_name), summary in bundle.summaries.items():
        if model_id not in ids:
            raise ProjectError(f"summary for unknown model id {model_id!r}")
        if set_name not in bundle.interval_sets:
            raise ProjectError(f"summary references unknown interval set {set_name!r}")
        if summary.model_id != model_id or summary.interval_set != set_name:
            raise ProjectError(f"summary under ({model_id}, {set_name}) is mislabeled")
    for model_id in ids:
        for set_name in bundle.interval_sets:
            if (model_id, set_name) not in bundle.summaries:
                raise ProjectError(f"missing summary for ({model_id}, {set_name})")


def project_doc(bundle: ProjectBundle) -> dict:
    return {
        "schema_version": PROJECT_SCHEMA_VERSION,
        "kind": "project",
        "name": bundle.name,
        "target_bounds": list(bundle.target_bounds),
        "dataset": {
            "feature_names": list(bundle.dataset.feature_names),
            "target_name": bundle.dataset.target_name,
            "group_tag_name": bundle.dataset.group_tag_name,
            "n_background_rows": bundle.dataset.n_background_rows,
            "n_interest_rows": bundle.dataset.n_interest_rows,
        },
        "leaderboard": leaderboard_to_doc(bundle.board),
        "models": bundle.model_ids(),
        "interval_sets": sorted(bundle.interval_sets),
    }


def explanation_doc(expl: ExplanationSet, importance: ImportanceVector) -> dict:
    doc = expl.to_doc()
    doc["importance"] = dict(importance.weights)
    doc["schema_version"] = PROJECT_SCHEMA_VERSION
    doc["kind"] = "explanations"
    return doc


def summary_doc(summary: AgreementSummary) -> dict:
    doc = summary.to_doc()
    doc["schema_version"] = PROJECT_SCHEMA_VERSION
    doc["kind"] = "summary"
    return doc


def export_project(bundle: ProjectBundle, out_dir: str | Path) -> Path:
    """Write the bundle as a directory of canonical JSON files."""
    validate_bundle(bundle)
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "project.json").write_text(canonical_dumps(project_doc(bundle)), encoding="utf-8")
    for sub in ("models", "explanations", "intervals", "summaries"):
        (root / sub).mkdir(exist_ok=True)
    for model_id, model in sorted(bundle.models.items()):
        (root / "models" / f"{model_id}.json").write_text(model_to_json(model), encoding="utf-8")
    for model_id in bundle.model_ids():
        doc = explanation_doc(bundle.explanations[model_id], bundle.importances[model_id])
        (root / "explanations" / f"{model_id}.json").write_text(
            canonical_dumps(doc), encoding="utf-8"
        )
    for name, interval_set in sorted(bundle.interval_sets.items()):
        (root / "intervals" / f"{name}.json").write_text(
            interval_set_to_json(interval_set), encoding="utf-8"
        )
    for (model_id, set_name), summary in sorted(bundle.summaries.items()):
        (root / "summaries" / f"{model_id}__{set_name}.json").write_text(
            canonical_dumps(summary_doc(summary)), encoding="utf-8"
        )
    return root


def load_project(project_dir: str | Path) -> ProjectBundle:
    """Read and validate a project directory; raises ProjectError on any dangling reference."""
    root = Path(project_dir)
    main_path = root / "project.json"
    if not main_path.is_file():
        raise ProjectError(f"not a project directory (no project.json): {root}")
    doc = loads(main_path.read_text(encoding="utf-8"))
    if doc.get("kind") != "project":
        raise ProjectError(f"{main_path}: expected a 'project' document")
    if doc.get("schema_version") != PROJECT_SCHEMA_VERSION:
        raise ProjectError(
            f"unsupported project schema_version {doc.get('schema_version')!r} "
            f"(reader supports {PROJECT_SCHEMA_VERSION})"
        )
    ds = doc["dataset"]
    info = DatasetInfo(
        feature_names=tuple(ds["feature_names"]),
        target_name=ds["target_name"],
        group_tag_name=ds.get("group_tag_name"),
        n_background_rows=int(ds["n_background_rows"]),
        n_interest_rows=int(ds["n_interest_rows"]),
    )
    board = leaderboard_from_doc(doc["leaderboard"])
    models: dict[str, TrainedModel] = {}
    explanations: dict[str, ExplanationSet] = {}
    importances: dict[str, ImportanceVector] = {}
    for model_id in doc["models"]:
        model_path = root / "models" / f"{model_id}.json"
        expl_path = root / "explanations" / f"{model_id}.json"
        if not model_path.is_file():
            raise ProjectError(f"dangling model id {model_id!r}: missing {model_path.name}")
        if not expl_path.is_file():
            raise ProjectError(f"dangling model id {model_id!r}: missing explanations file")
        models[model_id] = parse_model_file(model_path.read_text(encoding="utf-8"))
        expl_doc = loads(expl_path.read_text(encoding="utf-8"))
        expl = ExplanationSet.from_doc(expl_doc)
        if expl.model_id != model_id:
            raise ProjectError(
                f"dangling model id {model_id!r}: explanations file claims {expl.model_id!r}"
            )
        explanations[model_id] = expl
        importances[model_id] = ImportanceVector(model_id=model_id, weights=expl_doc["importance"])
    interval_sets: dict[str, IntervalSet] = {}
    for name in doc["interval_sets"]:
        path = root / "intervals" / f"{name}.json"
        if not path.is_file():
            raise ProjectError(f"dangling interval set {name!r}: missing {path.name}")
        interval_sets[name] = parse_interval_file(path.read_text(encoding="utf-8"))
    summaries: dict[tuple[str, str], AgreementSummary] = {}
    for model_id in doc["models"]:
        for set_name in doc["interval_sets"]:
            path = root / "summaries" / f"{model_id}__{set_name}.json"
            if not path.is_file():
                raise ProjectError(f"missing summary file for ({model_id}, {set_name})")
            summaries[(model_id, set_name)] = AgreementSummary.from_doc(
                loads(path.read_text(encoding="utf-8"))
            )
    bundle = ProjectBundle(
        name=doc["name"],
        dataset=info,
        target_bounds=tuple(doc["target_bounds"]),
        board=board,
        models=models,
        explanations=explanations,
        importances=importances,
        interval_sets=interval_sets,
        summaries=summaries,
    )
    validate_bundle(bundle)
    return bundle


class PipelineStageError(AhmoseError):
    """An error tagged with the pipeline stage it occurred in."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(message)
        self.stage = stage


def _stage(stage: str, exc: Exception) -> PipelineStageError:
    return PipelineStageError(stage, f"[{stage}] {exc}")


def _model_seed(seed: int, rank: int) -> int:
    return int(np.random.SeedSequence([seed, rank]).generate_state(1)[0])


def build_bundle(
    name: str,
    train: Dataset,
    interest: Dataset,
    rules: RuleTable,
    seed: int,
    grid: GridConfig | None = None,
    top_per_family: int = 2,
    radius: float = 0.5,
    target_bounds: tuple[float, float] = (1.0, 5.0),
    interval_set_name: str = "expert",
) -> ProjectBundle:
    """Run the full analysis and assemble an in-memory project bundle."""
    grid = grid if grid is not None else default_grid(seed=seed)
    try:
        board = run_automl(train, grid)
    except AhmoseError as exc:
        raise _stage("automl", exc) from exc
    if not board:
        raise PipelineStageError("automl", "[automl] every grid point failed to fit")
    try:
        selected = select_top_per_family(board, top_per_family)
    except AhmoseError as exc:
        raise _stage("select", exc) from exc
    models: dict[str, TrainedModel] = {}
    try:
        for entry in selected:
            models[entry.model_id] = fit(entry.spec, train, _model_seed(seed, entry.rank))
    except AhmoseError as exc:
        raise _stage("fit", exc) from exc
    explanations: dict[str, ExplanationSet] = {}
    importances: dict[str, ImportanceVector] = {}
    try:
        for entry in selected:
            expl = explain_dataset(
                models[entry.model_id], train, interest, model_id=entry.model_id
            )
            explanations[entry.model_id] = expl
            importances[entry.model_id] = feature_importance(expl)
    except AhmoseError as exc:
        raise _stage("explain", exc) from exc
    try:
        intervals = build_intervals(
            rules, radius=radius, target_bounds=target_bounds, name=interval_set_name
        )
    except AhmoseError as exc:
        raise _stage("knowledge", exc) from exc
    summaries: dict[tuple[str, str], AgreementSummary] = {}
    try:
        for entry in selected:
            summaries[(entry.model_id, intervals.name)] = summarize(
                explanations[entry.model_id], importances[entry.model_id], intervals
            )
    except AhmoseError as exc:
        raise _stage("score", exc) from exc
    return ProjectBundle(
        name=name,
        dataset=DatasetInfo(
            feature_names=train.feature_names,
            target_name=train.target_name,
            group_tag_name=train.group_tag_name,
            n_background_rows=len(train),
            n_interest_rows=len(interest),
        ),
        target_bounds=target_bounds,
        board=selected,
        models=models,
        explanations=explanations,
        importances=importances,
        interval_sets={intervals.name: intervals},
        summaries=summaries,
    )


def run_pipeline(
    name: str,
    train: Dataset,
    interest: Dataset,
    rules: RuleTable,
    seed: int,
    out_dir: str | Path,
    **kwargs,
) -> ProjectBundle:
    """build_bundle + export; the CLI entry point for `ahmose run`."""
    bundle = build_bundle(name, train, interest, rules, seed, **kwargs)
    try:
        export_project(bundle, Path(out_dir) / name)
    except AhmoseError as exc:
        raise _stage("export", exc) from exc
    return bundle
