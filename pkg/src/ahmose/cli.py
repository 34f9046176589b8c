"""Command line interface: `ahmose <command>`.

Commands mirror the pipeline stages: data validation and synthesis, the
mini-AutoML leaderboard, knowledge interval construction, agreement scoring,
the full end-to-end run, and the read-only project service.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import automl as automl_mod
from .agreement import rank_by_wma, summarize
from .dataset import dataset_to_csv, parse_dataset
from .errors import AhmoseError
from .explain import feature_importance
from .jsonio import canonical_dumps
from .knowledge import build_intervals, parse_interval_file, parse_rule_file, rule_table_to_json
from .project import PipelineStageError, load_project, run_pipeline
from .scenario import ShiftConfig, generate_shift_scenario
from .service import serve as serve_service


def _fail(stage: str, message: str) -> None:
    click.echo(f"error [{stage}]: {message}", err=True)
    sys.exit(1)


def _read(path: str, stage: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(stage, f"cannot read {path}: {exc}")


@click.group()
@click.version_option(package_name="ahmose")
def main() -> None:
    """Knowledge-augmented model selection for regression."""


@main.group()
def data() -> None:
    """Dataset utilities."""


@data.command()
@click.argument("file", type=click.Path())
@click.option("--target", required=True, help="Name of the target column.")
@click.option("--group-tag", default=None, help="Optional group tag column (e.g. year).")
def validate(file: str, target: str, group_tag: str | None) -> None:
    """Validate a CSV dataset and print its shape."""
    text = _read(file, "data")
    try:
        ds = parse_dataset(text, target_name=target, group_tag_name=group_tag)
    except AhmoseError as exc:
        _fail("data", str(exc))
    click.echo(
        f"ok: {len(ds)} rows ({ds.n_labeled} labeled), "
        f"{len(ds.feature_names)} features: {', '.join(ds.feature_names)}"
    )


@data.command()
@click.option("--seed", type=int, default=93, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
def synth(seed: int, out: str) -> None:
    """Generate the synthetic shift scenario (train.csv, test.csv, rules.json)."""
    try:
        train, test, rules = generate_shift_scenario(ShiftConfig(), seed=seed)
    except AhmoseError as exc:
        _fail("synth", str(exc))
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "train.csv").write_text(dataset_to_csv(train), encoding="utf-8")
    (out_dir / "test.csv").write_text(dataset_to_csv(test), encoding="utf-8")
    (out_dir / "rules.json").write_text(rule_table_to_json(rules), encoding="utf-8")
    click.echo(f"wrote train.csv ({len(train)} rows), test.csv ({len(test)} rows), rules.json")


def _grid_for(name: str, seed: int, k: int) -> automl_mod.GridConfig:
    if name == "default":
        return automl_mod.default_grid(seed=seed, k=k)
    if name == "compact":
        return automl_mod.GridConfig(
            grids={
                "GLM": {"l2_penalty": [1e-6, 1e-2, 1.0]},
                "TREE": {"max_depth": [3, 5]},
                "DRF": {"n_trees": [25], "max_depth": [5], "feature_subsample_fraction": [0.75, 1.0]},
                "GBM": {"n_trees": [50], "learning_rate": [0.1], "max_depth": [2, 3]},
            },
            k=k,
            seed=seed,
        )
    _fail("automl", f"unknown grid {name!r} (choices: default, compact)")


@main.command()
@click.option("--train", "train_path", required=True, type=click.Path())
@click.option("--target", required=True)
@click.option("--group-tag", default=None)
@click.option("--seed", type=int, default=93, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--top-per-family", type=int, default=2, show_default=True)
@click.option("--grid", default="default", show_default=True, help="default or compact")
@click.option("--out", default=None, type=click.Path(), help="Directory for leaderboard.json.")
def automl(
    train_path: str,
    target: str,
    group_tag: str | None,
    seed: int,
    k: int,
    top_per_family: int,
    grid: str,
    out: str | None,
) -> None:
    """Rank a hyperparameter grid by k-fold cross-validated RMSE."""
    text = _read(train_path, "data")
    try:
        ds = parse_dataset(text, target_name=target, group_tag_name=group_tag)
        config = _grid_for(grid, seed, k)
        board = automl_mod.run_automl(ds, config)
        selected = automl_mod.select_top_per_family(board, top_per_family)
    except AhmoseError as exc:
        _fail("automl", str(exc))
    click.echo(automl_mod.format_leaderboard(board))
    click.echo(f"\nselected top {top_per_family} per family:")
    click.echo(automl_mod.format_leaderboard(selected))
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "leaderboard.json").write_text(
            canonical_dumps(automl_mod.leaderboard_to_doc(board)), encoding="utf-8"
        )
        (out_dir / "selected.json").write_text(
            canonical_dumps(automl_mod.leaderboard_to_doc(selected)), encoding="utf-8"
        )
        click.echo(f"\nwrote {out_dir}/leaderboard.json and {out_dir}/selected.json")


@main.group()
def knowledge() -> None:
    """Expert knowledge utilities."""


@knowledge.command()
@click.option("--rules", "rules_path", required=True, type=click.Path())
@click.option("--radius", type=float, default=0.5, show_default=True)
@click.option("--bounds", type=(float, float), default=(1.0, 5.0), show_default=True)
@click.option("--name", default="expert", show_default=True)
@click.option("--out", required=True, type=click.Path())
def build(rules_path: str, radius: float, bounds: tuple[float, float], name: str, out: str) -> None:
    """Build knowledge intervals from a weighted rule table."""
    text = _read(rules_path, "knowledge")
    try:
        rules = parse_rule_file(text)
        interval_set = build_intervals(rules, radius=radius, target_bounds=bounds, name=name)
    except AhmoseError as exc:
        _fail("knowledge", str(exc))
    from .knowledge import interval_set_to_json

    Path(out).write_text(interval_set_to_json(interval_set), encoding="utf-8")
    click.echo(f"wrote {len(interval_set.intervals)} intervals to {out}")


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path())
@click.option(
    "--intervals",
    "intervals_ref",
    required=True,
    help="Interval set name in the project, or a path to an interval set file.",
)
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of a table.")
def score(project_dir: str, intervals_ref: str, as_json: bool) -> None:
    """Rank a project's models by weighted mean agreement (WMA)."""
    try:
        bundle = load_project(project_dir)
    except AhmoseError as exc:
        _fail("score", str(exc))
    path = Path(intervals_ref)
    try:
        if path.is_file():
            interval_set = parse_interval_file(path.read_text(encoding="utf-8"))
        elif intervals_ref in bundle.interval_sets:
            interval_set = bundle.interval_sets[intervals_ref]
        else:
            _fail("score", f"{intervals_ref!r} is neither a file nor an interval set in the project")
        summaries = [
            summarize(bundle.explanations[mid], bundle.importances[mid], interval_set)
            for mid in bundle.model_ids()
        ]
        ranked = rank_by_wma(summaries, bundle.board)
    except AhmoseError as exc:
        _fail("score", str(exc))
    if as_json:
        click.echo(
            canonical_dumps(
                [
                    {"model_id": r.model_id, "alias": r.alias, "wma": r.wma, "cv_rmse": r.cv_rmse}
                    for r in ranked
                ]
            ),
            nl=False,
        )
    else:
        click.echo(f"{'alias':<6} {'model_id':<24} {'wma':>8} {'cv_rmse':>10}")
        for r in ranked:
            click.echo(f"{r.alias:<6} {r.model_id:<24} {r.wma:>8.3f} {r.cv_rmse:>10.4f}")


@main.command()
@click.option("--train", "train_path", required=True, type=click.Path())
@click.option("--interest", "interest_path", required=True, type=click.Path())
@click.option("--rules", "rules_path", required=True, type=click.Path())
@click.option("--target", default="GTQ", show_default=True)
@click.option("--group-tag", default=None)
@click.option("--seed", type=int, default=93, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--top-per-family", type=int, default=2, show_default=True)
@click.option("--grid", default="default", show_default=True, help="default or compact")
@click.option("--radius", type=float, default=0.5, show_default=True)
@click.option("--bounds", type=(float, float), default=(1.0, 5.0), show_default=True)
@click.option("--name", default="project", show_default=True, help="Project name.")
@click.option("--out", required=True, type=click.Path(), help="Directory to export into.")
def run(
    train_path: str,
    interest_path: str,
    rules_path: str,
    target: str,
    group_tag: str | None,
    seed: int,
    k: int,
    top_per_family: int,
    grid: str,
    radius: float,
    bounds: tuple[float, float],
    name: str,
    out: str,
) -> None:
    """Full pipeline: automl, explanations, knowledge intervals, summaries, export."""
    train_text = _read(train_path, "data")
    interest_text = _read(interest_path, "data")
    rules_text = _read(rules_path, "knowledge")
    try:
        train = parse_dataset(train_text, target_name=target, group_tag_name=group_tag)
        interest = parse_dataset(interest_text, target_name=target, group_tag_name=group_tag)
    except AhmoseError as exc:
        _fail("data", str(exc))
    try:
        rules = parse_rule_file(rules_text)
    except AhmoseError as exc:
        _fail("knowledge", str(exc))
    try:
        bundle = run_pipeline(
            name=name,
            train=train,
            interest=interest,
            rules=rules,
            seed=seed,
            out_dir=out,
            grid=_grid_for(grid, seed, k),
            top_per_family=top_per_family,
            radius=radius,
            target_bounds=bounds,
        )
    except PipelineStageError as exc:
        _fail(exc.stage, str(exc))
    except AhmoseError as exc:
        _fail("run", str(exc))
    click.echo(
        f"exported project {name!r} with {len(bundle.board)} models to {Path(out) / name}"
    )


@main.command()
@click.option("--project-root", required=True, type=click.Path())
@click.option("--bind", default=None, help=f"HOST:PORT (or env AHMOSE_BIND).")
def serve(project_root: str, bind: str | None) -> None:
    """Serve exported projects over read-only HTTP/JSON."""
    try:
        serve_service(project_root, bind)
    except AhmoseError as exc:
        _fail("serve", str(exc))
    except OSError as exc:
        _fail("serve", f"cannot bind: {exc}")
