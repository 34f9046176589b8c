"""Tabular regression datasets: ingestion, validation, group splits.

CSV is the canonical input: UTF-8, '.' decimal separator, header row. Every
feature cell must hold a finite number; the target cell may be empty, which
marks the row as unlabeled "data of interest" (rows on which explanations are
computed without ground truth). Missing feature values are rejected outright
so model value functions stay well defined.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError


@dataclass(frozen=True)
class Observation:
    """One row: feature values, optional target, optional group tag (e.g. a year)."""

    values: dict[str, float]
    target: float | None = None
    group_tag: str | None = None

    @property
    def labeled(self) -> bool:
        return self.target is not None


@dataclass(frozen=True)
class Dataset:
    feature_names: tuple[str, ...]
    target_name: str
    rows: tuple[Observation, ...]
    group_tag_name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "rows", tuple(self.rows))
        if len(self.feature_names) < 1:
            raise DatasetError("dataset needs at least one feature")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DatasetError("duplicate feature names")
        if any(not name for name in self.feature_names):
            raise DatasetError("empty feature name")
        for i, row in enumerate(self.rows):
            if set(row.values) != set(self.feature_names):
                raise DatasetError(
                    f"row {i}: feature keys {sorted(row.values)} do not match dataset features"
                )
            for name in self.feature_names:
                v = row.values[name]
                if not math.isfinite(v):
                    raise DatasetError(f"row {i}: non-finite value {v!r} for feature {name!r}")
            if row.target is not None and not math.isfinite(row.target):
                raise DatasetError(f"row {i}: non-finite target {row.target!r}")
        X = np.array(
            [[row.values[name] for name in self.feature_names] for row in self.rows],
            dtype=float,
        ).reshape(len(self.rows), len(self.feature_names))
        y = np.array(
            [row.target if row.target is not None else np.nan for row in self.rows],
            dtype=float,
        )
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "_X", X)
        object.__setattr__(self, "_y", y)

    @property
    def feature_matrix(self) -> np.ndarray:
        """(n_rows, n_features) float matrix, column order = feature_names."""
        return self._X

    @property
    def targets(self) -> np.ndarray:
        """(n_rows,) float vector; NaN marks unlabeled rows."""
        return self._y

    @property
    def labeled_mask(self) -> np.ndarray:
        return ~np.isnan(self._y)

    @property
    def n_labeled(self) -> int:
        return int(self.labeled_mask.sum())

    def __len__(self) -> int:
        return len(self.rows)

    def labeled_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        mask = self.labeled_mask
        return self._X[mask], self._y[mask]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(
            feature_names=self.feature_names,
            target_name=self.target_name,
            rows=tuple(self.rows[i] for i in indices),
            group_tag_name=self.group_tag_name,
        )


def _parse_cell(text: str, column: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"line {line}: non-numeric cell {text!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise DatasetError(f"line {line}: non-finite value {text!r} in column {column!r}")
    return value


def parse_dataset(csv_text: str, target_name: str, group_tag_name: str | None = None) -> Dataset:
    """Parse CSV text into a validated Dataset.

    Column order is preserved as feature order; the target and group-tag
    columns are pulled out of the feature set. An empty target cell yields an
    unlabeled observation; an empty feature cell is an error.
    """
    try:
        reader = csv.reader(io.StringIO(csv_text))
        table = list(reader)
    except csv.Error as exc:
        raise DatasetError(f"malformed CSV: {exc}") from exc
    if not table:
        raise DatasetError("empty CSV: missing header row")
    header = [h.strip() for h in table[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DatasetError(f"duplicate column names: {dupes}")
    if target_name not in header:
        raise DatasetError(f"target column {target_name!r} not in header {header}")
    if group_tag_name is not None and group_tag_name not in header:
        raise DatasetError(f"group tag column {group_tag_name!r} not in header {header}")
    feature_names = tuple(h for h in header if h != target_name and h != group_tag_name)
    if not feature_names:
        raise DatasetError("no feature columns left after removing target/group columns")
    col_index = {h: i for i, h in enumerate(header)}

    rows: list[Observation] = []
    for line_no, cells in enumerate(table[1:], start=2):
        if not cells or all(c.strip() == "" for c in cells):
            continue  # blank line
        if len(cells) != len(header):
            raise DatasetError(f"line {line_no}: expected {len(header)} cells, got {len(cells)}")
        values: dict[str, float] = {}
        for name in feature_names:
            cell = cells[col_index[name]].strip()
            if cell == "":
                raise DatasetError(f"line {line_no}: missing value for feature {name!r}")
            values[name] = _parse_cell(cell, name, line_no)
        target_cell = cells[col_index[target_name]].strip()
        target = None if target_cell == "" else _parse_cell(target_cell, target_name, line_no)
        group_tag = None
        if group_tag_name is not None:
            tag_cell = cells[col_index[group_tag_name]].strip()
            if tag_cell == "":
                raise DatasetError(f"line {line_no}: missing group tag {group_tag_name!r}")
            group_tag = tag_cell
        rows.append(Observation(values=values, target=target, group_tag=group_tag))

    if len(rows) < 2:
        raise DatasetError(f"dataset needs at least 2 rows, got {len(rows)}")
    return Dataset(
        feature_names=feature_names,
        target_name=target_name,
        rows=tuple(rows),
        group_tag_name=group_tag_name,
    )


def dataset_to_csv(ds: Dataset) -> str:
    """Serialize back to canonical CSV (shortest round-trip float repr)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = list(ds.feature_names) + [ds.target_name]
    if ds.group_tag_name is not None:
        header.append(ds.group_tag_name)
    writer.writerow(header)
    for row in ds.rows:
        cells = [repr(row.values[name]) for name in ds.feature_names]
        cells.append("" if row.target is None else repr(row.target))
        if ds.group_tag_name is not None:
            cells.append(row.group_tag or "")
        writer.writerow(cells)
    return out.getvalue()


def split_by_group(
    ds: Dataset, train_groups: Iterable[str], test_groups: Iterable[str]
) -> tuple[Dataset, Dataset]:
    """Partition rows by group tag; rows in neither set are dropped."""
    train_set = set(train_groups)
    test_set = set(test_groups)
    overlap = train_set & test_set
    if overlap:
        raise DatasetError(f"train and test groups overlap: {sorted(overlap)}")
    for i, row in enumerate(ds.rows):
        if row.group_tag is None:
            raise DatasetError(f"row {i} has no group tag; cannot split by group")
    train_idx = [i for i, row in enumerate(ds.rows) if row.group_tag in train_set]
    test_idx = [i for i, row in enumerate(ds.rows) if row.group_tag in test_set]
    if not train_idx:
        raise DatasetError(f"empty train partition for groups {sorted(train_set)}")
    return ds.subset(train_idx), ds.subset(test_idx)


def concat(datasets: Sequence[Dataset]) -> Dataset:
    """Stack datasets sharing the same schema (used to build multi-year fixtures)."""
    if not datasets:
        raise DatasetError("nothing to concatenate")
    first = datasets[0]
    for ds in datasets[1:]:
        if ds.feature_names != first.feature_names or ds.target_name != first.target_name:
            raise DatasetError("schema mismatch in concat")
        if ds.group_tag_name != first.group_tag_name:
            raise DatasetError("group tag mismatch in concat")
    rows: list[Observation] = []
    for ds in datasets:
        rows.extend(ds.rows)
    return Dataset(
        feature_names=first.feature_names,
        target_name=first.target_name,
        rows=tuple(rows),
        group_tag_name=first.group_tag_name,
    )
