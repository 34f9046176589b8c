"""Synthetic distribution-shift scenario generator.

Produces a train/test pair over a labeled interval grid together with the
ground truth encoded as a weighted IF-THEN rule table, so the full
select-by-knowledge workflow can be exercised end to end without any field
data. The training sampler concentrates on "typical" grid cells while the
test sampler emphasizes cells underrepresented in training — the situation
where cross-validation scores mislead and expert knowledge helps.

Everything is a pure function of (config, seed): two runs produce
byte-identical datasets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dataset import Dataset, Observation
from .errors import DatasetError
from .knowledge import GridFeature, Rule, RuleTable

_DEFAULT_GRID = (
    GridFeature("Anth", ("L", "M", "H", "VH"), (200.0, 600.0, 800.0, 1000.0, 1400.0)),
    GridFeature("BW", ("L", "M", "H"), (1.0, 1.6, 2.0, 2.5)),
    GridFeature("TSS", ("L", "H"), (15.0, 21.0, 30.0)),
    GridFeature("TA", ("L", "M", "H"), (3.0, 5.0, 7.0, 12.0)),
)

_DEFAULT_TRUTH_COEFFICIENTS = {"Anth": 0.5, "BW": -0.2, "TSS": 0.15, "TA": 0.05}

# localized structure in the training-dense corner: flexible models can fit
# it (and win cross-validation), but it carries no information about the
# shifted region
_DEFAULT_TRUTH_BUMPS = (
    ({"Anth": "L", "BW": "H"}, -0.10),
    ({"Anth": "L", "TSS": "L"}, 0.12),
    ({"Anth": "M", "BW": "M"}, 0.08),
)

_DEFAULT_TRAIN_BIAS = {"Anth": "low", "BW": "high"}


@dataclass(frozen=True)
class ShiftConfig:
    """Knobs for the synthetic scenario; defaults give a 4-feature, 72-cell grid."""

    features: tuple[GridFeature, ...] = _DEFAULT_GRID
    target_name: str = "GTQ"
    target_bounds: tuple[float, float] = (1.0, 5.0)
    n_train: int = 96
    n_test: int = 48
    noise: float = 0.25
    # training concentrates on one end of the biased features' ranges;
    # features absent from the mapping are sampled uniformly
    train_bias: Mapping[str, str] = field(default_factory=lambda: dict(_DEFAULT_TRAIN_BIAS))
    bias_strength: float = 0.45
    # floor (as a share of the max training weight) in the inverse test
    # weighting; smaller values shift the test harder off the training region
    test_overlap: float = 0.05
    # slope of the ground truth per feature, in units of full feature range
    truth_coefficients: Mapping[str, float] = field(
        default_factory=lambda: dict(_DEFAULT_TRUTH_COEFFICIENTS)
    )
    # (label assignment subset, amplitude): added when a cell matches every
    # listed label; amplitudes are in normalized target units
    truth_bumps: tuple[tuple[Mapping[str, str], float], ...] = _DEFAULT_TRUTH_BUMPS
    train_group_tags: tuple[str, ...] = ("2010", "2011")
    test_group_tag: str = "2012"
    group_tag_name: str = "year"

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "train_bias", dict(self.train_bias))
        object.__setattr__(self, "truth_coefficients", dict(self.truth_coefficients))
        object.__setattr__(
            self, "truth_bumps", tuple((dict(labels), float(amp)) for labels, amp in self.truth_bumps)
        )
        if not self.features:
            raise DatasetError("degenerate config: empty feature grid")
        if self.n_train < 2 or self.n_test < 1:
            raise DatasetError("degenerate config: need n_train >= 2 and n_test >= 1")
        if self.noise < 0:
            raise DatasetError(f"noise must be >= 0, got {self.noise}")
        if not 0 < self.bias_strength <= 1:
            raise DatasetError("bias_strength must be in (0, 1]")
        for f in self.features:
            if self.train_bias.get(f.name, "none") not in ("low", "high", "none"):
                raise DatasetError(f"train_bias for {f.name!r} must be 'low', 'high' or 'none'")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)


def _cells(config: ShiftConfig) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(len(f.labels)) for f in config.features)))


def truth_output(config: ShiftConfig, cell: tuple[int, ...]) -> float:
    """Piecewise-constant ground truth for one grid cell, inside target bounds.

    The trend is linear in the cell-center position of each feature (in
    feature units, so a linear model can extrapolate it), plus the configured
    local bumps.
    """
    lo, hi = config.target_bounds
    score = 0.5
    for f, index in zip(config.features, cell):
        center = (f.edges[index] + f.edges[index + 1]) / 2.0
        position = (center - f.edges[0]) / (f.edges[-1] - f.edges[0])
        score += config.truth_coefficients.get(f.name, 0.0) * (position - 0.5)
    for labels, amplitude in config.truth_bumps:
        if all(
            f.labels[index] == labels[f.name]
            for f, index in zip(config.features, cell)
            if f.name in labels
        ):
            score += amplitude
    score = min(max(score, 0.0), 1.0)
    return lo + (hi - lo) * score


def _train_cell_weights(config: ShiftConfig, cells: list[tuple[int, ...]]) -> np.ndarray:
    weights = np.ones(len(cells))
    for j, f in enumerate(config.features):
        n_labels = len(f.labels)
        bias = config.train_bias.get(f.name, "none")
        if bias == "none":
            continue
        for c, cell in enumerate(cells):
            rank = cell[j] if bias == "low" else (n_labels - 1 - cell[j])
            weights[c] *= config.bias_strength**rank
    return weights / weights.sum()


def _test_cell_weights(config: ShiftConfig, train_weights: np.ndarray) -> np.ndarray:
    # inverse weighting concentrates test mass on cells the training sampler
    # rarely reaches; test_overlap keeps well-trained cells reachable
    top = train_weights.max()
    weights = 1.0 / (train_weights + config.test_overlap * top)
    return weights / weights.sum()


def _sample_rows(
    config: ShiftConfig,
    cells: list[tuple[int, ...]],
    probabilities: np.ndarray,
    n_rows: int,
    rng: np.random.Generator,
    group_tags: tuple[str, ...],
) -> tuple[list[Observation], list[tuple[int, ...]]]:
    chosen = rng.choice(len(cells), size=n_rows, p=probabilities)
    rows: list[Observation] = []
    drawn_cells: list[tuple[int, ...]] = []
    for i in range(n_rows):
        cell = cells[int(chosen[i])]
        values: dict[str, float] = {}
        for f, index in zip(config.features, cell):
            lo, hi = f.edges[index], f.edges[index + 1]
            values[f.name] = float(rng.uniform(lo, hi))
        target = truth_output(config, cell)
        if config.noise > 0:
            target += config.noise * float(rng.standard_normal())
        rows.append(
            Observation(
                values=values,
                target=float(target),
                group_tag=group_tags[i % len(group_tags)],
            )
        )
        drawn_cells.append(cell)
    return rows, drawn_cells


def generate_shift_scenario(
    config: ShiftConfig | None = None, seed: int = 93
) -> tuple[Dataset, Dataset, RuleTable]:
    """Generate (train, test, truth_rules), deterministic in (config, seed).

    ``truth_rules`` holds one rule per grid cell: output = the ground-truth
    value of that cell, weight = how often the cell occurred across *all*
    generated rows (train and test), so interval construction downstream sees
    the same occurrence weighting an expert watching every season would.
    """
    config = config or ShiftConfig()
    cells = _cells(config)
    train_w = _train_cell_weights(config, cells)
    test_w = _test_cell_weights(config, train_w)
    rng = np.random.default_rng(seed)
    train_rows, train_cells = _sample_rows(
        config, cells, train_w, config.n_train, rng, config.train_group_tags
    )
    test_rows, test_cells = _sample_rows(
        config, cells, test_w, config.n_test, rng, (config.test_group_tag,)
    )
    train = Dataset(
        feature_names=config.feature_names,
        target_name=config.target_name,
        rows=tuple(train_rows),
        group_tag_name=config.group_tag_name,
    )
    test = Dataset(
        feature_names=config.feature_names,
        target_name=config.target_name,
        rows=tuple(test_rows),
        group_tag_name=config.group_tag_name,
    )
    counts: dict[tuple[int, ...], int] = {}
    for cell in train_cells + test_cells:
        counts[cell] = counts.get(cell, 0) + 1
    rules = tuple(
        Rule(
            labels={f.name: f.labels[index] for f, index in zip(config.features, cell)},
            output=truth_output(config, cell),
            weight=counts.get(cell, 0),
        )
        for cell in cells
    )
    truth_rules = RuleTable(features=config.features, rules=rules)
    return train, test, truth_rules
