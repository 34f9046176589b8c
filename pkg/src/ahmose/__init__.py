"""ahmose: knowledge-augmented model selection for regression.

Train and rank candidate models with a seeded mini-AutoML, compute exact
Shapley explanations translated into target space, score each model's
agreement with expert knowledge intervals, and pick the model a domain expert
would trust — not just the one with the best cross-validation score.
"""

from .agreement import (
    AgreementSummary,
    FeatureAgreement,
    PointClass,
    RankedModel,
    bias_report,
    classify_point,
    rank_by_wma,
    summarize,
)
from .automl import (
    GridConfig,
    LeaderboardEntry,
    default_grid,
    kfold_rmse,
    run_automl,
    select_top_per_family,
)
from .dataset import Dataset, Observation, concat, dataset_to_csv, parse_dataset, split_by_group
from .errors import (
    AgreementError,
    AhmoseError,
    DatasetError,
    ExplainError,
    KnowledgeError,
    ModelError,
    ProjectError,
    SingularSystemError,
)
from .explain import (
    ExplanationRecord,
    ExplanationSet,
    ImportanceVector,
    base_value,
    explain_dataset,
    feature_importance,
    shapley_values,
)
from .knowledge import (
    GridFeature,
    IntervalSet,
    KnowledgeInterval,
    Rule,
    RuleTable,
    build_intervals,
    interval_set_to_json,
    lookup_interval,
    parse_interval_file,
    parse_rule_file,
    rule_table_to_json,
    weighted_quality_mean,
)
from .models import ModelSpec, TrainedModel, fit, model_to_json, parse_model_file, predict, predict_matrix
from .project import ProjectBundle, build_bundle, export_project, load_project, run_pipeline
from .scenario import ShiftConfig, generate_shift_scenario, truth_output
from .service import create_app, serve

__version__ = "0.1.0"
