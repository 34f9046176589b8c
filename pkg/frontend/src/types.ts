/** Documents served by the project service, mirrored from docs/schemas/. */

export type AgreementClass = "agree" | "over" | "under" | "no_knowledge";

export interface LeaderboardEntry {
  model_id: string;
  alias: string;
  family: "GLM" | "TREE" | "DRF" | "GBM";
  hyperparameters: Record<string, unknown>;
  cv_rmse: number;
  rank: number;
}

export interface ProjectDoc {
  schema_version: number;
  kind: "project";
  name: string;
  target_bounds: [number, number];
  dataset: {
    feature_names: string[];
    target_name: string;
    group_tag_name: string | null;
    n_background_rows: number;
    n_interest_rows: number;
  };
  leaderboard: LeaderboardEntry[];
  models: string[];
  interval_sets: string[];
}

export interface KnowledgeIntervalDoc {
  feature: string;
  label: string;
  feature_range: [number, number];
  target_range: [number, number];
  closed_low: boolean;
}

export interface IntervalSetDoc {
  schema_version: number;
  kind: "interval_set";
  name: string;
  target_bounds: [number, number];
  intervals: KnowledgeIntervalDoc[];
}

export interface ExplanationRecordDoc {
  observation_index: number;
  feature: string;
  feature_value: number;
  shap_value: number;
  expected_value: number;
  /** present when the explanations endpoint is asked for ?intervals=: the
   * service's authoritative classification — never recomputed client side */
  agreement?: AgreementClass;
}

export interface ExplanationsDoc {
  schema_version: number;
  kind: "explanations";
  model_id: string;
  base_value: number;
  feature_names: string[];
  records: ExplanationRecordDoc[];
  importance: Record<string, number>;
}

export interface FeatureAgreementDoc {
  feature: string;
  agree_fraction: number;
  disagree_fraction: number;
  noknowledge_fraction: number;
  importance_weight: number;
}

export interface SummaryDoc {
  schema_version: number;
  kind: "summary";
  model_id: string;
  interval_set: string;
  features: FeatureAgreementDoc[];
  wma: number;
}

export interface NotFoundDoc {
  code: "project_not_found" | "model_not_found" | "interval_set_not_found";
  detail: string;
}
