/** The plot matrix: one row per selected model, one dependence plot per
 * selected feature, plus the Marimekko summary at the end of each row. The
 * knowledge layer of a feature column comes from the single selected interval
 * set, so it is identical across model rows by construction. */

import { buildDependencePlot } from "./dependence.js";
import { buildSummaryPlot } from "./marimekko.js";
import type { PanelScene } from "./scene.js";
import type {
  ExplanationsDoc,
  IntervalSetDoc,
  LeaderboardEntry,
  SummaryDoc,
} from "./types.js";

export interface MatrixRow {
  modelId: string;
  /** alias, WMA and CV RMSE side by side, per the board */
  header: string;
  panels: PanelScene[];
}

export interface MatrixScene {
  columns: string[]; // feature names + "summary"
  rows: MatrixRow[];
  /** one-line explanation of the two metrics, shown once above the matrix */
  metricsNote: string;
}

export interface MatrixInputs {
  models: LeaderboardEntry[];
  selectedModels: string[];
  selectedFeatures: string[];
  intervals: IntervalSetDoc;
  explanations: Map<string, ExplanationsDoc>;
  summaries: Map<string, SummaryDoc>;
}

export const METRICS_NOTE =
  "CV RMSE: cross-validated prediction error on the training years (lower is better). " +
  "WMA: share of explanation points agreeing with expert knowledge, weighted by feature importance (higher is better).";

export function buildMatrix(inputs: MatrixInputs): MatrixScene {
  const byId = new Map(inputs.models.map((entry) => [entry.model_id, entry]));
  const rows: MatrixRow[] = [];
  for (const modelId of inputs.selectedModels) {
    const entry = byId.get(modelId);
    const explanations = inputs.explanations.get(modelId);
    const summary = inputs.summaries.get(modelId);
    if (!entry || !explanations || !summary) {
      throw new Error(`matrix is missing data for model ${modelId}`);
    }
    const panels = inputs.selectedFeatures.map((feature) =>
      buildDependencePlot(modelId, feature, explanations, inputs.intervals),
    );
    panels.push(buildSummaryPlot(summary));
    rows.push({
      modelId,
      header:
        `${entry.alias} ${entry.model_id} — ` +
        `WMA ${summary.wma.toFixed(3)}, CV RMSE ${entry.cv_rmse.toFixed(3)}`,
      panels,
    });
  }
  return {
    columns: [...inputs.selectedFeatures, "summary"],
    rows,
    metricsNote: METRICS_NOTE,
  };
}
