/** Knowledge-agreement dependence plot builder.
 *
 * Two layers: green rectangles for the expert knowledge intervals of the
 * feature (x = feature range, y = expected target-mean range), and one circle
 * per explanation point at (feature value, expected value). Circle color is
 * the class the service attached to the record; the client never classifies.
 */

import { linearScale, extent, padded } from "./scale.js";
import {
  CLASS_COLORS,
  KNOWLEDGE_COLOR,
  KNOWLEDGE_OPACITY,
  emptyPanel,
  type PanelScene,
} from "./scene.js";
import type { ExplanationsDoc, IntervalSetDoc } from "./types.js";

export interface DependencePlotOptions {
  width?: number;
  height?: number;
  margin?: number;
  pointRadius?: number;
}

const DEFAULTS = { width: 220, height: 170, margin: 30, pointRadius: 3 };

export function buildDependencePlot(
  modelId: string,
  feature: string,
  explanations: ExplanationsDoc,
  intervals: IntervalSetDoc,
  options: DependencePlotOptions = {},
): PanelScene {
  const { width, height, margin, pointRadius } = { ...DEFAULTS, ...options };
  const title = feature;
  const records = explanations.records.filter((r) => r.feature === feature);
  if (records.length === 0) {
    return emptyPanel(title, width, height, "no explanation points");
  }
  const featureIntervals = intervals.intervals.filter((iv) => iv.feature === feature);

  const xValues = records.map((r) => r.feature_value);
  for (const iv of featureIntervals) xValues.push(iv.feature_range[0], iv.feature_range[1]);
  const yValues = records.map((r) => r.expected_value);
  yValues.push(intervals.target_bounds[0], intervals.target_bounds[1]);

  const x = linearScale(padded(extent(xValues), 0.04), [margin, width - 8]);
  const y = linearScale(padded(extent(yValues), 0.04), [height - margin, 12]);

  const scene: PanelScene = {
    kind: "dependence",
    title,
    width,
    height,
    rects: [],
    circles: [],
    texts: [{ x: width / 2, y: 10, text: title, size: 11, anchor: "middle" }],
    xTicks: x.ticks(4).map((v) => ({ position: x(v), label: String(v) })),
    yTicks: y.ticks(4).map((v) => ({ position: y(v), label: String(v) })),
  };

  // knowledge layer (shared per feature column: callers pass the same
  // interval set for every model row)
  for (const iv of featureIntervals) {
    const x0 = x(iv.feature_range[0]);
    const x1 = x(iv.feature_range[1]);
    const y0 = y(iv.target_range[1]);
    const y1 = y(iv.target_range[0]);
    scene.rects.push({
      x: x0,
      y: y0,
      width: x1 - x0,
      height: y1 - y0,
      fill: KNOWLEDGE_COLOR,
      opacity: KNOWLEDGE_OPACITY,
      role: "knowledge",
    });
  }

  // model layer
  for (const record of records) {
    const cls = record.agreement ?? "no_knowledge";
    scene.circles.push({
      cx: x(record.feature_value),
      cy: y(record.expected_value),
      r: pointRadius,
      fill: CLASS_COLORS[cls],
      cls,
      tooltip:
        `${modelId} · observation ${record.observation_index}\n` +
        `${feature} = ${record.feature_value.toFixed(3)}\n` +
        `attribution = ${record.shap_value.toFixed(4)}\n` +
        `expected value = ${record.expected_value.toFixed(4)} (${cls})`,
    });
  }
  return scene;
}
