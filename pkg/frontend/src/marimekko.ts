/** Knowledge-agreement summary (Marimekko) plot builder.
 *
 * Column widths encode served importance weights; stacked heights encode the
 * served agree / disagree / no-knowledge fractions (blue / orange / grey,
 * agreement at the bottom). The blue area of the chart IS the weighted mean
 * agreement, and the label shows the served wma, never a recomputation.
 */

import { CLASS_COLORS, emptyPanel, type PanelScene } from "./scene.js";
import type { SummaryDoc } from "./types.js";

export interface SummaryPlotOptions {
  width?: number;
  height?: number;
  margin?: number;
}

const DEFAULTS = { width: 220, height: 170, margin: 30 };

export function buildSummaryPlot(summary: SummaryDoc, options: SummaryPlotOptions = {}): PanelScene {
  const { width, height, margin } = { ...DEFAULTS, ...options };
  const title = "agreement summary";
  if (summary.features.length === 0) {
    return emptyPanel(title, width, height, "no summary data");
  }
  const plotLeft = margin;
  const plotRight = width - 8;
  const plotTop = 24;
  const plotBottom = height - margin;
  const plotWidth = plotRight - plotLeft;
  const plotHeight = plotBottom - plotTop;

  const scene: PanelScene = {
    kind: "summary",
    title,
    width,
    height,
    rects: [],
    circles: [],
    texts: [
      { x: width / 2, y: 10, text: title, size: 11, anchor: "middle" },
      {
        x: width / 2,
        y: 22,
        text: `WMA ${summary.wma.toFixed(3)}`,
        size: 10,
        anchor: "middle",
      },
    ],
    xTicks: [],
    yTicks: [0, 0.5, 1].map((v) => ({
      position: plotBottom - v * plotHeight,
      label: `${Math.round(v * 100)}%`,
    })),
  };

  let cursor = plotLeft;
  for (const feature of summary.features) {
    const columnWidth = feature.importance_weight * plotWidth;
    // stack bottom-up: agree (blue), disagree (orange), no knowledge (grey)
    const segments = [
      { fraction: feature.agree_fraction, role: "agree" as const },
      { fraction: feature.disagree_fraction, role: "over" as const },
      { fraction: feature.noknowledge_fraction, role: "no_knowledge" as const },
    ];
    let yCursor = plotBottom;
    for (const segment of segments) {
      const segmentHeight = segment.fraction * plotHeight;
      if (segmentHeight > 0) {
        scene.rects.push({
          x: cursor,
          y: yCursor - segmentHeight,
          width: columnWidth,
          height: segmentHeight,
          fill: CLASS_COLORS[segment.role],
          opacity: 1,
          role: segment.role,
        });
      }
      yCursor -= segmentHeight;
    }
    scene.texts.push({
      x: cursor + columnWidth / 2,
      y: plotBottom + 12,
      text: feature.feature,
      size: 9,
      anchor: "middle",
    });
    cursor += columnWidth;
  }
  return scene;
}

/** Blue area of a rendered summary panel in px², divided by the plot area.
 * Used by tests to confirm the WMA is visually identifiable. */
export function blueAreaShare(scene: PanelScene): number {
  const blue = scene.rects
    .filter((r) => r.role === "agree")
    .reduce((total, r) => total + r.width * r.height, 0);
  const all = scene.rects.reduce((total, r) => total + r.width * r.height, 0);
  return all === 0 ? 0 : blue / all;
}
