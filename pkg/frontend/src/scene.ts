/** Scene description shared by the chart builders and the SVG renderer.
 *
 * Builders emit plain geometry + colors so tests can assert layout and class
 * mapping without a DOM, and rendering stays trivially deterministic. */

import type { AgreementClass } from "./types.js";

export const CLASS_COLORS: Record<AgreementClass, string> = {
  agree: "#4e79a7", // blue
  over: "#f28e2b", // orange
  under: "#f28e2b", // orange (direction is in the tooltip, not the hue)
  no_knowledge: "#bab0ac", // grey
};

export const KNOWLEDGE_COLOR = "#59a14f"; // green interval rectangles
export const KNOWLEDGE_OPACITY = 0.3;

export interface RectMark {
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
  opacity: number;
  /** semantic role: knowledge rectangle or a Marimekko segment class */
  role: "knowledge" | AgreementClass;
}

export interface CircleMark {
  cx: number;
  cy: number;
  r: number;
  fill: string;
  cls: AgreementClass;
  tooltip: string;
}

export interface TextMark {
  x: number;
  y: number;
  text: string;
  size: number;
  anchor: "start" | "middle" | "end";
}

export interface AxisTick {
  position: number;
  label: string;
}

export interface PanelScene {
  kind: "dependence" | "summary" | "empty";
  title: string;
  width: number;
  height: number;
  rects: RectMark[];
  circles: CircleMark[];
  texts: TextMark[];
  xTicks: AxisTick[];
  yTicks: AxisTick[];
}

export function emptyPanel(title: string, width: number, height: number, message: string): PanelScene {
  return {
    kind: "empty",
    title,
    width,
    height,
    rects: [],
    circles: [],
    texts: [{ x: width / 2, y: height / 2, text: message, size: 11, anchor: "middle" }],
    xTicks: [],
    yTicks: [],
  };
}
