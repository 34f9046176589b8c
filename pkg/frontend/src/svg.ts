/** Deterministic SVG rendering of panel and matrix scenes.
 *
 * Coordinates are fixed to 2 decimals so snapshots are byte-stable; circles
 * carry a <title> child as the hover tooltip. */

import type { MatrixScene } from "./matrix.js";
import type { PanelScene } from "./scene.js";

const AXIS_COLOR = "#555";

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function num(value: number): string {
  return value.toFixed(2);
}

export function renderPanel(scene: PanelScene): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
      `viewBox="0 0 ${scene.width} ${scene.height}" data-kind="${scene.kind}" data-title="${esc(scene.title)}">`,
  ];
  for (const rect of scene.rects) {
    parts.push(
      `<rect x="${num(rect.x)}" y="${num(rect.y)}" width="${num(rect.width)}" ` +
        `height="${num(rect.height)}" fill="${rect.fill}" fill-opacity="${rect.opacity}" ` +
        `data-role="${rect.role}"/>`,
    );
  }
  for (const tick of scene.xTicks) {
    parts.push(
      `<line x1="${num(tick.position)}" y1="${scene.height - 26}" x2="${num(tick.position)}" ` +
        `y2="${scene.height - 22}" stroke="${AXIS_COLOR}"/>`,
      `<text x="${num(tick.position)}" y="${scene.height - 12}" font-size="8" ` +
        `text-anchor="middle" fill="${AXIS_COLOR}">${esc(tick.label)}</text>`,
    );
  }
  for (const tick of scene.yTicks) {
    parts.push(
      `<line x1="24" y1="${num(tick.position)}" x2="28" y2="${num(tick.position)}" stroke="${AXIS_COLOR}"/>`,
      `<text x="22" y="${num(tick.position + 3)}" font-size="8" text-anchor="end" ` +
        `fill="${AXIS_COLOR}">${esc(tick.label)}</text>`,
    );
  }
  for (const circle of scene.circles) {
    parts.push(
      `<circle cx="${num(circle.cx)}" cy="${num(circle.cy)}" r="${circle.r}" ` +
        `fill="${circle.fill}" fill-opacity="0.85" data-class="${circle.cls}">` +
        `<title>${esc(circle.tooltip)}</title></circle>`,
    );
  }
  for (const text of scene.texts) {
    parts.push(
      `<text x="${num(text.x)}" y="${num(text.y)}" font-size="${text.size}" ` +
        `text-anchor="${text.anchor}" fill="#222">${esc(text.text)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function renderMatrix(matrix: MatrixScene): string {
  const parts: string[] = ['<div class="matrix">'];
  parts.push(`<p class="metrics-note">${esc(matrix.metricsNote)}</p>`);
  for (const row of matrix.rows) {
    parts.push(`<div class="matrix-row" data-model="${esc(row.modelId)}">`);
    parts.push(`<div class="row-header">${esc(row.header)}</div>`);
    parts.push('<div class="row-panels">');
    for (const panel of row.panels) {
      parts.push(renderPanel(panel));
    }
    parts.push("</div></div>");
  }
  parts.push("</div>");
  return parts.join("\n");
}
