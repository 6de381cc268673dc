/**
 * Figure assembly: one SVG per figure kind, one labeled median line per
 * algorithm. Accuracy figures use a log y axis.
 */

import { readFileSync } from "node:fs";

import { parseSweepCsv, parseTraceCsv, SchemaError } from "./csv.js";
import { medianAccuracyByIteration, medianAccuracyByTransmissions, medianTxByDensity, Point } from "./series.js";
import {
  decadeTicks,
  escapeXml,
  formatDecade,
  formatTick,
  linearScale,
  linearTicks,
  logScale,
  polyline,
  seriesColor,
  svgDocument,
} from "./svg.js";

export const FIGURE_KINDS = [
  "accuracy-vs-iterations",
  "accuracy-vs-transmissions",
  "tx-vs-density",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
}

const WIDTH = 760;
const HEIGHT = 520;
const MARGIN = { left: 86, right: 26, top: 30, bottom: 58 };

interface AxisLabels {
  x: string;
  y: string;
  title: string;
}

const LABELS: Record<FigureKind, AxisLabels> = {
  "accuracy-vs-iterations": {
    x: "iteration k",
    y: "accuracy A_k",
    title: "Accuracy versus iterations (median over seeds)",
  },
  "accuracy-vs-transmissions": {
    x: "cumulative transmissions",
    y: "accuracy A_k",
    title: "Accuracy versus total transmissions (median over seeds)",
  },
  "tx-vs-density": {
    x: "network density (fraction of possible edges)",
    y: "transmissions to target",
    title: "Transmissions to target versus density (median over seeds)",
  },
};

function collectCurves(spec: FigureSpec): Map<string, Point[]> {
  if (spec.inputs.length === 0) {
    throw new SchemaError("no input CSVs given");
  }
  if (spec.kind === "tx-vs-density") {
    const rows = spec.inputs.flatMap((path) => parseSweepCsv(readFileSync(path, "utf8"), path));
    return medianTxByDensity(rows);
  }
  const rows = spec.inputs.flatMap((path) => parseTraceCsv(readFileSync(path, "utf8"), path));
  return spec.kind === "accuracy-vs-iterations"
    ? medianAccuracyByIteration(rows)
    : medianAccuracyByTransmissions(rows);
}

export function renderFigure(spec: FigureSpec): string {
  const curves = collectCurves(spec);
  const logY = spec.kind !== "tx-vs-density";
  const plotted = new Map<string, Point[]>();
  for (const [name, points] of curves) {
    const kept = logY ? points.filter((p) => p.y > 0) : points;
    if (kept.length > 0) plotted.set(name, kept);
  }
  if (plotted.size === 0) {
    throw new SchemaError("no plottable points after filtering");
  }

  const all = [...plotted.values()].flat();
  const xMin = Math.min(...all.map((p) => p.x));
  const xMax = Math.max(...all.map((p) => p.x));
  const yMinRaw = Math.min(...all.map((p) => p.y));
  const yMaxRaw = Math.max(...all.map((p) => p.y));

  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xTicks = linearTicks(xMin, xMax);
  const xScale = linearScale(xMin, xMax, x0, x1);

  let yTicks: number[];
  let yScale: (v: number) => number;
  let yFormat: (v: number) => string;
  if (logY) {
    const yTickVals = decadeTicks(yMinRaw, Math.max(yMaxRaw, 1.0));
    const yMin = yTickVals[0];
    const yMax = yTickVals[yTickVals.length - 1];
    yTicks = yTickVals;
    yScale = logScale(yMin, yMax, y0, y1);
    yFormat = formatDecade;
  } else {
    const lo = Math.min(0, yMinRaw);
    yTicks = linearTicks(lo, yMaxRaw);
    yScale = linearScale(lo, Math.max(yMaxRaw, yTicks[yTicks.length - 1]), y0, y1);
    yFormat = formatTick;
  }

  const labels = LABELS[spec.kind];
  const body: string[] = [];

  for (const t of yTicks) {
    const y = yScale(t).toFixed(2);
    body.push(`<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="#dddddd" stroke-width="0.7"/>`);
    body.push(`<text x="${x0 - 8}" y="${y}" font-size="11" text-anchor="end" dominant-baseline="middle" fill="#333333">${yFormat(t)}</text>`);
  }
  for (const t of xTicks) {
    const x = xScale(t).toFixed(2);
    body.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="#333333" stroke-width="1"/>`);
    body.push(`<text x="${x}" y="${y0 + 18}" font-size="11" text-anchor="middle" fill="#333333">${formatTick(t)}</text>`);
  }
  body.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333333" stroke-width="1"/>`);
  body.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333333" stroke-width="1"/>`);
  body.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" font-size="13" text-anchor="middle" fill="#111111">${escapeXml(labels.x)}</text>`);
  body.push(`<text x="20" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" fill="#111111" transform="rotate(-90 20 ${(y0 + y1) / 2})">${escapeXml(labels.y)}</text>`);
  body.push(`<text x="${(x0 + x1) / 2}" y="18" font-size="14" text-anchor="middle" fill="#111111">${escapeXml(labels.title)}</text>`);

  let index = 0;
  const legend: string[] = [];
  for (const [name, points] of plotted) {
    const color = seriesColor(name, index);
    body.push(polyline(points.map((p) => ({ x: xScale(p.x), y: yScale(p.y) })), color));
    const ly = y1 + 16 + index * 18;
    legend.push(`<line x1="${x1 - 150}" y1="${ly}" x2="${x1 - 122}" y2="${ly}" stroke="${color}" stroke-width="2.2"/>`);
    legend.push(`<text x="${x1 - 114}" y="${ly}" font-size="12" dominant-baseline="middle" fill="#111111">${escapeXml(name)}</text>`);
    index += 1;
  }
  body.push(...legend);

  return svgDocument(WIDTH, HEIGHT, body);
}
