/**
 * Aggregation of raw CSV rows into one plottable series per algorithm
 * (median over seeds, following the input's algorithm order).
 */

import { NOT_REACHED, SweepRow, TraceRow } from "./csv.js";

export interface Point {
  x: number;
  y: number;
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

function groupBySeed(rows: TraceRow[]): Map<string, Map<number, TraceRow[]>> {
  const byAlgorithm = new Map<string, Map<number, TraceRow[]>>();
  for (const row of rows) {
    let seeds = byAlgorithm.get(row.algorithm);
    if (!seeds) {
      seeds = new Map();
      byAlgorithm.set(row.algorithm, seeds);
    }
    let series = seeds.get(row.seed);
    if (!series) {
      series = [];
      seeds.set(row.seed, series);
    }
    series.push(row);
  }
  for (const seeds of byAlgorithm.values()) {
    for (const series of seeds.values()) {
      series.sort((a, b) => a.k - b.k);
    }
  }
  return byAlgorithm;
}

/**
 * Median accuracy at each iteration. Runs stop once they hit the target,
 * so shorter seeds carry their final row forward (accuracy and
 * transmissions freeze when a run ends); this keeps the median over all
 * seeds at every k and keeps the transmission axis monotone. xFrom picks
 * the x coordinate per row (iteration count or cumulative transmissions);
 * a plotted point is the median of x and of y over all seeds.
 */
function medianCurve(rows: TraceRow[],
                     xFrom: (row: TraceRow, k: number) => number): Map<string, Point[]> {
  const curves = new Map<string, Point[]>();
  for (const [algorithm, seeds] of groupBySeed(rows)) {
    const ks = new Set<number>();
    for (const series of seeds.values()) {
      for (const row of series) ks.add(row.k);
    }
    const sortedKs = [...ks].sort((a, b) => a - b);
    const cursors = new Map<number, number>();
    const points: Point[] = [];
    for (const k of sortedKs) {
      const xs: number[] = [];
      const ys: number[] = [];
      for (const [seed, series] of seeds) {
        let i = cursors.get(seed) ?? 0;
        while (i + 1 < series.length && series[i + 1].k <= k) i += 1;
        cursors.set(seed, i);
        if (series[i].k <= k) {
          // the latest row at or before k; a finished run contributes its
          // final accuracy and transmission count from here on
          xs.push(xFrom(series[i], k));
          ys.push(series[i].accuracy);
        }
      }
      points.push({ x: median(xs), y: median(ys) });
    }
    curves.set(algorithm, points);
  }
  return curves;
}

export function medianAccuracyByIteration(rows: TraceRow[]): Map<string, Point[]> {
  return medianCurve(rows, (_row, k) => k);
}

export function medianAccuracyByTransmissions(rows: TraceRow[]): Map<string, Point[]> {
  return medianCurve(rows, (row) => row.cumTx);
}

/** Median transmissions-to-target per (algorithm, density); sentinel
 * cells (target never reached) are excluded from the median. */
export function medianTxByDensity(rows: SweepRow[]): Map<string, Point[]> {
  const byAlgorithm = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    if (row.txToTarget === NOT_REACHED) continue;
    let densities = byAlgorithm.get(row.algorithm);
    if (!densities) {
      densities = new Map();
      byAlgorithm.set(row.algorithm, densities);
    }
    const cell = densities.get(row.density);
    if (cell) {
      cell.push(row.txToTarget);
    } else {
      densities.set(row.density, [row.txToTarget]);
    }
  }
  const curves = new Map<string, Point[]>();
  for (const [algorithm, densities] of byAlgorithm) {
    const points = [...densities.entries()]
      .map(([density, cells]) => ({ x: density, y: median(cells) }))
      .sort((a, b) => a.x - b.x);
    curves.set(algorithm, points);
  }
  return curves;
}
