/**
 * Parsers for the simulator's CSV schemas.
 *
 * Trace files: algorithm,seed,k,accuracy,iter_tx,cum_tx
 * Sweep files: density,algorithm,seed,tx_to_target
 *
 * Headers must match exactly; mismatches raise SchemaError naming the
 * offending columns so the CLI can print a useful diagnostic.
 */

export const TRACE_COLUMNS = ["algorithm", "seed", "k", "accuracy", "iter_tx", "cum_tx"] as const;
export const SWEEP_COLUMNS = ["density", "algorithm", "seed", "tx_to_target"] as const;

export const NOT_REACHED = -1;

export interface TraceRow {
  algorithm: string;
  seed: number;
  k: number;
  accuracy: number;
  iterTx: number;
  cumTx: number;
}

export interface SweepRow {
  density: number;
  algorithm: string;
  seed: number;
  txToTarget: number;
}

export class SchemaError extends Error {}

function splitRows(text: string, source: string): string[][] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty CSV`);
  }
  return lines.map((line) => line.split(","));
}

function checkHeader(found: string[], expected: readonly string[], source: string): void {
  if (found.length === expected.length && expected.every((c, i) => found[i] === c)) {
    return;
  }
  const missing = expected.filter((c) => !found.includes(c));
  const extra = found.filter((c) => !(expected as readonly string[]).includes(c));
  const parts = [`${source}: header mismatch`, `expected [${expected.join(",")}]`, `found [${found.join(",")}]`];
  if (missing.length > 0) parts.push(`missing: ${missing.join(",")}`);
  if (extra.length > 0) parts.push(`unexpected: ${extra.join(",")}`);
  throw new SchemaError(parts.join("; "));
}

function num(token: string, column: string, source: string, line: number): number {
  const value = Number(token);
  if (token.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`${source}:${line}: bad ${column} value ${JSON.stringify(token)}`);
  }
  return value;
}

export function parseTraceCsv(text: string, source: string): TraceRow[] {
  const rows = splitRows(text, source);
  checkHeader(rows[0], TRACE_COLUMNS, source);
  if (rows.length === 1) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return rows.slice(1).map((cells, i) => {
    const line = i + 2;
    if (cells.length !== TRACE_COLUMNS.length) {
      throw new SchemaError(`${source}:${line}: expected ${TRACE_COLUMNS.length} columns, found ${cells.length}`);
    }
    return {
      algorithm: cells[0],
      seed: num(cells[1], "seed", source, line),
      k: num(cells[2], "k", source, line),
      accuracy: num(cells[3], "accuracy", source, line),
      iterTx: num(cells[4], "iter_tx", source, line),
      cumTx: num(cells[5], "cum_tx", source, line),
    };
  });
}

export function parseSweepCsv(text: string, source: string): SweepRow[] {
  const rows = splitRows(text, source);
  checkHeader(rows[0], SWEEP_COLUMNS, source);
  if (rows.length === 1) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return rows.slice(1).map((cells, i) => {
    const line = i + 2;
    if (cells.length !== SWEEP_COLUMNS.length) {
      throw new SchemaError(`${source}:${line}: expected ${SWEEP_COLUMNS.length} columns, found ${cells.length}`);
    }
    return {
      density: num(cells[0], "density", source, line),
      algorithm: cells[1],
      seed: num(cells[2], "seed", source, line),
      txToTarget: num(cells[3], "tx_to_target", source, line),
    };
  });
}
