#!/usr/bin/env node
/**
 * plots <kind> --in <csv...> --out <file>
 *
 * kind: accuracy-vs-iterations | accuracy-vs-transmissions | tx-vs-density
 * Reads the simulator's CSV outputs and writes one SVG figure. On any
 * schema or I/O problem: diagnostic to stderr, nonzero exit, no file.
 */

import { realpathSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { SchemaError } from "./csv.js";
import { FIGURE_KINDS, FigureKind, FigureSpec, renderFigure } from "./render.js";

const USAGE = `usage: plots <kind> --in <csv...> --out <file>
kinds: ${FIGURE_KINDS.join(", ")}`;

export function parseArgs(argv: string[]): FigureSpec {
  if (argv.length === 0) {
    throw new SchemaError(USAGE);
  }
  const kind = argv[0];
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(`unknown figure kind ${JSON.stringify(kind)}; ${USAGE}`);
  }
  const inputs: string[] = [];
  let output: string | undefined;
  let i = 1;
  while (i < argv.length) {
    const arg = argv[i];
    if (arg === "--in") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i += 1;
      }
    } else if (arg === "--out") {
      output = argv[i + 1];
      i += 2;
    } else {
      throw new SchemaError(`unexpected argument ${JSON.stringify(arg)}; ${USAGE}`);
    }
  }
  if (inputs.length === 0) {
    throw new SchemaError(`--in needs at least one CSV; ${USAGE}`);
  }
  if (!output) {
    throw new SchemaError(`--out is required; ${USAGE}`);
  }
  return { kind: kind as FigureKind, inputs, output };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const svg = renderFigure(spec);
    writeFileSync(spec.output, svg);
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(`error: ${message}`);
    return 1;
  }
}

const invokedDirectly = (() => {
  if (!process.argv[1]) return false;
  try {
    return fileURLToPath(import.meta.url) === realpathSync(process.argv[1]);
  } catch {
    return false;
  }
})();

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
