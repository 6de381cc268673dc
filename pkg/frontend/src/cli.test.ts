import assert from "node:assert/strict";
import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { parseArgs } from "./cli.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const CLI = join(HERE, "cli.js");
const FIXTURES = join(HERE, "..", "fixtures");

function runCli(args: string[]) {
  return spawnSync(process.execPath, [CLI, ...args], { encoding: "utf8" });
}

test("parseArgs accepts the documented shape", () => {
  const spec = parseArgs(["tx-vs-density", "--in", "a.csv", "b.csv", "--out", "fig.svg"]);
  assert.equal(spec.kind, "tx-vs-density");
  assert.deepEqual(spec.inputs, ["a.csv", "b.csv"]);
  assert.equal(spec.output, "fig.svg");
});

test("parseArgs rejects unknown kinds and missing flags", () => {
  assert.throws(() => parseArgs(["pie-chart", "--in", "a.csv", "--out", "f.svg"]), /unknown figure kind/);
  assert.throws(() => parseArgs(["tx-vs-density", "--out", "f.svg"]), /--in/);
  assert.throws(() => parseArgs(["tx-vs-density", "--in", "a.csv"]), /--out/);
});

test("cli renders a figure from fixture traces", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const out = join(dir, "fig1a.svg");
  const result = runCli([
    "accuracy-vs-iterations",
    "--in",
    join(FIXTURES, "trace_admm_seed0.csv"),
    join(FIXTURES, "trace_oadmm_seed0.csv"),
    "--out",
    out,
  ]);
  assert.equal(result.status, 0, result.stderr);
  assert.ok(existsSync(out));
  assert.ok(readFileSync(out, "utf8").includes("<svg"));
});

test("cli exits nonzero on schema mismatch and writes nothing", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const bad = join(dir, "bad.csv");
  writeFileSync(bad, "wrong,header\n1,2\n");
  const out = join(dir, "fig.svg");
  const result = runCli(["accuracy-vs-iterations", "--in", bad, "--out", out]);
  assert.equal(result.status, 1);
  assert.match(result.stderr, /header mismatch/);
  assert.equal(existsSync(out), false);
});

test("cli exits nonzero on an empty csv and writes nothing", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const empty = join(dir, "empty.csv");
  writeFileSync(empty, "");
  const out = join(dir, "fig.svg");
  const result = runCli(["tx-vs-density", "--in", empty, "--out", out]);
  assert.equal(result.status, 1);
  assert.match(result.stderr, /empty CSV/);
  assert.equal(existsSync(out), false);
});

test("cli exits nonzero on a missing input file", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const out = join(dir, "fig.svg");
  const result = runCli(["tx-vs-density", "--in", join(dir, "nope.csv"), "--out", out]);
  assert.equal(result.status, 1);
  assert.equal(existsSync(out), false);
});
