/**
 * Array-in/array-out bindings for the weight-sharing prox toolkit.
 *
 * Every function copies its input into a temporary file, runs the `wsprox`
 * command line in a subprocess, and parses the JSON result, so results are
 * bit-for-bit the primary implementation's output and input buffers are
 * never mutated. Batch variants amortize the subprocess cost over many
 * vectors in one call.
 */

import { runCli } from "./cli.js";

export { MAGIC, decodeVectors, encodeVectors } from "./vecio.js";
export { WsproxError, runCli } from "./cli.js";

export interface ProxOptions {
  alpha?: number;
  beta?: number;
  rho?: number;
  algo?: "pava" | "imminent" | "end" | "search";
  threads?: number;
}

export interface Cluster {
  start: number;
  size: number;
  value: number;
  zeroed: boolean;
}

export interface ProxResult {
  values: Float64Array;
  clusters: Cluster[];
}

export interface MetricsResult {
  sparsity: number;
  distinct_nonzero: number;
  nonzero_count: number;
  weight_sharing: number;
  distinct_ratio: number;
}

function checkVector(w: Float64Array): void {
  if (w.length === 0) {
    throw new Error("weight vector must be nonempty");
  }
  for (let i = 0; i < w.length; i++) {
    if (!Number.isFinite(w[i])) {
      throw new Error(`weight vector has a non-finite entry at index ${i}`);
    }
  }
}

function proxArgs(opts: ProxOptions): string[] {
  const args = [
    "prox",
    "--alpha",
    String(opts.alpha ?? 0),
    "--beta",
    String(opts.beta ?? 0),
    "--rho",
    String(opts.rho ?? 0),
    "--algo",
    opts.algo ?? "pava",
  ];
  if (opts.threads !== undefined) {
    args.push("--threads", String(opts.threads));
  }
  return args;
}

interface RawProx {
  values: number[];
  clusters: Cluster[];
}

function toProxResult(raw: RawProx): ProxResult {
  return { values: Float64Array.from(raw.values), clusters: raw.clusters };
}

/** Composite prox (weight sharing + l1 + rewinding) of a single vector. */
export function boundProx(w: Float64Array, opts: ProxOptions = {}): ProxResult {
  checkVector(w);
  return toProxResult(runCli(proxArgs(opts), [w]) as RawProx);
}

export function boundProxBatch(ws: readonly Float64Array[], opts: ProxOptions = {}): ProxResult[] {
  ws.forEach(checkVector);
  const raw = runCli([...proxArgs(opts), "--batch"], ws) as RawProx[];
  return raw.map(toProxResult);
}

/** Mean pairwise absolute difference penalty of a single vector. */
export function boundEvalR(w: Float64Array, threads?: number): number {
  return boundEvalRBatch([w], threads)[0];
}

export function boundEvalRBatch(ws: readonly Float64Array[], threads?: number): number[] {
  ws.forEach(checkVector);
  const args = ["eval", "--mode", "fast"];
  if (threads !== undefined) {
    args.push("--threads", String(threads));
  }
  const raw = runCli([...args, "--batch"], ws) as { R: number }[];
  return raw.map((r) => r.R);
}

/** Sparsity and weight-sharing metrics of a single vector. */
export function boundMetrics(w: Float64Array, zeroTol = 0): MetricsResult {
  return boundMetricsBatch([w], zeroTol)[0];
}

export function boundMetricsBatch(ws: readonly Float64Array[], zeroTol = 0): MetricsResult[] {
  ws.forEach(checkVector);
  const args = ["metrics", "--zero-tol", String(zeroTol), "--batch"];
  return runCli(args, ws) as MetricsResult[];
}

/** Weighted isotonic regression (block means, nondecreasing fit). */
export function boundIsotonic(y: Float64Array, threads?: number): Float64Array {
  return boundIsotonicBatch([y], threads)[0];
}

export function boundIsotonicBatch(ys: readonly Float64Array[], threads?: number): Float64Array[] {
  ys.forEach(checkVector);
  const args = ["isotonic"];
  if (threads !== undefined) {
    args.push("--threads", String(threads));
  }
  const raw = runCli([...args, "--batch"], ys) as { values: number[] }[];
  return raw.map((r) => Float64Array.from(r.values));
}
