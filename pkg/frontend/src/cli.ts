/**
 * Process boundary to the Python package: every call writes its input
 * vectors to a temporary binary file, runs `wsprox` as a subprocess, and
 * reads back the JSON it emits. Set WSPROX_PYTHON to pick the interpreter
 * (defaults to python3).
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { encodeVectors } from "./vecio.js";

export class WsproxError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
  ) {
    super(message);
    this.name = "WsproxError";
  }
}

function pythonInterpreter(): string {
  return process.env.WSPROX_PYTHON ?? "python3";
}

/** Run one wsprox subcommand over the given input vectors; returns parsed JSON. */
export function runCli(args: readonly string[], vectors: readonly Float64Array[]): unknown {
  const dir = mkdtempSync(join(tmpdir(), "wsprox-"));
  const inputPath = join(dir, "input.bin");
  const outputPath = join(dir, "output.json");
  try {
    writeFileSync(inputPath, encodeVectors(vectors));
    const full = [
      "-m",
      "wsprox.cli",
      ...args,
      "--input",
      inputPath,
      "--output",
      outputPath,
    ];
    try {
      execFileSync(pythonInterpreter(), full, { stdio: ["ignore", "pipe", "pipe"] });
    } catch (err) {
      const e = err as { status?: number; stderr?: Buffer };
      const detail = e.stderr ? e.stderr.toString().trim() : String(err);
      throw new WsproxError(`wsprox ${args[0]} failed: ${detail}`, e.status ?? -1);
    }
    return JSON.parse(readFileSync(outputPath, "utf-8"));
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
