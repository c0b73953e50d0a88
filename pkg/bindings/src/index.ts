/**
 * Thin wrapper around the `spacings` command-line tool.
 *
 * Every call shells out to the CLI and returns its JSON payload unchanged;
 * no numerical work happens on this side.  Exact rationals cross the
 * boundary as [numerator, denominator] bigint pairs.  CLI failures (exit
 * code 2 usage/parse, 3 invariant violation) surface as thrown Errors
 * carrying the CLI diagnostic.
 */

import { spawnSync } from "child_process";
import { mkdtempSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";

export type Side = "left" | "right" | "two-sided";
export type Mode = "discrete" | "continuous";

/** Mirror of the core TestResult payload, field for field. */
export interface BoundTestResult {
  raw_statistic: number;
  normalized_statistic: number;
  p_value: number;
  side: Side;
  method: string;
  moments_used: number;
  certified_error: number | null;
  seed: number | null;
  warnings: string[];
}

export interface Envelope {
  command: string[];
  version: string;
  seed: number | null;
  result: any;
}

export interface SpecArgs {
  mode: Mode;
  n?: number;
  k: number;
  p: number;
  weights: Array<string | number>;
}

const PYTHON = process.env.SPACINGS_PYTHON ?? "python3";

export function runCli(args: string[]): Envelope {
  const proc = spawnSync(PYTHON, ["-m", "spacings.cli", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) throw proc.error;
  if (proc.status !== 0) {
    throw new Error(
      `spacings CLI exited with code ${proc.status}: ${proc.stderr.trim()}`
    );
  }
  return JSON.parse(proc.stdout) as Envelope;
}

function specFlags(spec: SpecArgs): string[] {
  const flags = ["--mode", spec.mode, "--k", String(spec.k), "--p", String(spec.p)];
  if (spec.mode === "discrete") {
    if (spec.n === undefined) throw new Error("discrete mode requires n");
    flags.push("--n", String(spec.n));
  }
  flags.push("--weights", spec.weights.map(String).join(","));
  return flags;
}

function parseRational(text: string): [bigint, bigint] {
  const [num, den] = text.split("/");
  return [BigInt(num), den === undefined ? 1n : BigInt(den)];
}

/** Exact raw moments E(statistic^m), m = 0..numMoments, as bigint pairs. */
export function wrappedMoments(
  spec: SpecArgs,
  numMoments: number
): Array<[bigint, bigint]> {
  const env = runCli([
    "moments",
    ...specFlags(spec),
    "--num-moments",
    String(numMoments),
  ]);
  return (env.result.raw as string[]).map(parseRational);
}

export interface CdfQuery {
  M: number;
  at?: number;
  quantile?: number;
  side?: "lower" | "upper";
}

export interface CdfValue {
  M: number;
  kind: string;
  error_bound: number;
  value: number;
}

/** CDF value or quantile of the reconstructed null law, with its certificate. */
export function wrappedReconstructCdf(spec: SpecArgs, query: CdfQuery): CdfValue {
  const flags = ["cdf", ...specFlags(spec), "--M", String(query.M)];
  if ((query.at === undefined) === (query.quantile === undefined)) {
    throw new Error("pass exactly one of at / quantile");
  }
  if (query.at !== undefined) flags.push("--at", String(query.at));
  if (query.quantile !== undefined) {
    flags.push("--quantile", String(query.quantile), "--side", query.side ?? "lower");
  }
  const { result } = runCli(flags);
  return {
    M: result.M,
    kind: result.kind,
    error_bound: result.error_bound,
    value: query.at !== undefined ? result.cdf : result.quantile,
  };
}

export interface TestOptions {
  p?: number;
  weights?: Array<string | number>;
  side?: Side;
  method?: "auto" | "oracle-pmf" | "exact-moments" | "clt";
  M?: number;
  alpha?: number;
  seed?: number;
}

function withSampleFiles<T>(samples: Record<string, number[]>, fn: (paths: Record<string, string>) => T): T {
  const dir = mkdtempSync(path.join(tmpdir(), "spacings-"));
  try {
    const paths: Record<string, string> = {};
    for (const [name, values] of Object.entries(samples)) {
      const file = path.join(dir, `${name}.txt`);
      writeFileSync(file, values.join("\n") + "\n", "utf8");
      paths[name] = file;
    }
    return fn(paths);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function commonTestFlags(opts: TestOptions): string[] {
  const flags: string[] = [];
  if (opts.p !== undefined) flags.push("--p", String(opts.p));
  if (opts.weights !== undefined) flags.push("--weights", opts.weights.map(String).join(","));
  if (opts.side !== undefined) flags.push("--side", opts.side);
  if (opts.M !== undefined) flags.push("--M", String(opts.M));
  if (opts.alpha !== undefined) flags.push("--alpha", String(opts.alpha));
  return flags;
}

/** Two-sample spacing test; delegates entirely to the CLI. */
export function wrappedTwoSampleTest(
  x: number[],
  y: number[],
  opts: TestOptions = {}
): BoundTestResult {
  return withSampleFiles({ x, y }, (paths) => {
    const flags = ["test2", "--x", paths.x, "--y", paths.y, ...commonTestFlags(opts)];
    if (opts.method !== undefined) flags.push("--method", opts.method);
    flags.push("--seed", String(opts.seed ?? 0));
    return runCli(flags).result as BoundTestResult;
  });
}

/** One-sample spacing test against a named null CDF ("uniform", "normal:0,1", "exp:2"). */
export function wrappedOneSampleTest(
  z: number[],
  nullCdf: string,
  opts: TestOptions = {}
): BoundTestResult {
  return withSampleFiles({ z }, (paths) => {
    const flags = ["test1", "--sample", paths.z, "--null", nullCdf, ...commonTestFlags(opts)];
    return runCli(flags).result as BoundTestResult;
  });
}
