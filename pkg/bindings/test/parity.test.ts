/**
 * Parity corpus: every wrapper call must return exactly the payload the CLI
 * prints for the equivalent invocation, field for field.
 */

import { mkdtempSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";
import { describe, expect, it } from "vitest";

import {
  runCli,
  wrappedMoments,
  wrappedOneSampleTest,
  wrappedReconstructCdf,
  wrappedTwoSampleTest,
  type SpecArgs,
} from "../src/index.js";

const GREENWOOD10 = Array(10).fill(1);
const SCALE_W = ["1", "1/5", "1/10", "0", "0", "0", "0", "1/10", "1/5", "1"];

function cliMoments(spec: SpecArgs, numMoments: number): string[] {
  const flags = ["moments", "--mode", spec.mode, "--k", String(spec.k), "--p", String(spec.p)];
  if (spec.mode === "discrete") flags.push("--n", String(spec.n));
  flags.push("--weights", spec.weights.map(String).join(","), "--num-moments", String(numMoments));
  return runCli(flags).result.raw as string[];
}

const momentFixtures: Array<{ spec: SpecArgs; M: number }> = [
  { spec: { mode: "discrete", n: 2, k: 2, p: 2, weights: [1, 1] }, M: 1 },
  { spec: { mode: "discrete", n: 2, k: 2, p: 2, weights: [1, 1] }, M: 0 },
  { spec: { mode: "continuous", k: 2, p: 2, weights: [1, 1] }, M: 1 },
  { spec: { mode: "discrete", n: 5, k: 3, p: 1, weights: ["1/2", 1, 2] }, M: 4 },
  { spec: { mode: "discrete", n: 8, k: 4, p: 3, weights: [3, 1, 0, 2] }, M: 3 },
  { spec: { mode: "continuous", k: 5, p: 2, weights: [1, 1, 1, 1, 1] }, M: 5 },
  { spec: { mode: "continuous", k: 3, p: 4, weights: ["1/3", "2/3", 1] }, M: 4 },
  { spec: { mode: "discrete", n: 1, k: 2, p: 1, weights: [1, 1] }, M: 5 },
];

describe("moments parity", () => {
  for (const [i, fx] of momentFixtures.entries()) {
    it(`fixture ${i}: ${fx.spec.mode} k=${fx.spec.k} M=${fx.M}`, () => {
      const pairs = wrappedMoments(fx.spec, fx.M);
      const raw = cliMoments(fx.spec, fx.M);
      expect(pairs.length).toBe(raw.length);
      for (let m = 0; m < raw.length; m++) {
        const [num, den] = pairs[m];
        const [rn, rd] = raw[m].includes("/") ? raw[m].split("/") : [raw[m], "1"];
        expect(num).toBe(BigInt(rn));
        expect(den).toBe(BigInt(rd));
      }
    });
  }

  it("known exact values", () => {
    expect(wrappedMoments(momentFixtures[0].spec, 1)[1]).toEqual([10n, 3n]);
    expect(wrappedMoments(momentFixtures[1].spec, 0)[0]).toEqual([1n, 1n]);
    expect(wrappedMoments(momentFixtures[2].spec, 1)[1]).toEqual([2n, 3n]);
  });
});

const cdfFixtures = [
  { spec: { mode: "continuous", k: 2, p: 1, weights: [1, 0] } as SpecArgs, query: { M: 50, at: 1.0 } },
  { spec: { mode: "continuous", k: 2, p: 1, weights: [1, 0] } as SpecArgs, query: { M: 50, quantile: 0.5 } },
  { spec: { mode: "continuous", k: 4, p: 2, weights: [1, 1, 1, 1] } as SpecArgs, query: { M: 120, at: 0.3 } },
  {
    spec: { mode: "discrete", n: 6, k: 3, p: 2, weights: [1, 1, 1] } as SpecArgs,
    query: { M: 120, quantile: 0.9, side: "upper" as const },
  },
];

describe("cdf parity", () => {
  for (const [i, fx] of cdfFixtures.entries()) {
    it(`fixture ${i}`, () => {
      const got = wrappedReconstructCdf(fx.spec, fx.query);
      const flags = ["cdf", "--mode", fx.spec.mode, "--k", String(fx.spec.k), "--p", String(fx.spec.p)];
      if (fx.spec.mode === "discrete") flags.push("--n", String(fx.spec.n));
      flags.push("--weights", fx.spec.weights.map(String).join(","), "--M", String(fx.query.M));
      if ("at" in fx.query && fx.query.at !== undefined) flags.push("--at", String(fx.query.at));
      else {
        flags.push("--quantile", String((fx.query as any).quantile), "--side", (fx.query as any).side ?? "lower");
      }
      const ref = runCli(flags).result;
      expect(got.M).toBe(ref.M);
      expect(got.kind).toBe(ref.kind);
      expect(got.error_bound).toBe(ref.error_bound);
      expect(got.value).toBe("at" in fx.query && fx.query.at !== undefined ? ref.cdf : ref.quantile);
    });
  }
});

const X = [0.31, 1.42, -0.57, 0.88, 2.05];
const Y = [0.1, -1.2, 0.77, 1.9, -0.33, 0.52, 1.11, -0.8, 0.05, 2.5, 0.61, -0.44];

const twoSampleFixtures = [
  { x: X, y: Y, opts: {} },
  { x: X, y: Y, opts: { p: 1, side: "right" as const, seed: 9 } },
  { x: X, y: Y, opts: { p: 2, method: "exact-moments" as const, M: 200, seed: 3 } },
  { x: X, y: Y, opts: { weights: ["1", "1/2", "0", "1/2", "1", "1"], seed: 5 } },
  { x: [1.0, 2.0], y: [] as number[], opts: {} },
  { x: [1.0, 1.0, 2.0], y: [1.0, 2.0, 3.0], opts: { seed: 42 } },
];

describe("two-sample parity", () => {
  for (const [i, fx] of twoSampleFixtures.entries()) {
    it(`fixture ${i}`, () => {
      const got = wrappedTwoSampleTest(fx.x, fx.y, fx.opts);
      const dir = mkdtempSync(path.join(tmpdir(), "parity-"));
      try {
        const xf = path.join(dir, "x.txt");
        const yf = path.join(dir, "y.txt");
        writeFileSync(xf, fx.x.join("\n") + "\n");
        writeFileSync(yf, fx.y.join("\n") + (fx.y.length ? "\n" : ""));
        const flags = ["test2", "--x", xf, "--y", yf];
        const opts = fx.opts as any;
        if (opts.p !== undefined) flags.push("--p", String(opts.p));
        if (opts.weights !== undefined) flags.push("--weights", opts.weights.join(","));
        if (opts.side !== undefined) flags.push("--side", opts.side);
        if (opts.M !== undefined) flags.push("--M", String(opts.M));
        if (opts.method !== undefined) flags.push("--method", opts.method);
        flags.push("--seed", String(opts.seed ?? 0));
        expect(got).toEqual(runCli(flags).result);
      } finally {
        rmSync(dir, { recursive: true, force: true });
      }
    });
  }

  it("same seed twice gives identical results", () => {
    const a = wrappedTwoSampleTest([1.0, 1.0], [1.0, 1.0, 2.0], { seed: 7 });
    const b = wrappedTwoSampleTest([1.0, 1.0], [1.0, 1.0, 2.0], { seed: 7 });
    expect(a).toEqual(b);
  });

  it("invalid weights length raises with the core diagnostic", () => {
    expect(() => wrappedTwoSampleTest(X, Y, { weights: [1, 1] })).toThrowError(/weights length/);
  });
});

const oneSampleFixtures = [
  { z: [0.1, 0.2, 0.35, 0.5, 0.8], nullCdf: "uniform", opts: { M: 200 } },
  { z: [0.5], nullCdf: "uniform", opts: { M: 50 } },
  { z: [-0.3, 0.7, 1.4, 0.2], nullCdf: "normal:0,1", opts: { p: 1, M: 200 } },
  { z: [0.4, 1.8, 0.9], nullCdf: "exp:1", opts: { side: "left" as const, M: 200 } },
];

describe("one-sample parity", () => {
  for (const [i, fx] of oneSampleFixtures.entries()) {
    it(`fixture ${i}`, () => {
      const got = wrappedOneSampleTest(fx.z, fx.nullCdf, fx.opts);
      const dir = mkdtempSync(path.join(tmpdir(), "parity-"));
      try {
        const zf = path.join(dir, "z.txt");
        writeFileSync(zf, fx.z.join("\n") + "\n");
        const flags = ["test1", "--sample", zf, "--null", fx.nullCdf];
        const opts = fx.opts as any;
        if (opts.p !== undefined) flags.push("--p", String(opts.p));
        if (opts.side !== undefined) flags.push("--side", opts.side);
        if (opts.M !== undefined) flags.push("--M", String(opts.M));
        expect(got).toEqual(runCli(flags).result);
      } finally {
        rmSync(dir, { recursive: true, force: true });
      }
    });
  }

  it("bad null spec raises", () => {
    expect(() => wrappedOneSampleTest([0.5], "normal:a,b", { M: 50 })).toThrowError(/normal:a,b/);
  });
});
