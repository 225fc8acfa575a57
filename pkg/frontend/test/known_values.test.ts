import { describe, expect, it } from "vitest";

import {
  boundEvalR,
  boundIsotonic,
  boundMetrics,
  boundProx,
  decodeVectors,
  encodeVectors,
} from "../src/index.js";

function near(actual: ArrayLike<number>, expected: number[], atol = 1e-12): void {
  expect(actual.length).toBe(expected.length);
  for (let i = 0; i < expected.length; i++) {
    expect(Math.abs(actual[i] - expected[i])).toBeLessThanOrEqual(atol);
  }
}

describe("boundProx known values", () => {
  it("two points collapse to their midpoint", () => {
    const w = Float64Array.from([0, 1]);
    const { values, clusters } = boundProx(w, { alpha: 1 });
    near(values, [0.5, 0.5]);
    expect(clusters.length).toBe(1);
    expect(clusters[0]).toMatchObject({ start: 0, size: 2, zeroed: false });
    near(w, [0, 1]); // input unmutated
  });

  it("rewound soft threshold on [1, 0.2, -1]", () => {
    const { values } = boundProx(Float64Array.from([1, 0.2, -1]), {
      alpha: 0,
      beta: 0.3,
      rho: 0.5,
    });
    near(values, [0.85, 0, -0.85]);
  });

  it("rho = 1 with alpha = 0 is hard thresholding", () => {
    const { values } = boundProx(Float64Array.from([1, 0.2, -1]), {
      alpha: 0,
      beta: 0.3,
      rho: 1,
    });
    near(values, [1, 0, -1], 0);
  });

  it("rejects non-finite input without spawning", () => {
    expect(() => boundProx(Float64Array.from([1, NaN]))).toThrow(/non-finite/);
  });

  it("rejects empty input", () => {
    expect(() => boundProx(new Float64Array(0))).toThrow(/nonempty/);
  });
});

describe("boundIsotonic known values", () => {
  it("reproduces the grazing counterexample fit", () => {
    const fit = boundIsotonic(Float64Array.from([0.7, 1, 0.9, 0.99]));
    near(fit, [0.7, 0.95, 0.95, 0.99]);
  });
});

describe("boundEvalR known values", () => {
  it("constant vector has zero penalty", () => {
    expect(boundEvalR(Float64Array.from([5, 5, 5]))).toBe(0);
  });

  it("[0, 1, 2] evaluates to 2", () => {
    expect(boundEvalR(Float64Array.from([0, 1, 2]))).toBe(2);
  });
});

describe("boundMetrics known values", () => {
  it("[1, 1, 2, 0] has weight sharing 1/3", () => {
    const m = boundMetrics(Float64Array.from([1, 1, 2, 0]));
    expect(m.weight_sharing).toBeCloseTo(1 / 3, 12);
    expect(m.nonzero_count).toBe(3);
    expect(m.distinct_nonzero).toBe(2);
  });
});

describe("binary vector format", () => {
  it("round-trips multiple records bit-exactly", () => {
    const vecs = [
      Float64Array.from([1.5, -0, Number.MIN_VALUE, 1e300]),
      Float64Array.from([0.1]),
    ];
    const decoded = decodeVectors(encodeVectors(vecs));
    expect(decoded.length).toBe(2);
    for (let k = 0; k < vecs.length; k++) {
      for (let i = 0; i < vecs[k].length; i++) {
        expect(Object.is(decoded[k][i], vecs[k][i])).toBe(true);
      }
    }
  });

  it("rejects truncated payloads", () => {
    const buf = encodeVectors([Float64Array.from([1, 2, 3])]);
    expect(() => decodeVectors(buf.subarray(0, buf.length - 1))).toThrow(/truncated/);
  });

  it("rejects a missing magic", () => {
    expect(() => decodeVectors(Buffer.from("not a vector file"))).toThrow(/magic/);
  });
});
