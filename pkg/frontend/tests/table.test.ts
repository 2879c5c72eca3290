import { describe, expect, it } from "vitest";

import { buildRows, sortRows } from "../src/table.js";
import { fixtureBundle } from "./fixture.js";

const bundle = fixtureBundle();

describe("buildRows", () => {
  it("joins per-second samples with cumulative distances", () => {
    const rows = buildRows(bundle.perSecond, bundle.distanceSeries);
    expect(rows.length).toBe(bundle.perSecond.length);
    const sample = rows.find((r) => r.track === 1 && r.second === 5)!;
    const series = bundle.distanceSeries.get(1)!;
    const expected = series.find(([s]) => s === 5)![1];
    expect(sample.distance).toBeCloseTo(expected, 9);
  });
});

describe("sortRows", () => {
  const rows = buildRows(bundle.perSecond, bundle.distanceSeries);

  it("sorts every column both directions", () => {
    for (const column of ["second", "track", "x", "y", "distance"] as const) {
      for (const ascending of [true, false]) {
        const sorted = sortRows(rows, column, ascending);
        for (let i = 1; i < sorted.length; i++) {
          const diff = sorted[i][column] - sorted[i - 1][column];
          expect(ascending ? diff : -diff).toBeGreaterThanOrEqual(0);
        }
      }
    }
  });

  it("is stable on ties and does not mutate its input", () => {
    const before = [...rows];
    const sorted = sortRows(rows, "second", true);
    expect(rows).toEqual(before);
    // ties on second keep the original relative order (track order)
    const atZero = sorted.filter((r) => r.second === sorted[0].second);
    const original = rows.filter((r) => r.second === sorted[0].second);
    expect(atZero).toEqual(original);
  });
});
