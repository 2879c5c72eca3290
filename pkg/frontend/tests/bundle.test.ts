import { describe, expect, it } from "vitest";

import {
  BundleError,
  distanceTotalsInWindow,
  eventsInWindow,
  parseBundle,
  rowsInWindow,
} from "../src/bundle.js";
import { fixtureBundle, fixtureDoc } from "./fixture.js";

describe("parseBundle", () => {
  it("parses the fixture and indexes by numeric track id", () => {
    const bundle = fixtureBundle();
    expect(bundle.tracks).toEqual([1, 2, 3]);
    expect(bundle.trajectories.has(1)).toBe(true);
    expect(bundle.distanceSeries.get(2)!.length).toBeGreaterThan(0);
    expect(bundle.meta.fps).toBe(30);
  });

  it("rejects a wrong schema_version outright", () => {
    expect(() => parseBundle({ schema_version: 99 })).toThrow(BundleError);
    expect(() => parseBundle({ schema_version: 99 })).toThrow(/schema_version/);
  });

  it("rejects non-objects and missing meta", () => {
    expect(() => parseBundle(null)).toThrow(BundleError);
    expect(() => parseBundle({ schema_version: 1 })).toThrow(/meta/);
  });
});

describe("window queries", () => {
  const bundle = fixtureBundle();
  const all = new Set(bundle.tracks);

  it("full window returns every per-second row", () => {
    const rows = rowsInWindow(bundle, 0, bundle.meta.clip_seconds, all);
    expect(rows.length).toBe(bundle.perSecond.length);
  });

  it("narrowing the window and the selection filters rows", () => {
    const rows = rowsInWindow(bundle, 5, 10, new Set([1]));
    expect(rows.length).toBeGreaterThan(0);
    for (const [second, id] of rows) {
      expect(id).toBe(1);
      expect(second).toBeGreaterThanOrEqual(5);
      expect(second).toBeLessThanOrEqual(10);
    }
  });

  it("full-window distance totals equal the series endpoints", () => {
    const totals = distanceTotalsInWindow(bundle, 0, bundle.meta.clip_seconds, all);
    for (const id of bundle.tracks) {
      const series = bundle.distanceSeries.get(id)!;
      expect(totals.get(id)).toBeCloseTo(series[series.length - 1][1], 6);
    }
  });

  it("windowed totals sum to the full total over a partition", () => {
    const mid = 10;
    const full = distanceTotalsInWindow(bundle, 0, bundle.meta.clip_seconds, all);
    const a = distanceTotalsInWindow(bundle, 0, mid, all);
    const b = distanceTotalsInWindow(bundle, mid + 1, bundle.meta.clip_seconds, all);
    for (const id of bundle.tracks) {
      // window totals anchor on the sample before the window, so the two
      // halves recombine exactly
      expect(a.get(id)! + b.get(id)!).toBeCloseTo(full.get(id)!, 6);
    }
  });

  it("event window query keeps overlapping events only", () => {
    const bundleEvents = eventsInWindow(bundle, 0, bundle.meta.clip_seconds, all);
    expect(bundleEvents.length).toBe(bundle.events.length);
    const none = eventsInWindow(bundle, 0, bundle.meta.clip_seconds, new Set());
    expect(none.length).toBe(0);
  });
});
