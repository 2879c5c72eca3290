import { describe, expect, it } from "vitest";

import {
  cdfPoints,
  histogramPdf,
  kde2dGrid,
  quantile,
  scottBandwidth1d,
  scottFactor,
  violinStats,
} from "../src/stats.js";

describe("histogramPdf", () => {
  it("integrates to one", () => {
    const values = Array.from({ length: 500 }, (_, i) => Math.sin(i) * 10 + i / 50);
    const bins = histogramPdf(values, 16);
    const area = bins.reduce((a, b) => a + b.density * (b.hi - b.lo), 0);
    expect(area).toBeCloseTo(1, 9);
  });

  it("puts a uniform sample at uniform density", () => {
    // the range ends at 399/400, so densities sit ~0.25% above 1
    const values = Array.from({ length: 400 }, (_, i) => i / 400);
    const bins = histogramPdf(values, 4);
    for (const b of bins) {
      expect(b.density).toBeCloseTo(1, 2);
    }
  });

  it("handles empty and constant input", () => {
    expect(histogramPdf([], 8)).toEqual([]);
    const bins = histogramPdf([3, 3, 3], 4);
    const area = bins.reduce((a, b) => a + b.density * (b.hi - b.lo), 0);
    expect(area).toBeCloseTo(1, 9);
  });
});

describe("cdfPoints", () => {
  it("is monotone from 1/n to 1", () => {
    const pts = cdfPoints([5, 1, 4, 2, 3]);
    expect(pts[0]).toEqual([1, 0.2]);
    expect(pts[4]).toEqual([5, 1]);
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i][0]).toBeGreaterThanOrEqual(pts[i - 1][0]);
      expect(pts[i][1]).toBeGreaterThan(pts[i - 1][1]);
    }
  });
});

describe("quantile", () => {
  it("matches hand values with linear interpolation", () => {
    const values = [0, 10, 20, 30, 40];
    expect(quantile(values, 0)).toBe(0);
    expect(quantile(values, 0.5)).toBe(20);
    expect(quantile(values, 1)).toBe(40);
    expect(quantile(values, 0.125)).toBeCloseTo(5, 9);
  });
});

describe("violinStats", () => {
  it("orders the five-number summary and peaks near the mode", () => {
    const values = [
      ...Array.from({ length: 200 }, () => 10 + Math.sin(Math.random()) * 0.5),
      ...Array.from({ length: 20 }, (_, i) => i),
    ];
    const stats = violinStats(values)!;
    expect(stats.min).toBeLessThanOrEqual(stats.q1);
    expect(stats.q1).toBeLessThanOrEqual(stats.median);
    expect(stats.median).toBeLessThanOrEqual(stats.q3);
    expect(stats.q3).toBeLessThanOrEqual(stats.max);
    const peak = stats.profile.reduce((a, b) => (b[1] > a[1] ? b : a));
    expect(Math.abs(peak[0] - 10)).toBeLessThan(2);
  });

  it("returns null on empty input", () => {
    expect(violinStats([])).toBeNull();
  });
});

describe("Scott's rule", () => {
  it("1-D bandwidth is sigma times n^(-1/5)", () => {
    const values = [2, 4, 4, 4, 5, 5, 7, 9]; // sigma = 2 (population)
    expect(scottBandwidth1d(values)).toBeCloseTo(2 * Math.pow(8, -0.2), 12);
  });

  it("2-D factor is n^(-1/6)", () => {
    expect(scottFactor(100, 2)).toBeCloseTo(Math.pow(100, -1 / 6), 12);
  });
});

describe("kde2dGrid", () => {
  it("concentrates density around a tight cluster", () => {
    const points: [number, number][] = Array.from({ length: 60 }, (_, i) => [
      100 + (i % 5), 200 + (i % 7),
    ]);
    const grid = kde2dGrid(points, 400, 400, 20);
    let best = { r: 0, c: 0, v: -1 };
    grid.values.forEach((row, r) =>
      row.forEach((v, c) => {
        if (v > best.v) best = { r, c, v };
      }),
    );
    // cluster at (100, 200) in a 400x400 pen, 20 cells of 20 px
    expect(best.c).toBe(5);
    expect(best.r).toBe(10);
  });

  it("integrates to roughly one when the mass is inside the pen", () => {
    // spread the points so the bandwidth stays wide relative to one cell,
    // otherwise midpoint integration undersamples the kernels
    const points: [number, number][] = Array.from({ length: 200 }, (_, i) => [
      60 + ((i * 37) % 280), 60 + ((i * 53) % 280),
    ]);
    const grid = kde2dGrid(points, 400, 400, 40);
    const cell = grid.cellW * grid.cellH;
    const mass = grid.values.flat().reduce((a, b) => a + b * cell, 0);
    expect(mass).toBeGreaterThan(0.9);
    expect(mass).toBeLessThan(1.1);
  });

  it("returns a zero grid for no points", () => {
    const grid = kde2dGrid([], 100, 100, 4);
    expect(grid.values.flat().every((v) => v === 0)).toBe(true);
  });
});
