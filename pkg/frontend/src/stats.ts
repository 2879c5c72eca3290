/** Statistics behind the PDF, CDF, violin and 2-D density views. */

export interface HistogramBin {
  lo: number;
  hi: number;
  density: number;
}

/** Normalized histogram (probability density) over equal-width bins. */
export function histogramPdf(values: number[], nBins: number): HistogramBin[] {
  if (values.length === 0 || nBins < 1) return [];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const width = hi > lo ? (hi - lo) / nBins : 1;
  const counts = new Array<number>(nBins).fill(0);
  for (const v of values) {
    const idx = Math.min(nBins - 1, Math.floor((v - lo) / width));
    counts[idx] += 1;
  }
  return counts.map((c, i) => ({
    lo: lo + i * width,
    hi: lo + (i + 1) * width,
    density: c / (values.length * width),
  }));
}

/** Empirical CDF as (value, fraction <= value) points. */
export function cdfPoints(values: number[]): [number, number][] {
  const sorted = [...values].sort((a, b) => a - b);
  return sorted.map((v, i) => [v, (i + 1) / sorted.length]);
}

/** Linear-interpolated quantile of a sorted copy of the values. */
export function quantile(values: number[], q: number): number {
  if (values.length === 0) return NaN;
  const sorted = [...values].sort((a, b) => a - b);
  const pos = q * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

export interface ViolinStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  /** Mirrored density profile sampled over the value range. */
  profile: [number, number][];
}

/** Summary plus a smoothed density profile for a violin glyph. */
export function violinStats(values: number[], nSamples = 40): ViolinStats | null {
  if (values.length === 0) return null;
  const min = Math.min(...values);
  const max = Math.max(...values);
  const bw = scottBandwidth1d(values);
  const profile: [number, number][] = [];
  for (let i = 0; i < nSamples; i++) {
    const x = min + ((max - min) * i) / Math.max(1, nSamples - 1);
    profile.push([x, kde1d(values, x, bw)]);
  }
  return {
    min,
    q1: quantile(values, 0.25),
    median: quantile(values, 0.5),
    q3: quantile(values, 0.75),
    max,
    profile,
  };
}

function stddev(values: number[]): number {
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  const varSum = values.reduce((a, b) => a + (b - mean) ** 2, 0);
  return Math.sqrt(varSum / values.length);
}

/** Scott's rule bandwidth for a 1-D sample: sigma * n^(-1/5). */
export function scottBandwidth1d(values: number[]): number {
  const s = stddev(values);
  const bw = s * Math.pow(values.length, -1 / 5);
  return bw > 0 ? bw : 1;
}

function kde1d(values: number[], x: number, bw: number): number {
  const norm = 1 / (values.length * bw * Math.sqrt(2 * Math.PI));
  let acc = 0;
  for (const v of values) {
    const z = (x - v) / bw;
    acc += Math.exp(-0.5 * z * z);
  }
  return acc * norm;
}

/** Scott's rule for d-dimensional data: n^(-1/(d+4)) per-axis factor. */
export function scottFactor(n: number, d: number): number {
  return Math.pow(n, -1 / (d + 4));
}

export interface DensityGrid {
  x0: number;
  y0: number;
  cellW: number;
  cellH: number;
  /** values[row][col], row-major from (x0, y0). */
  values: number[][];
}

/** 2-D Gaussian KDE of positions on a regular grid, Scott's rule bandwidth. */
export function kde2dGrid(
  points: [number, number][],
  width: number,
  height: number,
  gridSize = 32,
): DensityGrid {
  const values: number[][] = Array.from({ length: gridSize }, () =>
    new Array<number>(gridSize).fill(0),
  );
  const grid: DensityGrid = {
    x0: 0,
    y0: 0,
    cellW: width / gridSize,
    cellH: height / gridSize,
    values,
  };
  if (points.length === 0) return grid;
  const factor = scottFactor(points.length, 2);
  const bwX = Math.max(1e-6, stddev(points.map((p) => p[0])) * factor);
  const bwY = Math.max(1e-6, stddev(points.map((p) => p[1])) * factor);
  const norm = 1 / (points.length * 2 * Math.PI * bwX * bwY);
  for (let r = 0; r < gridSize; r++) {
    const cy = (r + 0.5) * grid.cellH;
    for (let c = 0; c < gridSize; c++) {
      const cx = (c + 0.5) * grid.cellW;
      let acc = 0;
      for (const [px, py] of points) {
        const zx = (cx - px) / bwX;
        const zy = (cy - py) / bwY;
        acc += Math.exp(-0.5 * (zx * zx + zy * zy));
      }
      values[r][c] = acc * norm;
    }
  }
  return grid;
}
