/** Small SVG builders for the comparison and statistical views.
 *
 * Charts are plain SVG with data attributes on interactive elements so
 * click handling (and testing) can read back the underlying second.
 */

import type { BehaviorEvent, Bundle } from "./bundle.js";
import type { DensityGrid, HistogramBin, ViolinStats } from "./stats.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const TRACK_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export function trackColor(id: number): string {
  return TRACK_COLORS[(id - 1 + TRACK_COLORS.length * 100) % TRACK_COLORS.length];
}

export interface ChartSize {
  width: number;
  height: number;
}

function svgRoot(doc: Document, size: ChartSize, cls: string): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size.width} ${size.height}`);
  svg.setAttribute("width", String(size.width));
  svg.setAttribute("height", String(size.height));
  svg.setAttribute("class", cls);
  return svg;
}

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

/** Distance-vs-time lines with clickable points and event shading. */
export function distanceChart(
  doc: Document,
  bundle: Bundle,
  selected: ReadonlySet<number>,
  window: [number, number],
  events: BehaviorEvent[],
  size: ChartSize = { width: 480, height: 240 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "distance-chart");
  const [t0, t1] = window;
  const series = [...selected]
    .sort((a, b) => a - b)
    .map((id) => ({
      id,
      points: (bundle.distanceSeries.get(id) ?? []).filter(
        ([s]) => s >= t0 && s <= t1,
      ),
    }));
  const maxDist = Math.max(1, ...series.flatMap((s) => s.points.map((p) => p[1])));
  const sx = linearScale(t0, t1, 30, size.width - 10);
  const sy = linearScale(0, maxDist, size.height - 20, 10);

  // behavior events as shaded bands behind the lines
  const fps = bundle.meta.fps;
  for (const e of events) {
    const rect = doc.createElementNS(SVG_NS, "rect");
    const xa = sx(Math.max(t0, e.start / fps));
    const xb = sx(Math.min(t1, (e.end + 1) / fps));
    rect.setAttribute("x", String(xa));
    rect.setAttribute("y", "10");
    rect.setAttribute("width", String(Math.max(0, xb - xa)));
    rect.setAttribute("height", String(size.height - 30));
    rect.setAttribute("class", `event-band event-${e.kind}`);
    rect.setAttribute("fill", "#dddddd");
    rect.setAttribute("opacity", "0.5");
    svg.appendChild(rect);
  }

  for (const { id, points } of series) {
    if (points.length === 0) continue;
    const poly = doc.createElementNS(SVG_NS, "polyline");
    poly.setAttribute(
      "points",
      points.map(([s, d]) => `${sx(s)},${sy(d)}`).join(" "),
    );
    poly.setAttribute("fill", "none");
    poly.setAttribute("stroke", trackColor(id));
    svg.appendChild(poly);
    for (const [s, d] of points) {
      const dot = doc.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(sx(s)));
      dot.setAttribute("cy", String(sy(d)));
      dot.setAttribute("r", "3");
      dot.setAttribute("fill", trackColor(id));
      dot.setAttribute("class", "data-point");
      dot.dataset.second = String(s);
      dot.dataset.track = String(id);
      svg.appendChild(dot);
    }
  }
  return svg;
}

/** Trajectories color-coded by track, opacity ramping with time. */
export function trajectoryChart(
  doc: Document,
  bundle: Bundle,
  selected: ReadonlySet<number>,
  window: [number, number],
  size: ChartSize = { width: 480, height: 360 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "trajectory-chart");
  const fps = bundle.meta.fps;
  const [t0, t1] = window;
  const sx = linearScale(0, bundle.meta.width, 0, size.width);
  const sy = linearScale(0, bundle.meta.height, 0, size.height);
  for (const id of [...selected].sort((a, b) => a - b)) {
    const rows = (bundle.trajectories.get(id) ?? []).filter(
      ([f]) => f / fps >= t0 && f / fps <= t1,
    );
    // draw in short segments so opacity can encode time
    for (let i = 1; i < rows.length; i += 1) {
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(sx(rows[i - 1][1])));
      line.setAttribute("y1", String(sy(rows[i - 1][2])));
      line.setAttribute("x2", String(sx(rows[i][1])));
      line.setAttribute("y2", String(sy(rows[i][2])));
      line.setAttribute("stroke", trackColor(id));
      line.setAttribute("opacity", String(0.25 + (0.75 * i) / rows.length));
      svg.appendChild(line);
    }
  }
  return svg;
}

/** Probability density histogram as bars. */
export function pdfChart(
  doc: Document,
  bins: HistogramBin[],
  size: ChartSize = { width: 300, height: 160 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "pdf-chart");
  if (bins.length === 0) return svg;
  const maxDensity = Math.max(...bins.map((b) => b.density), 1e-12);
  const sx = linearScale(bins[0].lo, bins[bins.length - 1].hi, 0, size.width);
  for (const b of bins) {
    const rect = doc.createElementNS(SVG_NS, "rect");
    const h = (b.density / maxDensity) * (size.height - 10);
    rect.setAttribute("x", String(sx(b.lo)));
    rect.setAttribute("y", String(size.height - h));
    rect.setAttribute("width", String(Math.max(1, sx(b.hi) - sx(b.lo) - 1)));
    rect.setAttribute("height", String(h));
    rect.setAttribute("fill", "#4477aa");
    svg.appendChild(rect);
  }
  return svg;
}

/** Empirical CDF as a step-ish polyline. */
export function cdfChart(
  doc: Document,
  points: [number, number][],
  size: ChartSize = { width: 300, height: 160 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "cdf-chart");
  if (points.length === 0) return svg;
  const sx = linearScale(points[0][0], points[points.length - 1][0], 0, size.width);
  const sy = linearScale(0, 1, size.height - 5, 5);
  const poly = doc.createElementNS(SVG_NS, "polyline");
  poly.setAttribute("points", points.map(([v, p]) => `${sx(v)},${sy(p)}`).join(" "));
  poly.setAttribute("fill", "none");
  poly.setAttribute("stroke", "#228833");
  svg.appendChild(poly);
  return svg;
}

/** Mirrored density profile with quartile ticks. */
export function violinChart(
  doc: Document,
  stats: ViolinStats,
  size: ChartSize = { width: 120, height: 200 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "violin-chart");
  const mid = size.width / 2;
  const maxDensity = Math.max(...stats.profile.map((p) => p[1]), 1e-12);
  const sy = linearScale(stats.min, stats.max, size.height - 5, 5);
  const halfWidth = (d: number) => (d / maxDensity) * (mid - 5);
  const left = stats.profile.map(([v, d]) => `${mid - halfWidth(d)},${sy(v)}`);
  const right = [...stats.profile]
    .reverse()
    .map(([v, d]) => `${mid + halfWidth(d)},${sy(v)}`);
  const poly = doc.createElementNS(SVG_NS, "polygon");
  poly.setAttribute("points", [...left, ...right].join(" "));
  poly.setAttribute("fill", "#ccbb44");
  poly.setAttribute("opacity", "0.8");
  svg.appendChild(poly);
  for (const q of [stats.q1, stats.median, stats.q3]) {
    const tick = doc.createElementNS(SVG_NS, "line");
    tick.setAttribute("x1", String(mid - 12));
    tick.setAttribute("x2", String(mid + 12));
    tick.setAttribute("y1", String(sy(q)));
    tick.setAttribute("y2", String(sy(q)));
    tick.setAttribute("stroke", "#222222");
    svg.appendChild(tick);
  }
  return svg;
}

/** 2-D density as a shaded cell grid over pen coordinates. */
export function densityChart(
  doc: Document,
  grid: DensityGrid,
  size: ChartSize = { width: 320, height: 240 },
): SVGSVGElement {
  const svg = svgRoot(doc, size, "density-chart");
  const rows = grid.values.length;
  const cols = rows > 0 ? grid.values[0].length : 0;
  const maxV = Math.max(1e-12, ...grid.values.flat());
  const cellW = size.width / Math.max(1, cols);
  const cellH = size.height / Math.max(1, rows);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const shade = grid.values[r][c] / maxV;
      if (shade < 0.02) continue;
      const rect = doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(c * cellW));
      rect.setAttribute("y", String(r * cellH));
      rect.setAttribute("width", String(cellW));
      rect.setAttribute("height", String(cellH));
      rect.setAttribute("fill", "#aa3377");
      rect.setAttribute("opacity", String(shade));
      svg.appendChild(rect);
    }
  }
  return svg;
}
