/** Sorting for the per-second tabular view. */

import type { PerSecondRow } from "./bundle.js";

export const TABLE_COLUMNS = ["second", "track", "x", "y", "distance"] as const;
export type TableColumn = (typeof TABLE_COLUMNS)[number];

export interface TableRow {
  second: number;
  track: number;
  x: number;
  y: number;
  /** Cumulative distance for the track at that second. */
  distance: number;
}

export function buildRows(
  perSecond: PerSecondRow[],
  distanceSeries: Map<number, [number, number][]>,
): TableRow[] {
  const lookup = new Map<string, number>();
  for (const [id, series] of distanceSeries) {
    for (const [second, total] of series) {
      lookup.set(`${id}:${second}`, total);
    }
  }
  return perSecond.map(([second, track, x, y]) => ({
    second,
    track,
    x,
    y,
    distance: lookup.get(`${track}:${second}`) ?? 0,
  }));
}

/** Stable sort on one of the five columns. */
export function sortRows(
  rows: TableRow[],
  column: TableColumn,
  ascending: boolean,
): TableRow[] {
  const keyed = rows.map((row, i) => ({ row, i }));
  keyed.sort((a, b) => {
    const diff = a.row[column] - b.row[column];
    if (diff !== 0) return ascending ? diff : -diff;
    return a.i - b.i;
  });
  return keyed.map((k) => k.row);
}
