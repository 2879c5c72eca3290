/** Analysis bundle parsing and indexing.
 *
 * The bundle is the JSON file written by the `track` / `export` CLI
 * subcommands (schema_version 1). Everything the explorer shows derives
 * from it; this module validates the document and builds the lookups the
 * views need.
 */

export const SUPPORTED_SCHEMA = 1;

export interface BundleMeta {
  clip_seconds: number;
  fps: number;
  n_frames: number;
  width: number;
  height: number;
}

/** One per-second sample: [second, trackId, x, y, w, h]. */
export type PerSecondRow = [number, number, number, number, number, number];

/** One trajectory sample: [frame, x, y, w, h]. */
export type TrajectoryRow = [number, number, number, number, number];

export interface BehaviorEvent {
  track_id: number;
  kind: string;
  start: number; // frame, inclusive
  end: number; // frame, inclusive
}

export interface SummaryEntry {
  track_id: number;
  kind: string;
  count: number;
  total_s: number;
  mean_s: number;
}

export interface Bundle {
  meta: BundleMeta;
  tracks: number[];
  trajectories: Map<number, TrajectoryRow[]>;
  perSecond: PerSecondRow[];
  distanceSeries: Map<number, [number, number][]>;
  events: BehaviorEvent[];
  summaries: SummaryEntry[];
}

export class BundleError extends Error {}

function asNumberKeyMap<T>(raw: Record<string, T> | undefined): Map<number, T> {
  const out = new Map<number, T>();
  for (const [key, value] of Object.entries(raw ?? {})) {
    out.set(Number(key), value);
  }
  return out;
}

/** Validate and index a parsed bundle document. */
export function parseBundle(doc: unknown): Bundle {
  if (typeof doc !== "object" || doc === null) {
    throw new BundleError("bundle is not a JSON object");
  }
  const d = doc as Record<string, unknown>;
  if (d.schema_version !== SUPPORTED_SCHEMA) {
    throw new BundleError(
      `unsupported schema_version ${String(d.schema_version)} (expected ${SUPPORTED_SCHEMA})`,
    );
  }
  const meta = d.meta as BundleMeta | undefined;
  if (
    !meta ||
    typeof meta.fps !== "number" ||
    typeof meta.clip_seconds !== "number"
  ) {
    throw new BundleError("bundle meta is missing fps / clip_seconds");
  }
  const tracks = (d.tracks as number[] | undefined) ?? [];
  return {
    meta,
    tracks,
    trajectories: asNumberKeyMap(d.trajectories as Record<string, TrajectoryRow[]>),
    perSecond: (d.per_second as PerSecondRow[] | undefined) ?? [],
    distanceSeries: asNumberKeyMap(
      d.distance_series as Record<string, [number, number][]>,
    ),
    events: (d.events as BehaviorEvent[] | undefined) ?? [],
    summaries: (d.summaries as SummaryEntry[] | undefined) ?? [],
  };
}

/** Fetch and parse a bundle from a URL (the `serve` subcommand's tree). */
export async function loadBundle(url: string): Promise<Bundle> {
  const resp = await fetch(url);
  if (!resp.ok) {
    throw new BundleError(`fetch failed: ${resp.status} ${resp.statusText}`);
  }
  return parseBundle(await resp.json());
}

/** Optional sibling media.json: { "video": "clip.mp4" }. */
export async function loadMedia(url: string): Promise<string | null> {
  try {
    const resp = await fetch(url);
    if (!resp.ok) return null;
    const doc = (await resp.json()) as { video?: string };
    return typeof doc.video === "string" ? doc.video : null;
  } catch {
    return null;
  }
}

/** Per-second rows inside [t0, t1] for the selected tracks. */
export function rowsInWindow(
  bundle: Bundle,
  t0: number,
  t1: number,
  selected: ReadonlySet<number>,
): PerSecondRow[] {
  return bundle.perSecond.filter(
    ([second, id]) => second >= t0 && second <= t1 && selected.has(id),
  );
}

/** Cumulative distance travelled inside the window, per selected track. */
export function distanceTotalsInWindow(
  bundle: Bundle,
  t0: number,
  t1: number,
  selected: ReadonlySet<number>,
): Map<number, number> {
  const out = new Map<number, number>();
  for (const id of selected) {
    const series = bundle.distanceSeries.get(id) ?? [];
    const inside = series.filter(([s]) => s >= t0 && s <= t1);
    if (inside.length === 0) {
      out.set(id, 0);
      continue;
    }
    const last = inside[inside.length - 1][1];
    // the series is cumulative from track start; the window total is the
    // increase since the last sample before the window (zero at the start)
    const beforeIdx = series.findIndex(([s]) => s >= t0) - 1;
    const base = beforeIdx >= 0 ? series[beforeIdx][1] : 0;
    out.set(id, last - base);
  }
  return out;
}

/** Per-second step distances inside the window, per selected track. */
export function stepDistancesInWindow(
  bundle: Bundle,
  t0: number,
  t1: number,
  selected: ReadonlySet<number>,
): Map<number, number[]> {
  const out = new Map<number, number[]>();
  for (const id of selected) {
    const series = (bundle.distanceSeries.get(id) ?? []).filter(
      ([s]) => s >= t0 && s <= t1,
    );
    const steps: number[] = [];
    for (let i = 1; i < series.length; i++) {
      steps.push(series[i][1] - series[i - 1][1]);
    }
    out.set(id, steps);
  }
  return out;
}

/** Events overlapping the window (seconds), for the selected tracks. */
export function eventsInWindow(
  bundle: Bundle,
  t0: number,
  t1: number,
  selected: ReadonlySet<number>,
): BehaviorEvent[] {
  const fps = bundle.meta.fps;
  return bundle.events.filter(
    (e) =>
      selected.has(e.track_id) && e.start / fps <= t1 && (e.end + 1) / fps >= t0,
  );
}
