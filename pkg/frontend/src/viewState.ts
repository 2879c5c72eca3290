/** Single source of truth for every view.
 *
 * All tabs render from one ViewState; transitions are pure functions so a
 * state change re-renders everything consistently and loading the same
 * bundle twice produces identical views.
 */

import type { Bundle } from "./bundle.js";

export type Tab = "graphs" | "video" | "animation" | "table";

export interface ViewState {
  selected: Set<number>;
  t0: number;
  t1: number;
  tab: Tab;
  cursor: number; // playback position, seconds
  speed: number; // playback rate multiplier
  playing: boolean;
}

export function initialState(bundle: Bundle): ViewState {
  return {
    selected: new Set(bundle.tracks),
    t0: 0,
    t1: bundle.meta.clip_seconds,
    tab: "graphs",
    cursor: 0,
    speed: 1,
    playing: false,
  };
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

/** Set the active time window, kept ordered and inside the clip. */
export function setWindow(state: ViewState, bundle: Bundle, t0: number, t1: number): ViewState {
  const lo = clamp(Math.min(t0, t1), 0, bundle.meta.clip_seconds);
  const hi = clamp(Math.max(t0, t1), 0, bundle.meta.clip_seconds);
  return { ...state, t0: lo, t1: hi, cursor: clamp(state.cursor, lo, hi) };
}

/** Toggle one track's selection; unknown IDs are ignored. */
export function toggleTrack(state: ViewState, bundle: Bundle, id: number): ViewState {
  if (!bundle.tracks.includes(id)) return state;
  const selected = new Set(state.selected);
  if (selected.has(id)) {
    selected.delete(id);
  } else {
    selected.add(id);
  }
  return { ...state, selected };
}

export function setTab(state: ViewState, tab: Tab): ViewState {
  return { ...state, tab };
}

/** Move the playback cursor, e.g. from a clicked data point. */
export function seek(state: ViewState, bundle: Bundle, second: number): ViewState {
  return { ...state, cursor: clamp(second, 0, bundle.meta.clip_seconds) };
}

export function setSpeed(state: ViewState, speed: number): ViewState {
  return { ...state, speed: clamp(speed, 0.25, 8) };
}

export function play(state: ViewState): ViewState {
  return { ...state, playing: true };
}

export function stop(state: ViewState): ViewState {
  return { ...state, playing: false };
}

/** Advance the cursor by elapsed wall time; stops at the window end. */
export function tick(state: ViewState, elapsedS: number): ViewState {
  if (!state.playing) return state;
  const next = state.cursor + elapsedS * state.speed;
  if (next >= state.t1) {
    return { ...state, cursor: state.t1, playing: false };
  }
  return { ...state, cursor: next };
}
