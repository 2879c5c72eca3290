"""Rule-based walking/eating/drinking event detection and summaries.

Walking: trailing-window path length over a fixed threshold. Eating and
drinking: head position inside the dilated feeder/drinker polygon. Events of
one kind closer than the minimum separation are merged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from flocktrack.geometry import PenLayout, Point, dilate_polygon, point_in_polygon, polygon_centroid


class BehaviorKind(enum.Enum):
    WALKING = "walking"
    EATING = "eating"
    DRINKING = "drinking"


@dataclass(frozen=True)
class BehaviorEvent:
    track_id: int
    kind: BehaviorKind
    start: int  # frame index, inclusive
    end: int  # frame index, inclusive

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"event start {self.start} after end {self.end}")

    def duration_s(self, fps: float) -> float:
        return (self.end - self.start + 1) / fps


@dataclass
class BehaviorConfig:
    walk_threshold_px: float = 60.0
    walk_window_s: float = 3.0
    fixture_margin_px: float = 15.0
    min_dwell_s: float = 1.0
    min_gap_s: float = 3.0


class LayoutMissingError(ValueError):
    """Feeding detection needs feeder/drinker polygons."""


def _runs_to_events(track_id: int, kind: BehaviorKind, frames: Sequence[int], active: Sequence[bool]) -> List[BehaviorEvent]:
    """Turn maximal active runs over (sorted) frames into events."""
    events = []
    start = None
    prev = None
    for f, a in zip(frames, active):
        if a and start is None:
            start = int(f)
        elif not a and start is not None:
            events.append(BehaviorEvent(track_id, kind, start, int(prev)))
            start = None
        prev = f
    if start is not None:
        events.append(BehaviorEvent(track_id, kind, start, int(prev)))
    return events


def _split_and_interpolate(points: Sequence[Tuple[int, float, float]], max_gap_frames: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Split a (frame, x, y) sequence at long gaps; fill short gaps linearly.

    Returns (frames, positions) pairs with contiguous integer frames.
    """
    pts = sorted(points)
    segments = []
    seg = [pts[0]] if pts else []
    for p in pts[1:]:
        if p[0] - seg[-1][0] > max_gap_frames:
            segments.append(seg)
            seg = [p]
        else:
            seg.append(p)
    if seg:
        segments.append(seg)

    out = []
    for seg in segments:
        frames = np.arange(seg[0][0], seg[-1][0] + 1)
        known_f = np.array([p[0] for p in seg], dtype=float)
        xs = np.interp(frames, known_f, [p[1] for p in seg])
        ys = np.interp(frames, known_f, [p[2] for p in seg])
        out.append((frames, np.stack([xs, ys], axis=1)))
    return out


def detect_walking(
    track_id: int,
    trajectory: Sequence[Tuple[int, float, float]],
    fps: float,
    config: Optional[BehaviorConfig] = None,
) -> List[BehaviorEvent]:
    """Walking events: trailing-window path length above the threshold.

    A frame is active when the cumulative step length over the trailing
    window exceeds the pixel threshold. Gaps up to the merge separation are
    interpolated; longer gaps split the trajectory.
    """
    cfg = config or BehaviorConfig()
    if not trajectory:
        return []
    window = max(1, int(round(cfg.walk_window_s * fps)))
    events: List[BehaviorEvent] = []
    for frames, pos in _split_and_interpolate(trajectory, int(round(cfg.min_gap_s * fps))):
        steps = np.linalg.norm(np.diff(pos, axis=0), axis=1)
        steps = np.concatenate([[0.0], steps])
        cum = np.cumsum(steps)
        trailing = cum.copy()
        if len(cum) > window:
            trailing[window:] = cum[window:] - cum[:-window]
        active = trailing > cfg.walk_threshold_px
        events.extend(_runs_to_events(track_id, BehaviorKind.WALKING, list(frames), list(active)))
    return merge_events(events, fps, cfg.min_gap_s)


def detect_feeding(
    track_id: int,
    head_points: Sequence[Tuple[int, float, float]],
    layout: PenLayout,
    fps: float,
    config: Optional[BehaviorConfig] = None,
) -> List[BehaviorEvent]:
    """Eating/drinking events from head proximity to the fixtures.

    Frames inside both dilated polygons go to the nearer polygon centroid
    (tie: eating). Runs shorter than the minimum dwell are dropped.
    """
    cfg = config or BehaviorConfig()
    if layout is None:
        raise LayoutMissingError("pen layout with feeder/drinker polygons is required")
    feeder = dilate_polygon(layout.feeder, cfg.fixture_margin_px)
    drinker = dilate_polygon(layout.drinker, cfg.fixture_margin_px)
    feeder_c = polygon_centroid(layout.feeder)
    drinker_c = polygon_centroid(layout.drinker)

    pts = sorted(head_points)
    frames = [p[0] for p in pts]
    eat_active, drink_active = [], []
    for _, x, y in pts:
        in_f = point_in_polygon((x, y), feeder)
        in_d = point_in_polygon((x, y), drinker)
        if in_f and in_d:
            df = math.hypot(x - feeder_c[0], y - feeder_c[1])
            dd = math.hypot(x - drinker_c[0], y - drinker_c[1])
            in_d = dd < df
            in_f = not in_d
        eat_active.append(in_f)
        drink_active.append(in_d)

    min_dwell = int(round(cfg.min_dwell_s * fps))
    events: List[BehaviorEvent] = []
    for kind, active in ((BehaviorKind.EATING, eat_active), (BehaviorKind.DRINKING, drink_active)):
        raw = _runs_to_events(track_id, kind, frames, active)
        raw = [e for e in raw if e.end - e.start + 1 >= min_dwell]
        events.extend(merge_events(raw, fps, cfg.min_gap_s))
    return events


def merge_events(events: Sequence[BehaviorEvent], fps: float, min_gap_s: float = 3.0) -> List[BehaviorEvent]:
    """Coalesce same-kind events separated by less than the minimum gap.

    The gap between two events is the number of frames strictly between
    them; a gap of exactly the minimum separation is kept.
    """
    by_key: Dict[Tuple[int, BehaviorKind], List[BehaviorEvent]] = {}
    for e in events:
        by_key.setdefault((e.track_id, e.kind), []).append(e)

    out: List[BehaviorEvent] = []
    for (track_id, kind), group in by_key.items():
        group.sort(key=lambda e: e.start)
        merged = [group[0]]
        for e in group[1:]:
            gap_s = (e.start - merged[-1].end - 1) / fps
            if gap_s < min_gap_s:
                merged[-1] = BehaviorEvent(track_id, kind, merged[-1].start, max(merged[-1].end, e.end))
            else:
                merged.append(e)
        out.extend(merged)
    out.sort(key=lambda e: (e.track_id, e.kind.value, e.start))
    return out


@dataclass(frozen=True)
class SummaryEntry:
    track_id: int
    kind: BehaviorKind
    count: int
    total_s: float
    mean_s: float


def summarize(events: Sequence[BehaviorEvent], fps: float) -> List[SummaryEntry]:
    """Per (track, kind) event counts and durations in seconds."""
    acc: Dict[Tuple[int, BehaviorKind], List[float]] = {}
    for e in events:
        acc.setdefault((e.track_id, e.kind), []).append(e.duration_s(fps))
    entries = [
        SummaryEntry(track_id, kind, len(durs), sum(durs), sum(durs) / len(durs))
        for (track_id, kind), durs in acc.items()
    ]
    entries.sort(key=lambda s: (s.track_id, s.kind.value))
    return entries
