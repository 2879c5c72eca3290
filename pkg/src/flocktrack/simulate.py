"""Deterministic synthetic flock generator.

Produces ground-truth body/head trajectories, behavior scripts, rendered
color frames, and a corrupted detection stream with exact corruption
accounting, so every downstream stage can be verified against known answers.

Determinism: all randomness comes from numpy's default_rng (PCG64), seeded
from the config. Identical configs give identical outputs.

Geometry: each bird wanders inside its own horizontal lane, so birds never
overlap and lanes stay well separated. The feeder is a vertical strip along
the left wall, the drinker along the right wall; every lane reaches both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from flocktrack.behavior import BehaviorEvent, BehaviorKind
from flocktrack.colorspace import hsv_to_rgb
from flocktrack.geometry import BoundingBox, Detection, PenLayout, TrackRecord, VideoMeta

BODY_SIZE = 40.0
HEAD_RADIUS = 10
HEAD_BOX = 20.0
HEAD_OFFSET = 10.0
FEEDER_DEPTH = 60.0
JITTER_CLAMP = 40.0  # keeps jittered boxes inside the default 50 px match radius
FP_CLEARANCE = 60.0  # false positives stay this far from every true center
FP_ID_BASE = 9000


class SimConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass
class OcclusionScript:
    bird: int  # 1-based bird id
    start_s: float
    duration_s: float


@dataclass
class SimConfig:
    seed: int = 0
    n_birds: int = 5
    clip_s: float = 60.0
    fps: float = 30.0
    width: int = 960
    height: int = 720
    speed_range: Tuple[float, float] = (2.5, 4.0)  # px/frame while walking
    behavior_script: bool = False
    # corruption
    miss_rate: float = 0.0
    fp_rate: float = 0.0
    jitter_sigma: float = 0.0
    n_id_swaps: int = 0
    match_radius_px: float = 50.0
    # scripted occlusions (detections dropped / head disc hidden)
    body_occlusions: List[OcclusionScript] = field(default_factory=list)
    head_occlusions: List[OcclusionScript] = field(default_factory=list)


@dataclass
class CorruptionLedger:
    """Exact accounting of the injected corruption, for metric cross-checks."""

    n_misses: int = 0
    n_false_positives: int = 0
    n_swaps_applied: int = 0
    expected_mismatches: int = 0
    jitter_distance_sum: float = 0.0
    gt_object_frames: int = 0

    def expected_mota(self) -> float:
        errors = self.n_misses + self.n_false_positives + self.expected_mismatches
        return 1.0 - errors / self.gt_object_frames

    def expected_motp(self) -> float:
        return self.jitter_distance_sum / (self.gt_object_frames - self.n_misses)


@dataclass
class SimOutput:
    config: SimConfig
    meta: VideoMeta
    layout: PenLayout
    n_frames: int
    gt_records: List[TrackRecord]
    gt_events: List[BehaviorEvent]
    detections: List[Detection]  # tracker input (no identities)
    head_inits: Dict[int, BoundingBox]  # bird id -> frame-0 head box
    hyp_records: List[TrackRecord]  # corrupted labeled stream for metric tests
    corruption: CorruptionLedger
    render_frame: Callable[[int], np.ndarray]
    body_colors: List[Tuple[int, int, int]] = field(default_factory=list)


def _lane_bounds(cfg: SimConfig, i: int) -> Tuple[float, float]:
    lane_h = cfg.height / cfg.n_birds
    return i * lane_h, (i + 1) * lane_h


def default_layout(cfg: SimConfig) -> PenLayout:
    w, h = float(cfg.width), float(cfg.height)
    feeder = ((0.0, 0.0), (FEEDER_DEPTH, 0.0), (FEEDER_DEPTH, h), (0.0, h))
    drinker = ((w - FEEDER_DEPTH, 0.0), (w, 0.0), (w, h), (w - FEEDER_DEPTH, h))
    bounds = BoundingBox.from_corners(4.0, 4.0, w - 4.0, h - 4.0)
    return PenLayout(feeder=feeder, drinker=drinker, pen_bounds=bounds)


# ---------------------------------------------------------------------------
# phase schedules


@dataclass
class _Phase:
    kind: str  # walk | pause | eat | drink
    start: int  # frame, inclusive
    end: int  # frame, exclusive
    target: Optional[str] = None  # walk phases only: arrive at "eat"/"drink" spot


def _wander_schedule(cfg: SimConfig, rng: np.random.Generator, n_frames: int, pauses: List[Tuple[int, int]]) -> List[_Phase]:
    """Alternating walk/pause phases; `pauses` forces pause intervals."""
    phases: List[_Phase] = []
    f = 0
    forced = sorted(pauses)
    while f < n_frames:
        nxt = forced[0] if forced else None
        if nxt is not None and f >= nxt[0]:
            end = min(nxt[1], n_frames)
            forced.pop(0)
            if end > f:
                phases.append(_Phase("pause", f, end))
                f = end
            continue
        walk_end = f + int(rng.uniform(10, 18) * cfg.fps)
        if nxt is not None:
            walk_end = min(walk_end, nxt[0])
        walk_end = min(walk_end, n_frames)
        if walk_end > f:
            phases.append(_Phase("walk", f, walk_end))
            f = walk_end
        if f >= n_frames or (nxt is not None and f >= nxt[0]):
            continue
        pause_end = min(f + int(rng.uniform(4, 6) * cfg.fps), n_frames)
        phases.append(_Phase("pause", f, pause_end))
        f = pause_end
    return phases


def _behavior_schedule(cfg: SimConfig, n_frames: int) -> List[_Phase]:
    """Fixed walk/eat/walk/drink/walk/pause timeline for behavior scoring.

    Walk phases that precede a fixture dwell steer to the fixture so the
    dwell interval is spent entirely at the fixture.
    """
    if cfg.clip_s < 90:
        raise SimConfigError("behavior_script needs clips of at least 90 s")
    fps = cfg.fps

    def fr(s: float) -> int:
        return min(int(round(s * fps)), n_frames)

    marks = [0.0, 28.0, 40.0, 68.0, 80.0, cfg.clip_s - 8.0, cfg.clip_s]
    kinds = ["walk", "eat", "walk", "drink", "walk", "pause"]
    targets = ["eat", None, "drink", None, None, None]
    phases = []
    for kind, target, s0, s1 in zip(kinds, targets, marks[:-1], marks[1:]):
        if fr(s1) > fr(s0):
            phases.append(_Phase(kind, fr(s0), fr(s1), target))
    return phases


# ---------------------------------------------------------------------------
# trajectory integration


def _integrate_bird(
    cfg: SimConfig,
    rng: np.random.Generator,
    lane: Tuple[float, float],
    phases: List[_Phase],
    n_frames: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Body centers and headings for one bird, one row per frame."""
    half = BODY_SIZE / 2.0
    y0, y1 = lane[0] + half + 5.0, lane[1] - half - 5.0
    if y1 <= y0:
        raise SimConfigError(f"lane too small for {cfg.n_birds} birds at height {cfg.height}")
    margin = min(150.0, cfg.width / 4.0)
    wander_x = (margin, cfg.width - margin)
    feed_x = FEEDER_DEPTH + 8.0  # head (offset toward the wall) lands inside the strip
    drink_x = cfg.width - FEEDER_DEPTH - 8.0

    pos = np.empty((n_frames, 2))
    heading = np.empty((n_frames, 2))
    cur = np.array([rng.uniform(*wander_x), rng.uniform(y0, y1)])
    head_dir = np.array([1.0, 0.0])
    mid_y = (y0 + y1) / 2.0

    for phase in phases:
        speed = rng.uniform(*cfg.speed_range)
        if phase.kind in ("eat", "drink"):
            target_x = feed_x if phase.kind == "eat" else drink_x
            fixture_dir = np.array([-1.0, 0.0]) if phase.kind == "eat" else np.array([1.0, 0.0])
            target = np.array([target_x, mid_y])
            for f in range(phase.start, phase.end):
                delta = target - cur
                dist = np.linalg.norm(delta)
                if dist > 1e-9:
                    step = min(speed, dist)
                    cur = cur + delta / dist * step
                    if dist > speed:
                        head_dir = delta / dist
                    else:
                        head_dir = fixture_dir
                else:
                    head_dir = fixture_dir
                pos[f] = cur
                heading[f] = head_dir
        elif phase.kind == "pause":
            for f in range(phase.start, phase.end):
                pos[f] = cur
                heading[f] = head_dir
        else:  # walk
            end_target = None
            if phase.target == "eat":
                end_target = np.array([feed_x, mid_y])
            elif phase.target == "drink":
                end_target = np.array([drink_x, mid_y])
            waypoint = np.array([rng.uniform(*wander_x), rng.uniform(y0, y1)])
            for f in range(phase.start, phase.end):
                remaining = phase.end - f
                if end_target is not None and np.linalg.norm(end_target - cur) >= (remaining - 1) * speed:
                    waypoint = end_target
                delta = waypoint - cur
                dist = np.linalg.norm(delta)
                while dist < speed:
                    if end_target is not None and waypoint is end_target:
                        # arrived early: hold position facing the fixture
                        break
                    waypoint = np.array([rng.uniform(*wander_x), rng.uniform(y0, y1)])
                    delta = waypoint - cur
                    dist = np.linalg.norm(delta)
                if dist >= speed:
                    head_dir = delta / dist
                    cur = cur + head_dir * speed
                elif dist > 1e-9:
                    head_dir = delta / dist
                    cur = cur + delta
                pos[f] = cur
                heading[f] = head_dir
    return pos, heading


def _phases_to_events(bird_id: int, phases: List[_Phase], behavior_script: bool) -> List[BehaviorEvent]:
    kinds = {
        "walk": BehaviorKind.WALKING,
        "eat": BehaviorKind.EATING,
        "drink": BehaviorKind.DRINKING,
    }
    events = []
    for p in phases:
        if p.kind in kinds and (behavior_script or p.kind == "walk"):
            events.append(BehaviorEvent(bird_id, kinds[p.kind], p.start, p.end - 1))
    return events


# ---------------------------------------------------------------------------
# corruption


def _apply_corruption(
    cfg: SimConfig,
    rng: np.random.Generator,
    centers: np.ndarray,  # (n_frames, n_birds, 2)
    occluded: np.ndarray,  # (n_frames, n_birds) bool
) -> Tuple[List[Detection], List[TrackRecord], CorruptionLedger]:
    n_frames, n_birds = centers.shape[:2]
    ledger = CorruptionLedger(gt_object_frames=int(n_frames * n_birds - occluded.sum()))

    # choose swap events up front; pairs must be far apart so the mismatch
    # count is exactly two per swap under the CLEAR-MOT correspondence rule
    min_sep = 2 * cfg.match_radius_px + JITTER_CLAMP + 5.0
    swaps: List[Tuple[int, int, int]] = []
    if cfg.n_id_swaps > 0:
        lo, hi = n_frames // 4, 3 * n_frames // 4
        attempts = 0
        while len(swaps) < cfg.n_id_swaps and attempts < 10000:
            attempts += 1
            f = int(rng.integers(lo, hi))
            a, b = rng.choice(n_birds, size=2, replace=False)
            if any(s[0] == f for s in swaps):
                continue
            if np.linalg.norm(centers[f, a] - centers[f, b]) > min_sep:
                swaps.append((f, int(a), int(b)))
        if len(swaps) < cfg.n_id_swaps:
            raise SimConfigError("could not place the requested id swaps")
        swaps.sort()
    ledger.n_swaps_applied = len(swaps)
    ledger.expected_mismatches = 2 * len(swaps)

    labels = list(range(n_birds))  # gt index -> hypothesis label index
    swap_iter = iter(swaps)
    pending = next(swap_iter, None)

    detections: List[Detection] = []
    hyp_records: List[TrackRecord] = []
    fp_counter = 0
    bounds_x = (30.0, cfg.width - 30.0)
    bounds_y = (30.0, cfg.height - 30.0)

    for f in range(n_frames):
        while pending is not None and pending[0] == f:
            _, a, b = pending
            labels[a], labels[b] = labels[b], labels[a]
            pending = next(swap_iter, None)
        frame_centers = centers[f]
        for i in range(n_birds):
            if occluded[f, i]:
                continue
            if cfg.miss_rate > 0 and rng.random() < cfg.miss_rate:
                ledger.n_misses += 1
                continue
            cx, cy = frame_centers[i]
            if cfg.jitter_sigma > 0:
                jit = rng.normal(0.0, cfg.jitter_sigma, 2)
                norm = math.hypot(*jit)
                if norm > JITTER_CLAMP:
                    jit = jit / norm * JITTER_CLAMP
                ledger.jitter_distance_sum += math.hypot(*jit)
                cx, cy = cx + jit[0], cy + jit[1]
            box = BoundingBox(cx, cy, BODY_SIZE, BODY_SIZE)
            detections.append(Detection(f, box, 1.0))
            hyp_records.append(TrackRecord(f, labels[i] + 1, box))
        if cfg.fp_rate > 0 and rng.random() < cfg.fp_rate:
            for _ in range(200):
                x = rng.uniform(*bounds_x)
                y = rng.uniform(*bounds_y)
                d = np.min(np.linalg.norm(frame_centers - np.array([x, y]), axis=1))
                if d >= FP_CLEARANCE:
                    fp_counter += 1
                    ledger.n_false_positives += 1
                    box = BoundingBox(x, y, BODY_SIZE, BODY_SIZE)
                    detections.append(Detection(f, box, 0.8))
                    hyp_records.append(TrackRecord(f, FP_ID_BASE + fp_counter, box))
                    break
    return detections, hyp_records, ledger


# ---------------------------------------------------------------------------
# rendering

_BACKGROUND = np.array([105, 105, 105], dtype=np.uint8)
_OCCLUDER = np.array([38, 32, 26], dtype=np.uint8)
_HEAD_BLUE = np.array([30.0, 60.0, 230.0])
_HEAD_RED = np.array([230.0, 40.0, 30.0])


def _bird_colors(n: int) -> List[Tuple[int, int, int]]:
    """Distinct pastel body tints: hue varies, saturation stays low."""
    colors = []
    for i in range(n):
        rgb = hsv_to_rgb(np.array([i / max(n, 1), 0.16, 0.92]))
        colors.append(tuple(int(round(c * 255)) for c in rgb))
    return colors


def _draw_disc(img: np.ndarray, center: Tuple[float, float], radius: float, color: np.ndarray) -> None:
    h, w = img.shape[:2]
    cx, cy = center
    x0, x1 = max(0, int(cx - radius) - 1), min(w, int(cx + radius) + 2)
    y0, y1 = max(0, int(cy - radius) - 1), min(h, int(cy + radius) + 2)
    if x1 <= x0 or y1 <= y0:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2
    img[y0:y1, x0:x1][mask] = color


def _draw_head(img: np.ndarray, center: Tuple[float, float], radius: float) -> None:
    """Head disc with a horizontal blue-to-red gradient."""
    h, w = img.shape[:2]
    cx, cy = center
    x0, x1 = max(0, int(cx - radius) - 1), min(w, int(cx + radius) + 2)
    y0, y1 = max(0, int(cy - radius) - 1), min(h, int(cy + radius) + 2)
    if x1 <= x0 or y1 <= y0:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2
    t = np.clip((xs - (cx - radius)) / (2 * radius), 0.0, 1.0)[..., None]
    grad = (1.0 - t) * _HEAD_BLUE + t * _HEAD_RED
    region = img[y0:y1, x0:x1]
    region[mask] = np.clip(np.rint(grad[mask]), 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# top level


def _occlusion_mask(scripts: List[OcclusionScript], cfg: SimConfig, n_frames: int, n_birds: int) -> np.ndarray:
    mask = np.zeros((n_frames, n_birds), dtype=bool)
    for s in scripts:
        if not 1 <= s.bird <= n_birds:
            raise SimConfigError(f"occlusion bird {s.bird} out of range")
        f0 = int(round(s.start_s * cfg.fps))
        f1 = min(int(round((s.start_s + s.duration_s) * cfg.fps)), n_frames)
        mask[f0:f1, s.bird - 1] = True
    return mask


def simulate(cfg: SimConfig) -> SimOutput:
    """Run the full simulation for one clip."""
    if cfg.n_birds <= 0:
        raise SimConfigError("n_birds must be positive")
    if not (0 <= cfg.miss_rate <= 1 and 0 <= cfg.fp_rate <= 1):
        raise SimConfigError("rates must lie in [0, 1]")
    n_frames = int(round(cfg.clip_s * cfg.fps))
    meta = VideoMeta(cfg.width, cfg.height, cfg.fps)
    layout = default_layout(cfg)
    rng_motion = np.random.default_rng([cfg.seed, 0])
    rng_corrupt = np.random.default_rng([cfg.seed, 1])

    body_occl = _occlusion_mask(cfg.body_occlusions, cfg, n_frames, cfg.n_birds)
    head_occl = _occlusion_mask(cfg.head_occlusions, cfg, n_frames, cfg.n_birds)

    # forced pauses around scripted occlusions keep the hidden bird stationary
    forced_pauses: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(cfg.n_birds)}
    for s in cfg.body_occlusions + cfg.head_occlusions:
        f0 = max(0, int(round((s.start_s - 1.0) * cfg.fps)))
        f1 = min(int(round((s.start_s + s.duration_s + 1.0) * cfg.fps)), n_frames)
        forced_pauses[s.bird - 1].append((f0, f1))

    centers = np.empty((n_frames, cfg.n_birds, 2))
    headings = np.empty((n_frames, cfg.n_birds, 2))
    gt_events: List[BehaviorEvent] = []
    for i in range(cfg.n_birds):
        if cfg.behavior_script:
            phases = _behavior_schedule(cfg, n_frames)
        else:
            phases = _wander_schedule(cfg, rng_motion, n_frames, forced_pauses[i])
        pos, heading = _integrate_bird(cfg, rng_motion, _lane_bounds(cfg, i), phases, n_frames)
        centers[:, i] = pos
        headings[:, i] = heading
        gt_events.extend(_phases_to_events(i + 1, phases, cfg.behavior_script))
    gt_events.sort(key=lambda e: (e.track_id, e.kind.value, e.start))

    head_centers = centers + HEAD_OFFSET * headings

    gt_records = []
    for f in range(n_frames):
        for i in range(cfg.n_birds):
            body = BoundingBox(centers[f, i, 0], centers[f, i, 1], BODY_SIZE, BODY_SIZE)
            head = BoundingBox(head_centers[f, i, 0], head_centers[f, i, 1], HEAD_BOX, HEAD_BOX)
            gt_records.append(TrackRecord(f, i + 1, body, head))

    head_inits = {
        i + 1: BoundingBox(head_centers[0, i, 0], head_centers[0, i, 1], HEAD_BOX, HEAD_BOX)
        for i in range(cfg.n_birds)
    }

    detections, hyp_records, ledger = _apply_corruption(cfg, rng_corrupt, centers, body_occl)

    colors = _bird_colors(cfg.n_birds)

    def render_frame(f: int) -> np.ndarray:
        img = np.empty((cfg.height, cfg.width, 3), dtype=np.uint8)
        img[:] = _BACKGROUND
        for i in range(cfg.n_birds):
            _draw_disc(img, tuple(centers[f, i]), BODY_SIZE / 2.0, np.array(colors[i], dtype=np.uint8))
            if head_occl[f, i]:
                # a dark occluder covers the head area instead of the disc
                _draw_disc(img, tuple(head_centers[f, i]), HEAD_RADIUS + 6, _OCCLUDER)
            else:
                _draw_head(img, tuple(head_centers[f, i]), HEAD_RADIUS)
        return img

    return SimOutput(
        config=cfg,
        meta=meta,
        layout=layout,
        n_frames=n_frames,
        gt_records=gt_records,
        gt_events=gt_events,
        detections=detections,
        head_inits=head_inits,
        hyp_records=hyp_records,
        corruption=ledger,
        render_frame=render_frame,
        body_colors=colors,
    )


# ---------------------------------------------------------------------------
# file output (same formats the pipeline ingests)


def _fmt(x: float) -> str:
    """Shortest representation that round-trips the float exactly."""
    return repr(float(x))


def write_outputs(sim: SimOutput, outdir: str, write_frames: bool = False) -> None:
    """Write detections/gt/behavior CSVs, a pipeline config, and frames."""
    import csv
    import json
    import os

    os.makedirs(outdir, exist_ok=True)
    fps = sim.meta.fps

    header = ["frame", "x", "y", "w", "h", "conf", "head_x", "head_y", "head_w", "head_h"]
    frame0_heads: Dict[int, BoundingBox] = {}
    for rec in sim.hyp_records:
        if rec.frame == 0 and rec.track_id in sim.head_inits:
            frame0_heads[id(rec)] = sim.head_inits[rec.track_id]
    with open(os.path.join(outdir, "detections.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for det, rec in zip(sim.detections, sim.hyp_records):
            row = [det.frame, _fmt(det.box.cx), _fmt(det.box.cy), _fmt(det.box.w), _fmt(det.box.h), _fmt(det.confidence)]
            hb = frame0_heads.get(id(rec))
            if hb is not None:
                row += [_fmt(hb.cx), _fmt(hb.cy), _fmt(hb.w), _fmt(hb.h)]
            else:
                row += ["", "", "", ""]
            writer.writerow(row)

    with open(os.path.join(outdir, "hyp.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "x", "y", "w", "h", "conf", "id"])
        for det, rec in zip(sim.detections, sim.hyp_records):
            writer.writerow(
                [rec.frame, _fmt(rec.box.cx), _fmt(rec.box.cy), _fmt(rec.box.w), _fmt(rec.box.h), _fmt(det.confidence), rec.track_id]
            )

    with open(os.path.join(outdir, "gt.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "x", "y", "w", "h", "conf", "id", "head_x", "head_y", "head_w", "head_h"])
        for rec in sim.gt_records:
            writer.writerow(
                [rec.frame, _fmt(rec.box.cx), _fmt(rec.box.cy), _fmt(rec.box.w), _fmt(rec.box.h), "1.0", rec.track_id]
                + [_fmt(rec.head.cx), _fmt(rec.head.cy), _fmt(rec.head.w), _fmt(rec.head.h)]
            )

    with open(os.path.join(outdir, "gt_behavior.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["track_id", "kind", "start_s", "end_s", "fps"])
        for e in sim.gt_events:
            writer.writerow([e.track_id, e.kind.value, _fmt(e.start / fps), _fmt((e.end + 1) / fps), _fmt(fps)])

    bounds = sim.layout.pen_bounds
    config_doc = {
        "video": {"width": sim.meta.width, "height": sim.meta.height, "fps": sim.meta.fps},
        "layout": {
            "feeder": [list(p) for p in sim.layout.feeder],
            "drinker": [list(p) for p in sim.layout.drinker],
            "pen_bounds": [bounds.x1, bounds.y1, bounds.x2, bounds.y2],
        },
    }
    with open(os.path.join(outdir, "config.json"), "w") as fh:
        json.dump(config_doc, fh, indent=2, sort_keys=True)

    if write_frames:
        from PIL import Image

        frames_dir = os.path.join(outdir, "frames")
        os.makedirs(frames_dir, exist_ok=True)
        for f in range(sim.n_frames):
            Image.fromarray(sim.render_frame(f)).save(os.path.join(frames_dir, f"frame_{f:06d}.png"))
