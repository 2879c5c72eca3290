"""End-to-end orchestration: ingest detections and frames, run tracking,
head tracking and behavior detection, evaluate against ground truth, and
export the analysis bundle.

File formats
------------
Detections CSV: header ``frame,x,y,w,h,conf`` with x,y the box centroid.
Ground-truth files add an ``id`` column. Frame-0 rows may carry
``head_x,head_y,head_w,head_h`` columns with the manual head initialization.
Behavior ground truth CSV: ``track_id,kind,start_s,end_s``.
Frame images: ``frame_%06d.png``, 8-bit RGB.
Bundle: one JSON document, ``schema_version`` 1.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from flocktrack import appearance, behavior, head, metrics
from flocktrack.association import AssociationConfig, matching_cascade
from flocktrack.behavior import BehaviorConfig, BehaviorEvent, BehaviorKind
from flocktrack.geometry import BoundingBox, Detection, PenLayout, TrackRecord, VideoMeta, polygon_centroid
from flocktrack.head import HeadConfig, HeadState, HeadStatus, HeadTarget
from flocktrack.kalman import MotionConfig, initiate
from flocktrack.metrics import ClipScore

SCHEMA_VERSION = 1

FrameSource = Callable[[int], np.ndarray]


class IngestError(ValueError):
    """Malformed input file; message carries the line number."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class PipelineConfig:
    video: VideoMeta = field(default_factory=VideoMeta)
    layout: Optional[PenLayout] = None
    motion: MotionConfig = field(default_factory=MotionConfig)
    association: AssociationConfig = field(default_factory=AssociationConfig)
    head: HeadConfig = field(default_factory=HeadConfig)
    behavior: BehaviorConfig = field(default_factory=BehaviorConfig)
    appearance_enabled: bool = True
    gallery_budget: int = 100
    match_radius_px: float = 50.0
    burn_in_s: float = 2.0

    @staticmethod
    def from_dict(doc: dict) -> "PipelineConfig":
        cfg = PipelineConfig()
        if "video" in doc:
            cfg.video = VideoMeta(**doc["video"])
        if "layout" in doc:
            lay = doc["layout"]
            cfg.layout = PenLayout(
                feeder=tuple(tuple(p) for p in lay["feeder"]),
                drinker=tuple(tuple(p) for p in lay["drinker"]),
                pen_bounds=BoundingBox.from_corners(*lay["pen_bounds"]),
            )
        for key, target in (
            ("motion", cfg.motion),
            ("association", cfg.association),
            ("head", cfg.head),
            ("behavior", cfg.behavior),
        ):
            for name, value in doc.get(key, {}).items():
                attr = "lam" if name == "lambda" else name
                if not hasattr(target, attr):
                    raise IngestError(f"unknown config key {key}.{name}")
                setattr(target, attr, value)
        for name in ("appearance_enabled", "gallery_budget", "match_radius_px", "burn_in_s"):
            if name in doc:
                setattr(cfg, name, doc[name])
        return cfg

    @staticmethod
    def load(path: str) -> "PipelineConfig":
        with open(path) as fh:
            return PipelineConfig.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# ingestion


def _parse_float(row: dict, key: str, line: int) -> float:
    try:
        return float(row[key])
    except (KeyError, TypeError, ValueError):
        raise IngestError(f"line {line}: bad or missing value for '{key}'")


def ingest_detections(path: str) -> Dict[int, List[Tuple[Detection, Optional[BoundingBox]]]]:
    """Parse a detections CSV into per-frame lists of (detection, head init)."""
    per_frame: Dict[int, List[Tuple[Detection, Optional[BoundingBox]]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "frame" not in reader.fieldnames:
            raise IngestError("line 1: missing header with a 'frame' column")
        prev_frame = -1
        for line, row in enumerate(reader, start=2):
            try:
                frame = int(row["frame"])
            except (TypeError, ValueError):
                raise IngestError(f"line {line}: bad frame index")
            x = _parse_float(row, "x", line)
            y = _parse_float(row, "y", line)
            w = _parse_float(row, "w", line)
            h = _parse_float(row, "h", line)
            conf = float(row["conf"]) if row.get("conf") not in (None, "") else 1.0
            try:
                det = Detection(frame, BoundingBox(x, y, w, h), conf)
            except ValueError as exc:
                raise IngestError(f"line {line}: {exc}")
            head_box = None
            if row.get("head_x") not in (None, ""):
                head_box = BoundingBox(
                    _parse_float(row, "head_x", line),
                    _parse_float(row, "head_y", line),
                    _parse_float(row, "head_w", line),
                    _parse_float(row, "head_h", line),
                )
            per_frame.setdefault(frame, []).append((det, head_box))
            prev_frame = max(prev_frame, frame)
    return per_frame


def ingest_ground_truth(path: str) -> List[TrackRecord]:
    """Parse a labeled CSV (detections format plus mandatory id column)."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise IngestError("line 1: ground-truth files need an 'id' column")
        for line, row in enumerate(reader, start=2):
            try:
                frame = int(row["frame"])
                track_id = int(row["id"])
            except (TypeError, ValueError):
                raise IngestError(f"line {line}: bad frame or id")
            box = BoundingBox(
                _parse_float(row, "x", line),
                _parse_float(row, "y", line),
                _parse_float(row, "w", line),
                _parse_float(row, "h", line),
            )
            head_box = None
            if row.get("head_x") not in (None, ""):
                head_box = BoundingBox(
                    _parse_float(row, "head_x", line),
                    _parse_float(row, "head_y", line),
                    _parse_float(row, "head_w", line),
                    _parse_float(row, "head_h", line),
                )
            records.append(TrackRecord(frame, track_id, box, head_box))
    return records


def ingest_behavior_ground_truth(path: str) -> Tuple[List[BehaviorEvent], float]:
    """Parse behavior ground truth; returns events (in frames) and the fps used."""
    events = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fps = 30.0
        for line, row in enumerate(reader, start=2):
            try:
                kind = BehaviorKind(row["kind"])
            except (KeyError, ValueError):
                raise IngestError(f"line {line}: unknown behavior kind {row.get('kind')!r}")
            if row.get("fps") not in (None, ""):
                fps = float(row["fps"])
            start = int(round(_parse_float(row, "start_s", line) * fps))
            end = int(round(_parse_float(row, "end_s", line) * fps)) - 1
            events.append(BehaviorEvent(int(row["track_id"]), kind, start, max(start, end)))
    return events, fps


def directory_frames(frames_dir: str) -> FrameSource:
    """Frame source reading zero-padded PNG images from a directory."""
    from PIL import Image

    def load(frame: int) -> np.ndarray:
        path = os.path.join(frames_dir, f"frame_{frame:06d}.png")
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))

    return load


# ---------------------------------------------------------------------------
# analysis bundle


@dataclass
class AnalysisBundle:
    meta: dict
    trajectories: Dict[int, List[tuple]]  # id -> [(frame, x, y, w, h)]
    head_trajectories: Dict[int, List[tuple]]  # id -> [(frame, x, y, status)]
    per_second: List[tuple]  # (second, id, x, y, w, h)
    distance_series: Dict[int, List[tuple]]  # id -> [(second, cumulative_px)]
    events: List[BehaviorEvent]
    summaries: List[behavior.SummaryEntry]
    score: Optional[ClipScore] = None

    def track_ids(self) -> List[int]:
        return sorted(self.trajectories)

    def to_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "meta": self.meta,
            "tracks": self.track_ids(),
            "trajectories": {str(i): [list(r) for r in rows] for i, rows in self.trajectories.items()},
            "head_trajectories": {str(i): [list(r) for r in rows] for i, rows in self.head_trajectories.items()},
            "per_second": [list(r) for r in self.per_second],
            "distance_series": {str(i): [list(r) for r in rows] for i, rows in self.distance_series.items()},
            "events": [
                {"track_id": e.track_id, "kind": e.kind.value, "start": e.start, "end": e.end}
                for e in self.events
            ],
            "summaries": [
                {
                    "track_id": s.track_id,
                    "kind": s.kind.value,
                    "count": s.count,
                    "total_s": s.total_s,
                    "mean_s": s.mean_s,
                }
                for s in self.summaries
            ],
        }
        if self.score is not None:
            doc["score"] = self.score.to_dict()
        return doc


def export_bundle(bundle: AnalysisBundle, path: str) -> None:
    """Write the bundle as one deterministic UTF-8 JSON document."""
    doc = bundle.to_dict()
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
    except OSError as exc:
        raise OSError(f"cannot write bundle to {path}: {exc}") from exc


def load_bundle(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise IngestError(f"unsupported bundle schema_version {doc.get('schema_version')!r}")
    return doc


# ---------------------------------------------------------------------------
# pipeline


def _lost_head_fallback(body: BoundingBox, layout: Optional[PenLayout]) -> Tuple[float, float]:
    """Body-box edge point toward the nearer fixture, used when the head is lost."""
    if layout is None:
        return body.center
    targets = [polygon_centroid(layout.feeder), polygon_centroid(layout.drinker)]
    tx, ty = min(targets, key=lambda c: math.dist(body.center, c))
    dx, dy = tx - body.cx, ty - body.cy
    if dx == 0 and dy == 0:
        return body.center
    scale = min(
        (body.w / 2) / abs(dx) if dx else math.inf,
        (body.h / 2) / abs(dy) if dy else math.inf,
    )
    return (body.cx + dx * scale, body.cy + dy * scale)


def _prepare_head_region(
    img: np.ndarray,
    track,
    body: BoundingBox,
    cfg: HeadConfig,
    image_size: Tuple[int, int],
) -> head.PreparedRegion:
    """Contrast-enhance and convert just the pixels one track's head stage can
    touch: the dilated body box, the current search window and the init box,
    padded by one window so descent and clamping stay inside."""
    iw, ih = image_size
    dilated = body.dilated(cfg.body_dilation)
    x_lo, x_hi = dilated.x1, dilated.x2
    y_lo, y_hi = dilated.y1, dilated.y2
    if track.head is not None:
        hx, hy = track.head.current_center
        x_lo, x_hi = min(x_lo, hx), max(x_hi, hx)
        y_lo, y_hi = min(y_lo, hy), max(y_hi, hy)
    elif track.head_init is not None:
        x_lo, x_hi = min(x_lo, track.head_init.x1), max(x_hi, track.head_init.x2)
        y_lo, y_hi = min(y_lo, track.head_init.y1), max(y_hi, track.head_init.y2)
    margin = cfg.window_size
    x0 = max(0, int(math.floor(x_lo)) - margin)
    y0 = max(0, int(math.floor(y_lo)) - margin)
    x1 = min(iw, int(math.ceil(x_hi)) + margin + 1)
    y1 = min(ih, int(math.ceil(y_hi)) + margin + 1)
    crop = head.enhance_contrast(img[y0:y1, x0:x1], cfg.contrast_gain)
    return head.PreparedRegion(crop, x0, y0, image_size)


def run_pipeline(
    config: PipelineConfig,
    detections: Dict[int, List[Tuple[Detection, Optional[BoundingBox]]]],
    frames: Optional[FrameSource] = None,
    n_frames: Optional[int] = None,
) -> AnalysisBundle:
    """Track every frame in order, then derive behavior and the bundle."""
    if n_frames is None:
        n_frames = max(detections, default=-1) + 1
    fps = config.video.fps

    tracks: list = []
    next_id = 1
    records: List[TrackRecord] = []
    head_status: Dict[Tuple[int, int], str] = {}  # (frame, id) -> tracked|lost

    for f in range(n_frames):
        frame_rows = detections.get(f, [])
        dets = [d for d, _ in frame_rows]
        inits = [hb for _, hb in frame_rows]
        img = frames(f) if frames is not None else None

        alive = [t for t in tracks if not t.is_deleted]
        for t in alive:
            t.predict()

        feats = None
        if img is not None and config.appearance_enabled and dets:
            feats = [appearance.extract_feature(img, d.box) for d in dets]

        result = matching_cascade(alive, dets, feats, config.association, config.motion.max_age)
        for ti, dj in result.matches:
            t = alive[ti]
            t.update(dets[dj])
            if feats is not None:
                t.gallery.push(feats[dj])
            if inits[dj] is not None and t.head is None:
                t.head_init = inits[dj]
        for ti in result.unmatched_tracks:
            alive[ti].mark_missed()
        for dj in result.unmatched_detections:
            t = initiate(dets[dj], next_id, config.motion)
            next_id += 1
            t.gallery = appearance.FeatureGallery(budget=config.gallery_budget)
            if feats is not None:
                t.gallery.push(feats[dj])
            t.head_init = inits[dj]
            tracks.append(t)

        # head stage: initialize pending heads, then search/lost/recover/refresh
        if img is not None:
            active = [
                t
                for t in tracks
                if not t.is_deleted and (t.head is not None or t.head_init is not None)
            ]
            if active:
                ih, iw = img.shape[:2]
                for t in sorted(active, key=lambda t: t.id):
                    body = t.last_box if t.time_since_update == 0 else t.box()
                    region = _prepare_head_region(img, t, body, config.head, (iw, ih))
                    if t.head is None:
                        center = (int(round(t.head_init.cx)), int(round(t.head_init.cy)))
                        hists = region.histograms(center, config.head.patch_size, config.head.bins)
                        t.head = HeadState(HeadTarget(hists, center, f, config.head.patch_size), center)
                        t.head_init = None
                        continue
                    state: HeadState = t.head
                    if state.status is HeadStatus.TRACKED:
                        center, dist = head.search_head(region, state, config.head)
                        state.current_center = center
                        state.last_match_distance = dist
                        head.detect_lost(state, body, config.head)
                    if state.status is HeadStatus.LOST:
                        head.recover_head(state, region, body, config.head)
                    if state.status is HeadStatus.TRACKED:
                        head.refresh_target(state, region, f, fps, config.head)

        for t in tracks:
            if t.is_confirmed and t.time_since_update == 0:
                head_box = None
                if t.head is not None:
                    hx, hy = t.head.current_center
                    size = float(config.head.patch_size)
                    head_box = BoundingBox(float(hx), float(hy), size, size)
                    head_status[(f, t.id)] = t.head.status.value
                records.append(TrackRecord(f, t.id, t.last_box, head_box))

    return assemble_bundle(config, records, head_status, n_frames)


def assemble_bundle(
    config: PipelineConfig,
    records: Sequence[TrackRecord],
    head_status: Dict[Tuple[int, int], str],
    n_frames: int,
) -> AnalysisBundle:
    """Behavior detection plus all derived tables for one clip."""
    fps = config.video.fps
    trajectories: Dict[int, List[tuple]] = {}
    head_trajectories: Dict[int, List[tuple]] = {}
    for r in sorted(records, key=lambda r: (r.track_id, r.frame)):
        trajectories.setdefault(r.track_id, []).append((r.frame, r.box.cx, r.box.cy, r.box.w, r.box.h))
        if r.head is not None:
            status = head_status.get((r.frame, r.track_id), "tracked")
            head_trajectories.setdefault(r.track_id, []).append((r.frame, r.head.cx, r.head.cy, status))

    # behavior inputs: body trajectory for walking, head points for feeding
    events: List[BehaviorEvent] = []
    by_frame_body = {
        tid: {row[0]: (row[1], row[2], row[3], row[4]) for row in rows} for tid, rows in trajectories.items()
    }
    for tid, rows in trajectories.items():
        events.extend(
            behavior.detect_walking(tid, [(r[0], r[1], r[2]) for r in rows], fps, config.behavior)
        )
    if config.layout is not None:
        for tid, rows in head_trajectories.items():
            points = []
            for frame, hx, hy, status in rows:
                if status == "tracked":
                    points.append((frame, hx, hy))
                else:
                    bx, by, bw, bh = by_frame_body[tid][frame]
                    px, py = _lost_head_fallback(BoundingBox(bx, by, bw, bh), config.layout)
                    points.append((frame, px, py))
            if points:
                events.extend(behavior.detect_feeding(tid, points, config.layout, fps, config.behavior))
    events.sort(key=lambda e: (e.track_id, e.kind.value, e.start))
    summaries = behavior.summarize(events, fps)

    per_second: List[tuple] = []
    distance_series: Dict[int, List[tuple]] = {}
    n_seconds = int(n_frames / fps)
    for tid, rows in trajectories.items():
        frames_map = {row[0]: row for row in rows}
        cum = 0.0
        cum_by_frame = {}
        prev = None
        for row in rows:
            if prev is not None:
                cum += math.hypot(row[1] - prev[1], row[2] - prev[2])
            cum_by_frame[row[0]] = cum
            prev = row
        series = []
        for s in range(n_seconds + 1):
            f = int(round(s * fps))
            if f in frames_map:
                _, x, y, w, h = frames_map[f]
                per_second.append((s, tid, x, y, w, h))
                series.append((s, cum_by_frame[f]))
        distance_series[tid] = series
    per_second.sort()

    meta = {
        "width": config.video.width,
        "height": config.video.height,
        "fps": fps,
        "n_frames": n_frames,
        "clip_seconds": n_frames / fps,
    }
    return AnalysisBundle(
        meta=meta,
        trajectories=trajectories,
        head_trajectories=head_trajectories,
        per_second=per_second,
        distance_series=distance_series,
        events=events,
        summaries=summaries,
    )


# ---------------------------------------------------------------------------
# evaluation


def _records_to_frames(records: Sequence[TrackRecord], heads: bool = False, min_frame: int = 0):
    out: Dict[int, Dict[int, Tuple[float, float]]] = {}
    for r in records:
        if r.frame < min_frame:
            continue
        if heads:
            if r.head is None:
                continue
            out.setdefault(r.frame, {})[r.track_id] = r.head.center
        else:
            out.setdefault(r.frame, {})[r.track_id] = r.box.center
    return out


def evaluate(
    config: PipelineConfig,
    bundle: AnalysisBundle,
    gt_records: Sequence[TrackRecord],
    gt_events: Optional[Sequence[BehaviorEvent]] = None,
    burn_in_s: Optional[float] = None,
) -> ClipScore:
    """Score bundle tracks (body and head) and events against ground truth."""
    fps = bundle.meta["fps"]
    burn_in = int(round((burn_in_s if burn_in_s is not None else config.burn_in_s) * fps))
    hyp_records = [
        TrackRecord(int(row[0]), tid, BoundingBox(row[1], row[2], row[3], row[4]))
        for tid, rows in bundle.trajectories.items()
        for row in rows
    ]
    body = metrics.evaluate_tracking(
        _records_to_frames(gt_records, min_frame=burn_in),
        _records_to_frames(hyp_records, min_frame=burn_in),
        config.match_radius_px,
    )
    head_score = None
    gt_heads = _records_to_frames(gt_records, heads=True, min_frame=burn_in)
    if gt_heads:
        hyp_heads: Dict[int, Dict[int, Tuple[float, float]]] = {}
        for tid, rows in bundle.head_trajectories.items():
            for frame, hx, hy, status in rows:
                if frame >= burn_in and status == "tracked":
                    hyp_heads.setdefault(frame, {})[tid] = (hx, hy)
        if hyp_heads:
            head_score = metrics.evaluate_tracking(gt_heads, hyp_heads, config.match_radius_px)

    event_reports = None
    if gt_events is not None:
        # align gt identities with tracker identities by majority co-location
        gt_frames = _records_to_frames(gt_records)
        hyp_frames = _records_to_frames(hyp_records)
        counts: Dict[Tuple[int, int], int] = {}
        for f, gts in gt_frames.items():
            hyps = hyp_frames.get(f, {})
            for gid, gc in gts.items():
                for hid, hc in hyps.items():
                    if math.dist(gc, hc) <= config.match_radius_px:
                        counts[(gid, hid)] = counts.get((gid, hid), 0) + 1
        gt_to_hyp: Dict[int, int] = {}
        used_hyp = set()
        for (gid, hid), _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if gid not in gt_to_hyp and hid not in used_hyp:
                gt_to_hyp[gid] = hid
                used_hyp.add(hid)
        remapped = [
            BehaviorEvent(gt_to_hyp.get(e.track_id, -e.track_id), e.kind, e.start, e.end)
            for e in gt_events
        ]
        event_reports = metrics.evaluate_events(remapped, bundle.events, fps)

    score = ClipScore(body=body, head=head_score, events=event_reports)
    bundle.score = score
    return score
