"""CLEAR-MOT tracking evaluation (MOTA, MOTP) and event-based behavior
metrics (precision, recall, insertions, deletions, interval IOU).

MOTA = 1 - (sum of misses + false positives + mismatches) / (sum of ground
truth counts). MOTP = summed center distance over matches / match count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from flocktrack.behavior import BehaviorEvent, BehaviorKind

Point = Tuple[float, float]


class EmptyGroundTruthError(ValueError):
    """MOTA undefined when the ground truth contains no objects."""


class NoMatchesError(ValueError):
    """MOTP undefined without a single matched pair."""


@dataclass
class FrameTally:
    """Per-frame correspondence counts and matched distances."""

    gt_count: int = 0
    matches: int = 0
    misses: int = 0
    false_positives: int = 0
    mismatches: int = 0
    distances: List[float] = field(default_factory=list)


def correspond_frame(
    gt: Dict[int, Point],
    hyp: Dict[int, Point],
    mapping: Dict[int, int],
    match_radius_px: float = 50.0,
) -> FrameTally:
    """One CLEAR-MOT correspondence step; `mapping` (gt id -> hyp id) is the
    persistent correspondence and is updated in place.

    Existing pairs survive while both sides are present and within the match
    radius; the rest are re-matched by minimum total center distance. A ground
    truth whose matched hypothesis id changed counts as a mismatch.
    """
    tally = FrameTally(gt_count=len(gt))
    kept: Dict[int, int] = {}
    for gid, hid in mapping.items():
        if gid in gt and hid in hyp:
            d = math.dist(gt[gid], hyp[hid])
            if d <= match_radius_px:
                kept[gid] = hid
                tally.distances.append(d)

    free_gt = [g for g in sorted(gt) if g not in kept]
    used_hyp = set(kept.values())
    free_hyp = [h for h in sorted(hyp) if h not in used_hyp]
    if free_gt and free_hyp:
        costs = np.full((len(free_gt), len(free_hyp)), np.inf)
        for i, gid in enumerate(free_gt):
            for j, hid in enumerate(free_hyp):
                d = math.dist(gt[gid], hyp[hid])
                if d <= match_radius_px:
                    costs[i, j] = d
        finite = np.isfinite(costs)
        if finite.any():
            cap = costs[finite].max() * max(costs.shape) + 1.0
            rows, cols = linear_sum_assignment(np.where(finite, costs, cap))
            for r, c in zip(rows, cols):
                if finite[r, c]:
                    gid, hid = free_gt[r], free_hyp[c]
                    if gid in mapping and mapping[gid] != hid:
                        tally.mismatches += 1
                    mapping[gid] = hid
                    kept[gid] = hid
                    tally.distances.append(float(costs[r, c]))

    tally.matches = len(kept)
    tally.misses = len(gt) - tally.matches
    tally.false_positives = len(hyp) - tally.matches
    return tally


def mota(tallies: Sequence[FrameTally]) -> float:
    """Multiple object tracking accuracy; may be negative."""
    g = sum(t.gt_count for t in tallies)
    if g == 0:
        raise EmptyGroundTruthError("no ground-truth objects in any frame")
    errors = sum(t.misses + t.false_positives + t.mismatches for t in tallies)
    return 1.0 - errors / g


def motp(tallies: Sequence[FrameTally]) -> float:
    """Mean matched center distance, pixels per match."""
    c = sum(t.matches for t in tallies)
    if c == 0:
        raise NoMatchesError("no matched pairs in any frame")
    return sum(sum(t.distances) for t in tallies) / c


@dataclass
class TrackingScore:
    mota: float
    motp: float
    misses: int
    false_positives: int
    mismatches: int
    gt_total: int
    match_total: int


def evaluate_tracking(
    gt: Dict[int, Dict[int, Point]],
    hyp: Dict[int, Dict[int, Point]],
    match_radius_px: float = 50.0,
) -> TrackingScore:
    """Score a clip: `gt` and `hyp` map frame -> {object id -> center}."""
    frames = sorted(set(gt) | set(hyp))
    mapping: Dict[int, int] = {}
    tallies = [correspond_frame(gt.get(f, {}), hyp.get(f, {}), mapping, match_radius_px) for f in frames]
    return TrackingScore(
        mota=mota(tallies),
        motp=motp(tallies),
        misses=sum(t.misses for t in tallies),
        false_positives=sum(t.false_positives for t in tallies),
        mismatches=sum(t.mismatches for t in tallies),
        gt_total=sum(t.gt_count for t in tallies),
        match_total=sum(t.matches for t in tallies),
    )


def interval_iou(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    """Intersection-over-union of two time intervals."""
    if a[0] > a[1] or b[0] > b[1]:
        raise ValueError("interval start must not exceed end")
    inter = max(0.0, min(a[1], b[1]) - max(a[0], b[0]))
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    if union == 0.0:
        return 1.0 if a == b else 0.0
    return inter / union


@dataclass
class EventMatchReport:
    true_positives: int = 0
    insertions: int = 0
    deletions: int = 0
    matched_ious: List[float] = field(default_factory=list)

    @property
    def precision(self) -> float:
        total = self.true_positives + self.insertions
        return self.true_positives / total if total else 1.0

    @property
    def recall(self) -> float:
        total = self.true_positives + self.deletions
        return self.true_positives / total if total else 1.0

    @property
    def mean_iou(self) -> float:
        return float(np.mean(self.matched_ious)) if self.matched_ious else 0.0


def match_intervals(gt: Sequence[Tuple[float, float]], hyp: Sequence[Tuple[float, float]]) -> EventMatchReport:
    """Greedy one-to-one interval matching by descending IOU (IOU > 0 only).

    Unmatched hypotheses are insertions; unmatched ground truths deletions.
    """
    pairs = []
    for i, g in enumerate(gt):
        for j, h in enumerate(hyp):
            v = interval_iou(g, h)
            if v > 0.0:
                pairs.append((-v, i, j))
    pairs.sort()
    report = EventMatchReport()
    used_gt, used_hyp = set(), set()
    for neg_iou, i, j in pairs:
        if i in used_gt or j in used_hyp:
            continue
        used_gt.add(i)
        used_hyp.add(j)
        report.true_positives += 1
        report.matched_ious.append(-neg_iou)
    report.deletions = len(gt) - len(used_gt)
    report.insertions = len(hyp) - len(used_hyp)
    return report


def _event_interval(e: BehaviorEvent, fps: float) -> Tuple[float, float]:
    return (e.start / fps, (e.end + 1) / fps)


def evaluate_events(
    gt_events: Sequence[BehaviorEvent],
    hyp_events: Sequence[BehaviorEvent],
    fps: float,
) -> Dict[str, EventMatchReport]:
    """Per-kind event reports; events are matched within (track, kind)."""
    keys = {(e.track_id, e.kind) for e in gt_events} | {(e.track_id, e.kind) for e in hyp_events}
    per_kind: Dict[str, EventMatchReport] = {k.value: EventMatchReport() for k in BehaviorKind}
    for track_id, kind in sorted(keys, key=lambda k: (k[0], k[1].value)):
        g = [_event_interval(e, fps) for e in gt_events if e.track_id == track_id and e.kind == kind]
        h = [_event_interval(e, fps) for e in hyp_events if e.track_id == track_id and e.kind == kind]
        sub = match_intervals(g, h)
        agg = per_kind[kind.value]
        agg.true_positives += sub.true_positives
        agg.insertions += sub.insertions
        agg.deletions += sub.deletions
        agg.matched_ious.extend(sub.matched_ious)
    return per_kind


@dataclass
class ClipScore:
    """Tracking + behavior evaluation for one hypothesis/ground-truth pair."""

    body: TrackingScore
    head: Optional[TrackingScore] = None
    events: Optional[Dict[str, EventMatchReport]] = None

    def to_dict(self) -> dict:
        out = {
            "body": {
                "mota": self.body.mota,
                "motp": self.body.motp,
                "misses": self.body.misses,
                "false_positives": self.body.false_positives,
                "mismatches": self.body.mismatches,
                "gt_total": self.body.gt_total,
            }
        }
        if self.head is not None:
            out["head"] = {"mota": self.head.mota, "motp": self.head.motp}
        if self.events is not None:
            out["events"] = {
                kind: {
                    "precision": rep.precision,
                    "recall": rep.recall,
                    "insertions": rep.insertions,
                    "deletions": rep.deletions,
                    "mean_iou": rep.mean_iou,
                    "true_positives": rep.true_positives,
                }
                for kind, rep in self.events.items()
            }
        return out
