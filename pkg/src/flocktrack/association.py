"""Per-frame assignment of detections to tracks.

Costs combine gated Mahalanobis and appearance cosine distances; assignment
is solved optimally (Hungarian); a matching cascade prioritizes recently
updated tracks, with an IOU fallback for tentative and leftover tracks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import chi2

from flocktrack import appearance
from flocktrack.geometry import Detection, iou
from flocktrack.kalman import Track

INFEASIBLE = np.inf

# 95th percentile of chi-square with 2 dof: the measurement is position-only
MAHA_GATE_95 = float(chi2.ppf(0.95, df=2))


@dataclass
class AssociationConfig:
    lam: float = 0.0
    cos_gate: float = 0.25
    maha_gate: float = MAHA_GATE_95
    iou_fallback_gate: float = 0.3


@dataclass
class AssignmentResult:
    matches: List[Tuple[int, int]] = field(default_factory=list)
    unmatched_tracks: List[int] = field(default_factory=list)
    unmatched_detections: List[int] = field(default_factory=list)


def build_costs(
    tracks: Sequence[Track],
    detections: Sequence[Detection],
    det_features: Optional[Sequence[np.ndarray]] = None,
    config: Optional[AssociationConfig] = None,
) -> np.ndarray:
    """Cost matrix lam*(maha/gate) + (1-lam)*cos, INFEASIBLE where gated out.

    `det_features` holds one appearance feature per detection; when None the
    appearance term is zero and only the Mahalanobis gate applies.
    """
    cfg = config or AssociationConfig()
    costs = np.full((len(tracks), len(detections)), INFEASIBLE)
    for i, track in enumerate(tracks):
        for j, det in enumerate(detections):
            maha = track.gating_distance(det)
            if maha > cfg.maha_gate:
                continue
            if det_features is not None and track.gallery is not None and len(track.gallery) > 0:
                cos = appearance.cosine_distance(det_features[j], track.gallery)
                if cos > cfg.cos_gate:
                    continue
            else:
                cos = 0.0
            costs[i, j] = cfg.lam * (maha / cfg.maha_gate) + (1.0 - cfg.lam) * cos
    return costs


def solve_assignment(costs: np.ndarray) -> AssignmentResult:
    """Minimum-total-cost matching over the feasible entries of `costs`."""
    n_tracks, n_dets = costs.shape
    result = AssignmentResult(
        unmatched_tracks=list(range(n_tracks)),
        unmatched_detections=list(range(n_dets)),
    )
    if n_tracks == 0 or n_dets == 0 or not np.isfinite(costs).any():
        return result
    finite = np.isfinite(costs)
    # cap infeasible entries so the solver never prefers them, then filter
    cap = costs[finite].max() * max(n_tracks, n_dets) + 1.0
    solvable = np.where(finite, costs, cap)
    rows, cols = linear_sum_assignment(solvable)
    matched_t, matched_d = set(), set()
    for r, c in zip(rows, cols):
        if finite[r, c]:
            result.matches.append((int(r), int(c)))
            matched_t.add(int(r))
            matched_d.add(int(c))
    result.matches.sort()
    result.unmatched_tracks = [i for i in range(n_tracks) if i not in matched_t]
    result.unmatched_detections = [j for j in range(n_dets) if j not in matched_d]
    return result


def _iou_costs(tracks: Sequence[Track], detections: Sequence[Detection], gate: float) -> np.ndarray:
    costs = np.full((len(tracks), len(detections)), INFEASIBLE)
    for i, track in enumerate(tracks):
        for j, det in enumerate(detections):
            overlap = iou(track.box(), det.box)
            if overlap >= gate:
                costs[i, j] = 1.0 - overlap
    return costs


def matching_cascade(
    tracks: Sequence[Track],
    detections: Sequence[Detection],
    det_features: Optional[Sequence[np.ndarray]] = None,
    config: Optional[AssociationConfig] = None,
    max_age: int = 30,
) -> AssignmentResult:
    """Cascade assignment: confirmed tracks by recency, then an IOU fallback.

    Confirmed tracks are matched in ascending time_since_update groups so the
    most recently updated tracks claim detections first. Detections left over
    are matched against tentative and still-unmatched confirmed tracks with
    cost 1 - IOU.
    """
    cfg = config or AssociationConfig()
    confirmed = [i for i, t in enumerate(tracks) if t.is_confirmed]
    tentative = [i for i, t in enumerate(tracks) if not t.is_confirmed and not t.is_deleted]

    matches: List[Tuple[int, int]] = []
    unmatched_dets = list(range(len(detections)))
    unmatched_confirmed = []
    for age in range(1, max_age + 2):
        if not unmatched_dets:
            unmatched_confirmed.extend(i for i in confirmed if tracks[i].time_since_update >= age)
            break
        group = [i for i in confirmed if tracks[i].time_since_update == age]
        if age == max_age + 1:
            # everything older falls into the last group
            group = [i for i in confirmed if tracks[i].time_since_update >= age]
        if not group:
            continue
        sub_dets = [detections[j] for j in unmatched_dets]
        sub_feats = [det_features[j] for j in unmatched_dets] if det_features is not None else None
        costs = build_costs([tracks[i] for i in group], sub_dets, sub_feats, cfg)
        res = solve_assignment(costs)
        for r, c in res.matches:
            matches.append((group[r], unmatched_dets[c]))
        unmatched_confirmed.extend(group[r] for r in res.unmatched_tracks)
        unmatched_dets = [unmatched_dets[c] for c in res.unmatched_detections]

    # IOU fallback: tentative tracks plus confirmed tracks left unmatched
    fallback = tentative + sorted(unmatched_confirmed)
    if fallback and unmatched_dets:
        sub_dets = [detections[j] for j in unmatched_dets]
        costs = _iou_costs([tracks[i] for i in fallback], sub_dets, cfg.iou_fallback_gate)
        res = solve_assignment(costs)
        for r, c in res.matches:
            matches.append((fallback[r], unmatched_dets[c]))
        unmatched_tracks = [fallback[r] for r in res.unmatched_tracks]
        unmatched_dets = [unmatched_dets[c] for c in res.unmatched_detections]
    else:
        unmatched_tracks = fallback

    matches.sort()
    return AssignmentResult(
        matches=matches,
        unmatched_tracks=sorted(unmatched_tracks),
        unmatched_detections=sorted(unmatched_dets),
    )
