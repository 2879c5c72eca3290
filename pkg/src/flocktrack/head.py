"""Color-histogram template tracking of each animal's head.

A 25x25 target patch is described by six 32-bin channel histograms (H, S, V
and L, a, b). Candidate patches inside a 50x50 search window are scored by a
weighted sum of per-channel cosine distances; the target is refreshed on a
fixed cadence; a lost head is detected by distance threshold plus a body
prior and recovered by a dense scan over the body box.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from flocktrack.colorspace import rgb_to_hsv, rgb_to_lab
from flocktrack.geometry import BoundingBox

# per-channel weights of the two color-space distance combinations
HSV_WEIGHTS = np.array([4 / 5, 1 / 10, 1 / 10])
LAB_WEIGHTS = np.array([2 / 5, 2 / 5, 1 / 5])
assert abs(HSV_WEIGHTS.sum() - 1.0) < 1e-12
assert abs(LAB_WEIGHTS.sum() - 1.0) < 1e-12


class EmptyPatchError(ValueError):
    """Patch clamped to the image has zero area."""


class ZeroHistogramError(ValueError):
    """Cosine distance of an all-zero histogram is undefined."""


class HeadStatus(enum.Enum):
    TRACKED = "tracked"
    LOST = "lost"


@dataclass
class HeadConfig:
    patch_size: int = 25
    window_size: int = 50
    stride: int = 20
    bins: int = 32
    lost_threshold: float = 0.35
    contrast_gain: float = 1.5
    refresh_period_s: float = 3.0
    recovery_stride: int = 5
    body_dilation: float = 0.10
    # local descent after the coarse window scan, one 3x3 pass per step
    refine_steps: Tuple[int, ...] = (4, 2, 1)


@dataclass(frozen=True)
class HeadTarget:
    histograms: np.ndarray  # (6, bins), each row sums to 1
    center: Tuple[int, int]
    last_update_frame: int
    patch_size: int = 25


@dataclass
class HeadState:
    target: HeadTarget
    current_center: Tuple[int, int]
    status: HeadStatus = HeadStatus.TRACKED
    last_match_distance: float = 0.0


def enhance_contrast(image: np.ndarray, gain: float = 1.5) -> np.ndarray:
    """Boost the HSV saturation channel by `gain` (clipped at 1).

    Input and output are 8-bit RGB. Gray pixels (S = 0) are fixed points.

    Equivalent to RGB -> HSV, S' = min(1, gain * S), HSV -> RGB, computed in
    closed form: with fixed hue and value, scaling S by k scales every
    channel's distance below the value channel by the same k.
    """
    rgb = image.astype(np.float64) / 255.0
    v = rgb.max(axis=-1)
    m = rgb.min(axis=-1)
    delta = v - m
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(v > 0, delta / np.where(v > 0, v, 1.0), 0.0)
        s_new = np.minimum(1.0, gain * s)
        k = np.where(s > 0, s_new / np.where(s > 0, s, 1.0), 1.0)
    out = v[..., None] - (v[..., None] - rgb) * k[..., None]
    return np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)


def _clamp_patch(image: np.ndarray, center: Tuple[int, int], size: int) -> np.ndarray:
    ih, iw = image.shape[:2]
    half = size // 2
    x1 = max(0, center[0] - half)
    y1 = max(0, center[1] - half)
    x2 = min(iw, center[0] + half + 1)
    y2 = min(ih, center[1] + half + 1)
    if x2 <= x1 or y2 <= y1:
        raise EmptyPatchError(f"patch at {center} lies outside the {iw}x{ih} image")
    return image[y1:y2, x1:x2]


def patch_histograms(image: np.ndarray, center: Tuple[int, int], size: int = 25, bins: int = 32) -> np.ndarray:
    """Six normalized channel histograms (H, S, V, L, a, b) for one patch."""
    patch = _clamp_patch(image, center, size)
    hsv = rgb_to_hsv(patch.astype(np.float64) / 255.0)
    lab = rgb_to_lab(patch)

    channels = [
        (hsv[..., 0], 0.0, 1.0),
        (hsv[..., 1], 0.0, 1.0),
        (hsv[..., 2], 0.0, 1.0),
        (lab[..., 0], 0.0, 100.0),
        (lab[..., 1], -128.0, 128.0),
        (lab[..., 2], -128.0, 128.0),
    ]
    hists = np.empty((6, bins))
    for row, (values, lo, hi) in enumerate(channels):
        idx = np.clip(((values.ravel() - lo) * bins / (hi - lo)).astype(int), 0, bins - 1)
        hist = np.bincount(idx, minlength=bins).astype(np.float64)
        hists[row] = hist / hist.sum()
    return hists


class PreparedRegion:
    """Precomputed per-pixel histogram bin indices for one image region.

    Scoring many candidate patches repeats the same color-space conversions,
    so this converts a region to HSV and Lab once and keeps the per-channel
    bin indices. Centers passed to :meth:`histograms` are in full-image
    coordinates; clamping uses the full image size, so the result matches
    :func:`patch_histograms` on the full image whenever the clamped patch
    lies inside the region.
    """

    def __init__(self, image: np.ndarray, x0: int = 0, y0: int = 0,
                 image_size: Optional[Tuple[int, int]] = None):
        self.x0, self.y0 = x0, y0
        rh, rw = image.shape[:2]
        self.region_w, self.region_h = rw, rh
        self.img_w, self.img_h = image_size if image_size is not None else (rw, rh)
        hsv = rgb_to_hsv(image.astype(np.float64) / 255.0)
        lab = rgb_to_lab(image)
        self._channels = (
            (hsv[..., 0], 0.0, 1.0),
            (hsv[..., 1], 0.0, 1.0),
            (hsv[..., 2], 0.0, 1.0),
            (lab[..., 0], 0.0, 100.0),
            (lab[..., 1], -128.0, 128.0),
            (lab[..., 2], -128.0, 128.0),
        )
        self._idx_cache: dict = {}

    def _indices(self, bins: int) -> np.ndarray:
        """(6, h, w) bin indices, channel c offset into [c*bins, (c+1)*bins)."""
        if bins not in self._idx_cache:
            rows = np.empty((6, self.region_h, self.region_w), dtype=np.intp)
            for c, (values, lo, hi) in enumerate(self._channels):
                idx = ((values - lo) * (bins / (hi - lo))).astype(np.intp)
                np.clip(idx, 0, bins - 1, out=idx)
                rows[c] = idx + c * bins
            self._idx_cache[bins] = rows
        return self._idx_cache[bins]

    def histograms(self, center: Tuple[int, int], size: int = 25, bins: int = 32) -> np.ndarray:
        """Same six normalized histograms as :func:`patch_histograms`."""
        half = size // 2
        x1 = max(0, center[0] - half) - self.x0
        y1 = max(0, center[1] - half) - self.y0
        x2 = min(self.img_w, center[0] + half + 1) - self.x0
        y2 = min(self.img_h, center[1] + half + 1) - self.y0
        # a patch reaching past the prepared region is truncated at its edge
        x1, y1 = max(0, x1), max(0, y1)
        x2, y2 = min(self.region_w, x2), min(self.region_h, y2)
        if x2 <= x1 or y2 <= y1:
            raise EmptyPatchError(f"patch at {center} lies outside the prepared region")
        idx = self._indices(bins)[:, y1:y2, x1:x2]
        hists = np.bincount(idx.ravel(), minlength=6 * bins).astype(np.float64).reshape(6, bins)
        return hists / hists.sum(axis=1, keepdims=True)


def _as_region(image) -> PreparedRegion:
    return image if isinstance(image, PreparedRegion) else PreparedRegion(image)


def head_distance(candidate: np.ndarray, target: np.ndarray) -> float:
    """Weighted sum of per-channel cosine distances in HSV and Lab."""
    na = np.sqrt((candidate * candidate).sum(axis=1))
    nb = np.sqrt((target * target).sum(axis=1))
    if (na == 0.0).any() or (nb == 0.0).any():
        raise ZeroHistogramError("all-zero histogram")
    per_channel = 1.0 - (candidate * target).sum(axis=1) / (na * nb)
    dist_hsv = float(HSV_WEIGHTS @ per_channel[:3])
    dist_lab = float(LAB_WEIGHTS @ per_channel[3:])
    return dist_hsv + dist_lab


def _candidate_offsets(config: HeadConfig) -> List[int]:
    """Symmetric candidate grid covering the search window.

    Stride-spaced offsets from the window center, plus the edge-aligned
    extremes where a patch still fits inside the window.
    """
    limit = (config.window_size - config.patch_size) // 2
    offsets = {0, -limit, limit}
    k = config.stride
    while k <= limit:
        offsets.update((-k, k))
        k += config.stride
    return sorted(offsets)


def _clamp_center(region: PreparedRegion, center: Tuple[int, int], size: int) -> Tuple[int, int]:
    half = size // 2
    return (
        min(max(center[0], half), region.img_w - 1 - half),
        min(max(center[1], half), region.img_h - 1 - half),
    )


def search_head(image, state: HeadState, config: Optional[HeadConfig] = None) -> Tuple[Tuple[int, int], float]:
    """Best-matching patch center inside the search window and its distance.

    `image` is a full RGB frame or a :class:`PreparedRegion` covering the
    window. Ties go to the lexicographically first (x, y) center.
    """
    cfg = config or HeadConfig()
    region = _as_region(image)
    cx, cy = state.current_center
    seen = {}

    def score(center):
        if center not in seen:
            hists = region.histograms(center, cfg.patch_size, cfg.bins)
            seen[center] = head_distance(hists, state.target.histograms)
        return seen[center]

    offsets = _candidate_offsets(cfg)
    best_center, best_dist = None, np.inf
    for dx in offsets:
        for dy in offsets:
            center = _clamp_center(region, (cx + dx, cy + dy), cfg.patch_size)
            dist = score(center)
            if dist < best_dist or (dist == best_dist and center < best_center):
                best_center, best_dist = center, dist

    # local 3x3 descent narrows the coarse grid down to pixel resolution
    for step in cfg.refine_steps:
        improved = True
        while improved:
            improved = False
            for dx in (-step, 0, step):
                for dy in (-step, 0, step):
                    center = _clamp_center(region, (best_center[0] + dx, best_center[1] + dy), cfg.patch_size)
                    dist = score(center)
                    if dist < best_dist or (dist == best_dist and center < best_center):
                        best_center, best_dist = center, dist
                        improved = True
    return best_center, best_dist


def refresh_target(state: HeadState, image, frame: int, fps: float, config: Optional[HeadConfig] = None) -> HeadState:
    """Re-learn the target histograms at the current center on the cadence."""
    cfg = config or HeadConfig()
    if state.status is HeadStatus.LOST or state.last_match_distance > cfg.lost_threshold:
        return state
    if frame - state.target.last_update_frame >= cfg.refresh_period_s * fps:
        hists = _as_region(image).histograms(state.current_center, cfg.patch_size, cfg.bins)
        state.target = HeadTarget(hists, state.current_center, frame, cfg.patch_size)
    return state


def detect_lost(state: HeadState, body_box: BoundingBox, config: Optional[HeadConfig] = None) -> HeadState:
    """Flag the head lost on high match distance or leaving the body prior."""
    cfg = config or HeadConfig()
    dilated = body_box.dilated(cfg.body_dilation)
    if state.last_match_distance > cfg.lost_threshold or not dilated.contains(state.current_center):
        state.status = HeadStatus.LOST
    return state


def recover_head(state: HeadState, image, body_box: BoundingBox, config: Optional[HeadConfig] = None) -> HeadState:
    """Dense scan of the dilated body box for a patch matching the target."""
    cfg = config or HeadConfig()
    region = _as_region(image)
    dilated = body_box.dilated(cfg.body_dilation)
    xs = list(range(int(dilated.x1), int(dilated.x2) + 1, cfg.recovery_stride))
    ys = list(range(int(dilated.y1), int(dilated.y2) + 1, cfg.recovery_stride))
    seen = set()
    best_center, best_dist = None, np.inf
    for x in xs:
        for y in ys:
            center = _clamp_center(region, (x, y), cfg.patch_size)
            if center in seen:
                continue
            seen.add(center)
            hists = region.histograms(center, cfg.patch_size, cfg.bins)
            dist = head_distance(hists, state.target.histograms)
            if dist < best_dist or (dist == best_dist and center < best_center):
                best_center, best_dist = center, dist
    if best_center is not None and best_dist <= cfg.lost_threshold:
        state.current_center = best_center
        state.last_match_distance = best_dist
        state.status = HeadStatus.TRACKED
    return state
