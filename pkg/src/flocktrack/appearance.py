"""Whole-body appearance features and gallery-based cosine distance.

The embedding is an 8x8x4 HSV color histogram (256-d, L2-normalized). It is a
deterministic stand-in for a learned re-identification embedding with the
same cosine-distance contract, and is swappable behind `extract_feature`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque

import numpy as np

from flocktrack.colorspace import rgb_to_hsv
from flocktrack.geometry import BoundingBox

H_BINS, S_BINS, V_BINS = 8, 8, 4
FEATURE_DIM = H_BINS * S_BINS * V_BINS


class EmptyCropError(ValueError):
    """Box clamped to the image has zero area."""


class EmptyGalleryError(ValueError):
    """Cosine distance requested against an empty gallery."""


def crop_box(image: np.ndarray, box: BoundingBox) -> np.ndarray:
    """Crop `box` out of an (H, W, 3) image, clamped to the image bounds."""
    ih, iw = image.shape[:2]
    x1 = max(0, int(round(box.x1)))
    y1 = max(0, int(round(box.y1)))
    x2 = min(iw, int(round(box.x2)))
    y2 = min(ih, int(round(box.y2)))
    if x2 <= x1 or y2 <= y1:
        raise EmptyCropError(f"box {box} clamped to {iw}x{ih} image has zero area")
    return image[y1:y2, x1:x2]


def extract_feature(image: np.ndarray, box: BoundingBox) -> np.ndarray:
    """HSV color-histogram embedding for the crop, unit L2 norm.

    `image` is 8-bit RGB, shape (H, W, 3).
    """
    crop = crop_box(image, box)
    hsv = rgb_to_hsv(crop.astype(np.float64) / 255.0)
    h_idx = np.minimum((hsv[..., 0] * H_BINS).astype(int), H_BINS - 1)
    s_idx = np.minimum((hsv[..., 1] * S_BINS).astype(int), S_BINS - 1)
    v_idx = np.minimum((hsv[..., 2] * V_BINS).astype(int), V_BINS - 1)
    flat = (h_idx * S_BINS + s_idx) * V_BINS + v_idx
    hist = np.bincount(flat.ravel(), minlength=FEATURE_DIM).astype(np.float64)
    norm = np.linalg.norm(hist)
    return hist / norm


@dataclass
class FeatureGallery:
    """Bounded FIFO of appearance features for one track."""

    budget: int = 100
    features: Deque[np.ndarray] = field(default_factory=deque)

    def push(self, feature: np.ndarray) -> None:
        self.features.append(np.asarray(feature, dtype=np.float64))
        while len(self.features) > self.budget:
            self.features.popleft()

    def __len__(self) -> int:
        return len(self.features)


def cosine_distance(feature: np.ndarray, gallery: FeatureGallery) -> float:
    """Min over gallery members of 1 - <feature, member>, in [0, 2]."""
    if len(gallery) == 0:
        raise EmptyGalleryError("gallery has no features")
    members = np.stack(list(gallery.features))
    return float(np.min(1.0 - members @ np.asarray(feature, dtype=np.float64)))
