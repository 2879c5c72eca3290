"""Constant-velocity Kalman tracking of per-track position plus the track
lifecycle state machine (tentative -> confirmed -> deleted).

The filter state is [cx, cy, vx, vy]: position-only measurement, velocity as
hidden state. Box size is carried outside the filter as an exponential moving
average. Noise magnitudes scale with the smoothed box height.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from flocktrack.geometry import BoundingBox, Detection


class DegenerateCovarianceError(RuntimeError):
    """Innovation covariance is numerically singular."""


class TrackStatus(enum.Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


@dataclass
class MotionConfig:
    confirm_hits: int = 5
    max_age: int = 30
    # noise stds as fractions of smoothed box height
    std_pos_factor: float = 1.0 / 20.0
    std_vel_factor: float = 1.0 / 160.0
    size_ema_alpha: float = 0.3


# constant-velocity transition and position-selecting measurement matrices
_F = np.array(
    [[1.0, 0.0, 1.0, 0.0],
     [0.0, 1.0, 0.0, 1.0],
     [0.0, 0.0, 1.0, 0.0],
     [0.0, 0.0, 0.0, 1.0]]
)
_H = np.array(
    [[1.0, 0.0, 0.0, 0.0],
     [0.0, 1.0, 0.0, 0.0]]
)


class Track:
    """Identity-stable state for one physical target.

    Owns the Kalman state, the lifecycle counters, the smoothed box size and
    (attached by the pipeline) an appearance gallery and a head state.
    """

    def __init__(self, track_id: int, det: Detection, config: Optional[MotionConfig] = None):
        if track_id < 1:
            raise ValueError("track ids start at 1")
        self.config = config or MotionConfig()
        self.id = track_id
        self.mean = np.array([det.box.cx, det.box.cy, 0.0, 0.0])
        std_p = self.config.std_pos_factor * det.box.h
        std_v = self.config.std_vel_factor * det.box.h
        self.covariance = np.diag([std_p ** 2, std_p ** 2, std_v ** 2, std_v ** 2])
        self.status = TrackStatus.TENTATIVE
        self.hits = 1
        self.time_since_update = 0
        self.smoothed_size: Tuple[float, float] = (det.box.w, det.box.h)
        self.gallery = None  # attached by the pipeline (appearance.FeatureGallery)
        self.head = None  # attached by the pipeline (head.HeadState)
        self.head_init: Optional[BoundingBox] = None  # manual head box awaiting frames
        self.last_box: BoundingBox = det.box

    @property
    def is_confirmed(self) -> bool:
        return self.status is TrackStatus.CONFIRMED

    @property
    def is_deleted(self) -> bool:
        return self.status is TrackStatus.DELETED

    def box(self) -> BoundingBox:
        """Current state as a box, using the filter position and EMA size."""
        w, h = self.smoothed_size
        return BoundingBox(float(self.mean[0]), float(self.mean[1]), w, h)

    def _noise(self) -> Tuple[float, float]:
        h = self.smoothed_size[1]
        return self.config.std_pos_factor * h, self.config.std_vel_factor * h

    def predict(self) -> None:
        """Advance the state one frame: x' = F x, P' = F P F^T + Q."""
        if self.is_deleted:
            raise RuntimeError("cannot predict a deleted track")
        std_p, std_v = self._noise()
        q = np.diag([std_p ** 2, std_p ** 2, std_v ** 2, std_v ** 2])
        self.mean = _F @ self.mean
        self.covariance = _F @ self.covariance @ _F.T + q
        self.time_since_update += 1

    def update(self, det: Detection) -> None:
        """Standard Kalman correction with z = [cx, cy]."""
        if self.is_deleted:
            raise RuntimeError("cannot update a deleted track")
        std_p, _ = self._noise()
        r = np.diag([std_p ** 2, std_p ** 2])
        z = np.array([det.box.cx, det.box.cy])
        s = _H @ self.covariance @ _H.T + r
        k = self.covariance @ _H.T @ np.linalg.inv(s)
        innovation = z - _H @ self.mean
        self.mean = self.mean + k @ innovation
        self.covariance = (np.eye(4) - k @ _H) @ self.covariance
        # keep the covariance numerically symmetric
        self.covariance = (self.covariance + self.covariance.T) / 2.0

        alpha = self.config.size_ema_alpha
        w, h = self.smoothed_size
        self.smoothed_size = (
            (1 - alpha) * w + alpha * det.box.w,
            (1 - alpha) * h + alpha * det.box.h,
        )
        self.last_box = det.box
        self.hits += 1
        self.time_since_update = 0
        if self.status is TrackStatus.TENTATIVE and self.hits >= self.config.confirm_hits:
            self.status = TrackStatus.CONFIRMED

    def mark_missed(self) -> None:
        """Lifecycle handling for a frame with no matched detection."""
        if self.status is TrackStatus.TENTATIVE:
            self.status = TrackStatus.DELETED
        elif self.status is TrackStatus.CONFIRMED and self.time_since_update > self.config.max_age:
            self.status = TrackStatus.DELETED

    def gating_distance(self, det: Detection) -> float:
        """Squared Mahalanobis distance of the detection to the predicted state."""
        if self.is_deleted:
            raise RuntimeError("cannot gate against a deleted track")
        std_p, _ = self._noise()
        r = np.diag([std_p ** 2, std_p ** 2])
        s = _H @ self.covariance @ _H.T + r
        if np.linalg.cond(s) > 1e12:
            raise DegenerateCovarianceError(f"innovation covariance is singular for track {self.id}")
        d = np.array([det.box.cx, det.box.cy]) - _H @ self.mean
        return float(d @ np.linalg.solve(s, d))


def initiate(det: Detection, next_id: int, config: Optional[MotionConfig] = None) -> Track:
    """Create a tentative track from an unmatched detection."""
    return Track(next_id, det, config)
