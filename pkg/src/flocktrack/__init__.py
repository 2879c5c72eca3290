"""Multi-animal pen video tracking and behavior analytics toolkit.

Turns per-frame detection streams into identity-stable tracks, follows each
animal's head with color-histogram template matching, classifies
walking/eating/drinking events, scores results with CLEAR-MOT and event
metrics, and exports an analysis bundle for the web explorer.
"""

from flocktrack.geometry import BoundingBox, Detection, PenLayout, TrackRecord, VideoMeta

__all__ = [
    "BoundingBox",
    "Detection",
    "PenLayout",
    "TrackRecord",
    "VideoMeta",
]

__version__ = "0.1.0"
