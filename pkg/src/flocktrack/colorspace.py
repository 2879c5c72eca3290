"""Vectorized sRGB <-> HSV and sRGB -> CIELAB (D65) conversions.

All functions take and return numpy arrays with channels on the last axis.
RGB is 8-bit [0, 255] or float [0, 1] (see each function); HSV channels are
all in [0, 1]; CIELAB uses the usual L in [0, 100], a/b roughly [-128, 127].
"""

from __future__ import annotations

import numpy as np

# sRGB -> XYZ (D65) matrix, IEC 61966-2-1
_RGB_TO_XYZ = np.array(
    [[0.4124564, 0.3575761, 0.1804375],
     [0.2126729, 0.7151522, 0.0721750],
     [0.0193339, 0.1191920, 0.9503041]]
)
# D65 reference white
_WHITE = np.array([0.95047, 1.0, 1.08883])


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Convert float RGB in [0, 1] to HSV with all channels in [0, 1]."""
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    delta = maxc - minc

    h = np.zeros_like(maxc)
    mask = delta > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        rc = np.where(mask, (maxc - r) / delta, 0.0)
        gc = np.where(mask, (maxc - g) / delta, 0.0)
        bc = np.where(mask, (maxc - b) / delta, 0.0)
    h = np.where(maxc == r, bc - gc, h)
    h = np.where((maxc == g) & (maxc != r), 2.0 + rc - bc, h)
    h = np.where((maxc == b) & (maxc != r) & (maxc != g), 4.0 + gc - rc, h)
    h = np.where(mask, (h / 6.0) % 1.0, 0.0)

    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    return np.stack([h, s, maxc], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Convert HSV with channels in [0, 1] back to float RGB in [0, 1]."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))

    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def srgb_linearize(rgb01: np.ndarray) -> np.ndarray:
    """Undo the sRGB transfer curve; input and output in [0, 1]."""
    rgb01 = np.asarray(rgb01, dtype=np.float64)
    return np.where(rgb01 <= 0.04045, rgb01 / 12.92, ((rgb01 + 0.055) / 1.055) ** 2.4)


def rgb_to_lab(rgb255: np.ndarray) -> np.ndarray:
    """Convert 8-bit sRGB [0, 255] to CIELAB under a D65 white point."""
    rgb01 = np.asarray(rgb255, dtype=np.float64) / 255.0
    linear = srgb_linearize(rgb01)
    xyz = linear @ _RGB_TO_XYZ.T
    xyz_n = xyz / _WHITE

    eps = (6.0 / 29.0) ** 3
    kappa = (29.0 / 6.0) ** 2 / 3.0
    f = np.where(xyz_n > eps, np.cbrt(xyz_n), kappa * xyz_n + 4.0 / 29.0)

    fx, fy, fz = f[..., 0], f[..., 1], f[..., 2]
    lum = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return np.stack([lum, a, b], axis=-1)
