"""Appearance embedding and gallery tests.

Histogram contents are checked by hand bin arithmetic; gallery distance
against a brute-force minimum; the FIFO budget by sequence replay.
"""

import numpy as np
import pytest

from flocktrack.appearance import (
    FEATURE_DIM,
    H_BINS,
    S_BINS,
    V_BINS,
    EmptyCropError,
    EmptyGalleryError,
    FeatureGallery,
    cosine_distance,
    crop_box,
    extract_feature,
)
from flocktrack.geometry import BoundingBox


def solid(color, h=20, w=20):
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[:] = color
    return img


class TestCropBox:
    def test_exact_crop(self):
        img = np.arange(10 * 10 * 3, dtype=np.uint8).reshape(10, 10, 3)
        crop = crop_box(img, BoundingBox(5.0, 5.0, 4.0, 4.0))
        assert crop.shape == (4, 4, 3)
        assert np.array_equal(crop, img[3:7, 3:7])

    def test_clamps_to_image(self):
        img = np.zeros((10, 10, 3), dtype=np.uint8)
        crop = crop_box(img, BoundingBox(0.0, 0.0, 8.0, 8.0))
        assert crop.shape == (4, 4, 3)

    def test_fully_outside_raises(self):
        img = np.zeros((10, 10, 3), dtype=np.uint8)
        with pytest.raises(EmptyCropError):
            crop_box(img, BoundingBox(50.0, 50.0, 4.0, 4.0))


class TestExtractFeature:
    def test_unit_norm_and_dimension(self):
        f = extract_feature(solid((200, 30, 30)), BoundingBox(10, 10, 10, 10))
        assert f.shape == (FEATURE_DIM,)
        assert np.linalg.norm(f) == pytest.approx(1.0)

    def test_solid_color_is_one_hot(self):
        f = extract_feature(solid((255, 0, 0)), BoundingBox(10, 10, 10, 10))
        assert np.count_nonzero(f) == 1
        assert f.max() == pytest.approx(1.0)

    def test_two_color_crop_two_bins_at_inverse_sqrt2(self):
        # left half pure red, right half pure green: the two populated bins
        # are computed by hand from the (h, s, v) bin layout
        img = solid((255, 0, 0))
        img[:, 10:] = (0, 255, 0)
        f = extract_feature(img, BoundingBox(10, 10, 20, 20))

        red_flat = (0 * S_BINS + (S_BINS - 1)) * V_BINS + (V_BINS - 1)
        green_h = int((1.0 / 3.0) * H_BINS)
        green_flat = (green_h * S_BINS + (S_BINS - 1)) * V_BINS + (V_BINS - 1)
        assert f[red_flat] == pytest.approx(1.0 / np.sqrt(2.0))
        assert f[green_flat] == pytest.approx(1.0 / np.sqrt(2.0))
        assert np.count_nonzero(f) == 2

    def test_same_content_same_feature(self):
        img = np.random.default_rng(31).integers(0, 256, (40, 40, 3), dtype=np.uint8)
        a = extract_feature(img, BoundingBox(20, 20, 20, 20))
        b = extract_feature(img.copy(), BoundingBox(20, 20, 20, 20))
        assert np.array_equal(a, b)


class TestFeatureGallery:
    def test_budget_keeps_most_recent(self):
        # replay 200 pushes against a budget of 100: exactly pushes 101-200
        # remain, in order
        g = FeatureGallery(budget=100)
        for i in range(200):
            v = np.zeros(4)
            v[0] = float(i)
            g.push(v)
        assert len(g) == 100
        kept = [int(f[0]) for f in g.features]
        assert kept == list(range(100, 200))

    def test_small_budget(self):
        g = FeatureGallery(budget=2)
        for i in range(5):
            g.push(np.array([float(i)]))
        assert [f[0] for f in g.features] == [3.0, 4.0]


class TestCosineDistance:
    def test_matches_brute_force_min(self):
        rng = np.random.default_rng(32)
        g = FeatureGallery(budget=10)
        members = []
        for _ in range(5):
            v = rng.random(FEATURE_DIM)
            v /= np.linalg.norm(v)
            members.append(v)
            g.push(v)
        q = rng.random(FEATURE_DIM)
        q /= np.linalg.norm(q)
        want = min(1.0 - float(q @ m) for m in members)
        assert cosine_distance(q, g) == pytest.approx(want, abs=1e-12)

    def test_identical_feature_distance_zero(self):
        v = np.zeros(FEATURE_DIM)
        v[3] = 1.0
        g = FeatureGallery()
        g.push(v)
        assert cosine_distance(v, g) == pytest.approx(0.0)

    def test_empty_gallery_raises(self):
        with pytest.raises(EmptyGalleryError):
            cosine_distance(np.ones(FEATURE_DIM), FeatureGallery())
