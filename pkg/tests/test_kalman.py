"""Kalman filter and track lifecycle tests.

The motion model is checked against repeated matrix application, a
Monte-Carlo noisy-measurement run, and a cofactor-formula inverse for the
gating distance.
"""

import numpy as np
import pytest

from flocktrack.geometry import BoundingBox, Detection
from flocktrack.kalman import (
    DegenerateCovarianceError,
    MotionConfig,
    Track,
    TrackStatus,
    initiate,
)

F = np.array(
    [[1.0, 0.0, 1.0, 0.0],
     [0.0, 1.0, 0.0, 1.0],
     [0.0, 0.0, 1.0, 0.0],
     [0.0, 0.0, 0.0, 1.0]]
)


def det_at(x, y, w=40.0, h=40.0, frame=0):
    return Detection(frame, BoundingBox(x, y, w, h))


class TestInitialization:
    def test_initial_covariance_matches_hand_construction(self):
        h = 40.0
        t = Track(1, det_at(5.0, 7.0, h=h))
        std_p, std_v = h / 20.0, h / 160.0
        want = np.diag([std_p ** 2, std_p ** 2, std_v ** 2, std_v ** 2])
        assert np.array_equal(t.covariance, want)
        assert np.array_equal(t.mean, [5.0, 7.0, 0.0, 0.0])

    def test_track_ids_start_at_one(self):
        with pytest.raises(ValueError):
            Track(0, det_at(0, 0))

    def test_initiate_factory(self):
        t = initiate(det_at(1.0, 2.0), 3)
        assert t.id == 3
        assert t.status is TrackStatus.TENTATIVE
        assert t.hits == 1


class TestPredict:
    def test_ten_predicts_match_repeated_matrix_application(self):
        t = Track(1, det_at(0.0, 0.0))
        t.mean = np.array([0.0, 0.0, 1.0, 0.0])
        x = t.mean.copy()
        for _ in range(10):
            t.predict()
            x = F @ x
        assert np.allclose(t.mean, x)
        assert t.mean[0] == pytest.approx(10.0)
        assert t.mean[1] == pytest.approx(0.0)

    def test_predict_inflates_covariance(self):
        t = Track(1, det_at(0.0, 0.0))
        before = np.trace(t.covariance)
        t.predict()
        assert np.trace(t.covariance) > before

    def test_predict_increments_staleness(self):
        t = Track(1, det_at(0.0, 0.0))
        t.predict()
        t.predict()
        assert t.time_since_update == 2

    def test_predict_after_delete_raises(self):
        t = Track(1, det_at(0.0, 0.0))
        t.mark_missed()  # tentative -> deleted
        with pytest.raises(RuntimeError):
            t.predict()


class TestUpdate:
    def test_noiseless_constant_velocity_locks_on(self):
        # target moves 3 px/frame in x; estimate converges below 1e-6 px.
        # uses a maneuver-tolerant velocity noise: the smooth default
        # (h/160) converges geometrically but not within 10 frames
        cfg = MotionConfig(std_vel_factor=0.5)
        t = Track(1, det_at(0.0, 100.0), cfg)
        for f in range(1, 11):
            t.predict()
            t.update(det_at(3.0 * f, 100.0, frame=f))
        assert abs(t.mean[0] - 30.0) < 1e-6
        assert abs(t.mean[1] - 100.0) < 1e-6
        assert abs(t.mean[2] - 3.0) < 1e-6

    def test_default_config_converges_geometrically(self):
        # the stiff default keeps shrinking the same error, just slower
        errs = []
        t = Track(1, det_at(0.0, 100.0))
        for f in range(1, 61):
            t.predict()
            t.update(det_at(3.0 * f, 100.0, frame=f))
            errs.append(abs(t.mean[0] - 3.0 * f))
        assert errs[59] < 1e-2
        assert errs[59] < errs[29] < errs[9]

    def test_stationary_target_with_noise_monte_carlo(self):
        # noisy measurements around a fixed point: estimate within 1 px
        rng = np.random.default_rng(21)
        t = Track(1, det_at(200.0, 200.0))
        for f in range(1, 101):
            t.predict()
            nx, ny = rng.normal(0.0, 2.0, 2)
            t.update(det_at(200.0 + nx, 200.0 + ny, frame=f))
        assert abs(t.mean[0] - 200.0) < 1.0
        assert abs(t.mean[1] - 200.0) < 1.0

    def test_size_ema(self):
        cfg = MotionConfig(size_ema_alpha=0.5)
        t = Track(1, det_at(0, 0, w=40.0, h=40.0), cfg)
        t.predict()
        t.update(det_at(0, 0, w=60.0, h=20.0, frame=1))
        assert t.smoothed_size == pytest.approx((50.0, 30.0))

    def test_update_stores_matched_box(self):
        t = Track(1, det_at(0.0, 0.0))
        t.predict()
        d = det_at(1.5, 0.5, frame=1)
        t.update(d)
        assert t.last_box == d.box

    def test_covariance_stays_symmetric(self):
        t = Track(1, det_at(0.0, 0.0))
        for f in range(1, 50):
            t.predict()
            t.update(det_at(float(f), 0.0, frame=f))
        assert np.array_equal(t.covariance, t.covariance.T)


class TestLifecycle:
    def test_confirmation_after_five_hits(self):
        t = Track(1, det_at(0.0, 0.0))
        for f in range(1, 6):
            t.predict()
            t.update(det_at(0.0, 0.0, frame=f))
            if t.hits < 5:
                assert t.status is TrackStatus.TENTATIVE
        assert t.status is TrackStatus.CONFIRMED

    def test_tentative_miss_deletes_immediately(self):
        t = Track(1, det_at(0.0, 0.0))
        t.predict()
        t.mark_missed()
        assert t.is_deleted

    def test_confirmed_survives_until_max_age(self):
        # step-through: confirmed track dies only past max_age misses
        cfg = MotionConfig(max_age=3)
        t = Track(1, det_at(0.0, 0.0), cfg)
        for f in range(1, 6):
            t.predict()
            t.update(det_at(0.0, 0.0, frame=f))
        assert t.is_confirmed
        for _ in range(3):
            t.predict()
            t.mark_missed()
            assert t.is_confirmed
        t.predict()  # time_since_update = max_age + 1
        t.mark_missed()
        assert t.is_deleted


class TestGating:
    def test_matches_cofactor_inverse(self):
        t = Track(1, det_at(10.0, 10.0))
        for f in range(1, 4):
            t.predict()
            t.update(det_at(10.0 + f, 10.0, frame=f))
        t.predict()
        d = det_at(17.0, 12.0, frame=4)

        std_p = t.config.std_pos_factor * t.smoothed_size[1]
        p = t.covariance[:2, :2]
        s = p + np.diag([std_p ** 2, std_p ** 2])
        a, b, c, dd = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
        s_inv = np.array([[dd, -b], [-c, a]]) / (a * dd - b * c)
        diff = np.array([17.0, 12.0]) - t.mean[:2]
        want = float(diff @ s_inv @ diff)
        assert t.gating_distance(d) == pytest.approx(want, rel=1e-12)

    def test_perfect_prediction_has_zero_distance(self):
        t = Track(1, det_at(10.0, 10.0))
        t.predict()
        assert t.gating_distance(det_at(10.0, 10.0, frame=1)) == pytest.approx(0.0)

    def test_degenerate_covariance_raises(self):
        t = Track(1, det_at(0.0, 0.0))
        # wildly anisotropic covariance with negligible measurement noise
        t.covariance = np.diag([1e12, 1e-12, 1.0, 1.0])
        t.smoothed_size = (1e-6, 1e-6)
        with pytest.raises(DegenerateCovarianceError):
            t.gating_distance(det_at(0.0, 0.0))


class TestCovarianceSpd:
    def test_spd_over_random_predict_update_steps(self):
        rng = np.random.default_rng(22)
        t = Track(1, det_at(100.0, 100.0))
        for f in range(1, 1001):
            t.predict()
            if rng.random() < 0.7:
                x, y = rng.uniform(50, 150, 2)
                t.update(det_at(x, y, frame=f))
        eig = np.linalg.eigvalsh(t.covariance)
        assert np.all(eig > 0)
        assert np.allclose(t.covariance, t.covariance.T)
