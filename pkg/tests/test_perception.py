"""Pose templates, detection model, features, rasters, datasets."""

from itertools import combinations

import numpy as np
import pytest

from gestlink.perception import (
    BASELINE,
    EXTENDED,
    DatasetSpec,
    DegenerateLandmarksError,
    DetectorProfile,
    GestureClass,
    canonical_pose,
    generate_dataset,
    load_dataset,
    normalize_landmarks,
    p_detect,
    rasterize,
    save_dataset,
    synthesize,
)
from gestlink.perception.poses import FINGERS, INDEX, MIDDLE, PINKY, RING


class TestTemplates:
    def test_shapes_and_range(self):
        for c in GestureClass:
            t = canonical_pose(c)
            assert t.shape == (21, 2)
            assert np.all((t >= 0.0) & (t <= 1.0))

    def test_palm_fingers_extended(self):
        palm = canonical_pose(GestureClass.PALM)
        for finger in FINGERS:
            mcp, tip = palm[finger[0]], palm[finger[-1]]
            assert np.linalg.norm(tip - mcp) > 0.15

    def test_fist_fingertips_near_palm_centroid(self):
        fist = canonical_pose(GestureClass.FIST)
        centroid = fist[[0, 5, 9, 13, 17]].mean(axis=0)
        for tip_idx in (INDEX[-1], MIDDLE[-1], RING[-1], PINKY[-1]):
            assert np.linalg.norm(fist[tip_idx] - centroid) < 0.05

    def test_pairwise_distances_exceed_jitter_floor(self):
        # min inter-class distance must dominate 10x the jitter base (0.004)
        for a, b in combinations(GestureClass, 2):
            d = np.linalg.norm(canonical_pose(a) - canonical_pose(b))
            assert d > 0.04, f"{a.name} vs {b.name}: {d}"

    def test_point_templates_mirror(self):
        left = canonical_pose(GestureClass.POINT_LEFT)
        right = canonical_pose(GestureClass.POINT_RIGHT)
        mirrored = np.stack([1.0 - left[:, 0], left[:, 1]], axis=1)
        assert np.allclose(mirrored, right, atol=1e-12)


class TestDetection:
    def test_near_field_saturates(self):
        assert p_detect(BASELINE, 0.01) >= 0.98
        assert p_detect(BASELINE, BASELINE.d_reliable_m) >= 0.98

    def test_midpoint_is_half(self):
        mid = (BASELINE.d_reliable_m + BASELINE.d_cutoff_m) / 2
        assert p_detect(BASELINE, mid) == pytest.approx(0.5, abs=0.01)

    def test_monotone_and_extended_dominates(self):
        grid = np.arange(0.1, 12.0, 0.1)
        prev_b = prev_e = 1.1
        for d in grid:
            pb, pe = p_detect(BASELINE, d), p_detect(EXTENDED, d)
            assert pb <= prev_b + 1e-12
            assert pe <= prev_e + 1e-12
            assert pe >= pb
            prev_b, prev_e = pb, pe

    def test_baseline_dead_at_8m_extended_alive(self):
        assert p_detect(BASELINE, 8.0) <= 0.05
        assert p_detect(EXTENDED, 8.0) >= 0.9

    def test_sigma_arithmetic(self):
        assert BASELINE.sigma(1.0) == pytest.approx(0.010)

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            DetectorProfile(name="bad", d_reliable_m=5.0, d_cutoff_m=4.0)


class TestSynthesize:
    def test_detection_rate_near_field(self):
        rng = np.random.default_rng(1)
        hits = sum(
            synthesize(GestureClass.PALM, 0.5, BASELINE, rng).detected for _ in range(10_000)
        )
        assert hits / 10_000 >= 0.98

    def test_detection_rates_at_8m(self):
        rng = np.random.default_rng(2)
        base_hits = sum(
            synthesize(GestureClass.FIST, 8.0, BASELINE, rng).detected for _ in range(10_000)
        )
        ext_hits = sum(
            synthesize(GestureClass.FIST, 8.0, EXTENDED, rng).detected for _ in range(10_000)
        )
        assert base_hits / 10_000 <= 0.05
        assert ext_hits / 10_000 >= 0.9

    def test_miss_has_no_landmarks_and_low_conf(self):
        rng = np.random.default_rng(3)
        obs = synthesize(GestureClass.PALM, 11.0, BASELINE, rng)
        assert not obs.detected
        assert obs.landmarks is None
        assert obs.det_conf < BASELINE.conf_floor

    def test_hit_landmarks_in_unit_square(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            obs = synthesize(GestureClass.THUMB_UP, 9.0, EXTENDED, rng, force_detect=True)
            assert obs.landmarks.shape == (21, 2)
            assert np.all((obs.landmarks >= 0.0) & (obs.landmarks <= 1.0))

    def test_det_conf_decreases_with_distance(self):
        rng = np.random.default_rng(5)
        mean_conf = []
        for d in (1.0, 3.0, 5.0):
            confs = [
                synthesize(GestureClass.PALM, d, BASELINE, rng, force_detect=True).det_conf
                for _ in range(300)
            ]
            mean_conf.append(np.mean(confs))
        assert mean_conf[0] > mean_conf[1] > mean_conf[2]

    def test_invalid_distance(self):
        with pytest.raises(ValueError, match="positive"):
            synthesize(GestureClass.PALM, 0.0, BASELINE, np.random.default_rng(0))


class TestNormalize:
    def test_scale_translate_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            lm = canonical_pose(GestureClass(int(rng.integers(0, 6)))).copy()
            lm += rng.normal(0, 0.01, lm.shape)
            scale = rng.uniform(0.2, 2.0)
            shift = rng.uniform(-0.1, 0.1, 2)
            transformed = lm * scale + shift
            a = normalize_landmarks(lm)
            b = normalize_landmarks(transformed)
            assert np.allclose(a, b, atol=1e-12)

    def test_wrist_at_origin(self):
        f = normalize_landmarks(canonical_pose(GestureClass.PALM))
        assert f[0] == 0.0 and f[1] == 0.0

    def test_max_pairwise_distance_is_one(self):
        f = normalize_landmarks(canonical_pose(GestureClass.FIST)).reshape(21, 2)
        diffs = f[:, None, :] - f[None, :, :]
        assert np.sqrt((diffs**2).sum(axis=2)).max() == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateLandmarksError):
            normalize_landmarks(np.full((21, 2), 0.5))

    def test_rotation_alignment_optional(self):
        lm = canonical_pose(GestureClass.PALM).copy()
        angle = 0.4
        c, s = np.cos(angle), np.sin(angle)
        rot = (lm - lm.mean(0)) @ np.array([[c, -s], [s, c]]).T + lm.mean(0)
        plain_a = normalize_landmarks(lm)
        plain_b = normalize_landmarks(rot)
        assert not np.allclose(plain_a, plain_b, atol=1e-3)
        aligned_a = normalize_landmarks(lm, align_rotation=True)
        aligned_b = normalize_landmarks(rot, align_rotation=True)
        assert np.allclose(aligned_a, aligned_b, atol=1e-9)


class TestRasterize:
    def test_zero_noise_only_skeleton(self):
        rng = np.random.default_rng(7)
        g = rasterize(canonical_pose(GestureClass.PALM), 32, 0.0, rng)
        assert g.shape == (32, 32)
        assert set(np.unique(g)) <= {0.0, 1.0}
        assert 10 < (g == 1.0).sum() < 400

    def test_full_noise_dominates(self):
        rng = np.random.default_rng(8)
        g = rasterize(canonical_pose(GestureClass.FIST), 32, 1.0, rng)
        skeleton = rasterize(canonical_pose(GestureClass.FIST), 32, 0.0, np.random.default_rng(8))
        signal = (skeleton == 1.0).sum()
        noisy_bg = (g[skeleton == 0.0] > 0.5).sum()
        assert noisy_bg > signal  # background outshines the skeleton

    def test_same_seed_identical(self):
        a = rasterize(canonical_pose(GestureClass.PALM), 32, 0.4, np.random.default_rng(9))
        b = rasterize(canonical_pose(GestureClass.PALM), 32, 0.4, np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_side_floor(self):
        with pytest.raises(ValueError, match=">= 8"):
            rasterize(canonical_pose(GestureClass.PALM), 4, 0.0, np.random.default_rng(0))


class TestDataset:
    def test_default_shape_and_balance(self):
        ds = generate_dataset(DatasetSpec(per_class=5, seed=1))
        assert len(ds) == 30
        assert np.all(np.bincount(ds.labels, minlength=6) == 5)
        lo, hi = ds.spec.distance_range
        assert np.all((ds.distances >= lo) & (ds.distances <= hi))

    def test_single_sample_per_class(self):
        ds = generate_dataset(DatasetSpec(per_class=1, seed=2))
        assert len(ds) == 6

    def test_deterministic(self):
        a = generate_dataset(DatasetSpec(per_class=4, seed=3, raster_side=32))
        b = generate_dataset(DatasetSpec(per_class=4, seed=3, raster_side=32))
        assert np.array_equal(a.landmarks, b.landmarks)
        assert np.array_equal(a.rasters, b.rasters)
        assert np.array_equal(a.split["train"], b.split["train"])

    def test_split_partitions(self):
        ds = generate_dataset(DatasetSpec(per_class=20, seed=4))
        combined = np.sort(
            np.concatenate([ds.split["train"], ds.split["val"], ds.split["test"]])
        )
        assert np.array_equal(combined, np.arange(len(ds)))
        assert len(ds.split["train"]) == round(0.70 * len(ds))

    def test_save_load_round_trip(self, tmp_path):
        ds = generate_dataset(DatasetSpec(per_class=3, seed=5, raster_side=32))
        path = tmp_path / "ds.bin"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert np.array_equal(loaded.labels, ds.labels)
        assert np.allclose(loaded.landmarks, ds.landmarks, atol=1e-7)
        assert np.allclose(loaded.rasters, ds.rasters, atol=1.0 / 255.0)
        assert loaded.spec == ds.spec


class TestDefaults:
    def test_default_spec_is_nine_thousand_samples(self):
        spec = DatasetSpec()
        assert spec.per_class * len(GestureClass) == 9000
