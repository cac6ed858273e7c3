import math

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from namf.metrics import MetricReport, mse, psnr, report, ssim


class TestMse:
    def test_identical(self, rng):
        img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        assert mse(img, img) == 0.0

    def test_opposite_extremes(self):
        u = np.zeros((8, 8), dtype=np.uint8)
        v = np.full((8, 8), 255, dtype=np.uint8)
        assert mse(u, v) == 65025.0

    def test_against_double_loop(self, rng):
        u = rng.integers(0, 256, (9, 11), dtype=np.uint8)
        v = rng.integers(0, 256, (9, 11), dtype=np.uint8)
        expected = sum(
            (int(u[i, j]) - int(v[i, j])) ** 2 for i in range(9) for j in range(11)
        ) / (9 * 11)
        assert mse(u, v) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions"):
            mse(np.zeros((4, 4), dtype=np.uint8), np.zeros((4, 5), dtype=np.uint8))


class TestPsnr:
    def test_identical_is_infinite(self, rng):
        img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        assert math.isinf(psnr(img, img))

    def test_extreme_pair_is_zero_db(self):
        u = np.zeros((8, 8), dtype=np.uint8)
        v = np.full((8, 8), 255, dtype=np.uint8)
        assert psnr(u, v) == pytest.approx(0.0)

    def test_symmetry(self, rng):
        u = rng.integers(0, 256, (20, 20), dtype=np.uint8)
        v = rng.integers(0, 256, (20, 20), dtype=np.uint8)
        assert psnr(u, v) == pytest.approx(psnr(v, u))

    def test_decreases_with_mse(self):
        base = np.full((16, 16), 100, dtype=np.uint8)
        small = base.copy()
        small[0, 0] = 110
        large = base.copy()
        large[0, 0] = 200
        assert psnr(base, small) > psnr(base, large)


class TestSsim:
    def test_identical_is_one(self, rng):
        img = rng.integers(0, 256, (32, 32), dtype=np.uint8)
        assert ssim(img, img) == pytest.approx(1.0)
        assert ssim(img, img, global_stats=True) == pytest.approx(1.0)

    def test_symmetry(self, rng):
        u = rng.integers(0, 256, (24, 24), dtype=np.uint8)
        v = rng.integers(0, 256, (24, 24), dtype=np.uint8)
        assert ssim(u, v) == pytest.approx(ssim(v, u), abs=1e-12)

    def test_constant_pair_closed_form(self):
        # zero variance everywhere: only the luminance term remains
        u = np.full((16, 16), 100, dtype=np.uint8)
        v = np.full((16, 16), 110, dtype=np.uint8)
        c1 = (0.01 * 255) ** 2
        expected = (2 * 100 * 110 + c1) / (100**2 + 110**2 + c1)
        assert ssim(u, v) == pytest.approx(expected, abs=1e-12)
        assert ssim(u, v, global_stats=True) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_reference_implementation(self, seed):
        rng = np.random.default_rng(seed)
        u = rng.integers(0, 256, (48, 64), dtype=np.uint8)
        v = np.clip(u.astype(int) + rng.integers(-30, 31, u.shape), 0, 255).astype(np.uint8)
        expected = structural_similarity(
            u, v, gaussian_weights=True, sigma=1.5,
            use_sample_covariance=False, data_range=255,
        )
        assert ssim(u, v) == pytest.approx(expected, abs=1e-7)

    def test_too_small_image_rejected(self):
        with pytest.raises(ValueError, match="smaller"):
            ssim(np.zeros((8, 8), dtype=np.uint8), np.zeros((8, 8), dtype=np.uint8))

    def test_global_differs_from_windowed_on_structure(self, rng):
        u = rng.integers(0, 256, (64, 64), dtype=np.uint8)
        v = rng.integers(0, 256, (64, 64), dtype=np.uint8)
        assert ssim(u, v) != pytest.approx(ssim(u, v, global_stats=True))


def test_report_bundle(rng):
    img = rng.integers(0, 256, (32, 32), dtype=np.uint8)
    rep = report(img, img, runtime_ms=12.5)
    assert isinstance(rep, MetricReport)
    assert rep.mse == 0.0 and math.isinf(rep.psnr_db)
    assert rep.ssim == pytest.approx(1.0)
    assert rep.runtime_ms == 12.5
