import math

import numpy as np
import pytest

from htg_eval.data_model import GrayImage
from htg_eval.errors import IdenticalImages, ShapeError
from htg_eval.pixel_metrics import (
    SsimConstants,
    evaluate_pairs,
    mse,
    psnr,
    rmse,
    ssim_global,
    ssim_windowed,
)


def gray(arr, max_i=255.0):
    return GrayImage(np.asarray(arr, dtype=np.float64), max_intensity=max_i)


def random_pair(rng, shape=(8, 8)):
    a = gray(rng.integers(0, 256, size=shape))
    b = gray(rng.integers(0, 256, size=shape))
    return a, b


class TestMse:
    def test_identity(self, rng):
        a, _ = random_pair(rng)
        assert mse(a, a) == 0.0

    def test_constant_case(self):
        a = gray(np.zeros((5, 7)))
        b = gray(np.full((5, 7), 255.0))
        assert mse(a, b) == 65025.0
        assert rmse(a, b) == 255.0

    def test_matches_double_loop_oracle(self, rng):
        for _ in range(20):
            a, b = random_pair(rng)
            total = 0.0
            for i in range(8):
                for j in range(8):
                    d = a.pixels[i, j] - b.pixels[i, j]
                    total += d * d
            assert abs(mse(a, b) - total / 64.0) < 1e-12

    def test_symmetry(self, rng):
        a, b = random_pair(rng)
        assert mse(a, b) == mse(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse(gray(np.zeros((2, 2))), gray(np.zeros((2, 3))))


class TestPsnr:
    def test_zero_db(self):
        a = gray(np.zeros((4, 4)))
        b = gray(np.full((4, 4), 255.0))
        assert abs(psnr(a, b)) < 1e-12

    def test_unit_mse_closed_form(self):
        # MSE exactly 1: alternate 0/+1 offsets would dither, use a flat +1.
        a = gray(np.full((10, 10), 100.0))
        b = gray(np.full((10, 10), 101.0))
        assert abs(psnr(a, b) - 20 * math.log10(255.0)) < 1e-3
        assert abs(psnr(a, b) - 48.1308) < 1e-3

    def test_identical_images_error(self, rng):
        a, _ = random_pair(rng)
        with pytest.raises(IdenticalImages):
            psnr(a, a)

    def test_strictly_decreasing_in_mse(self):
        base = np.zeros((6, 6))
        values = []
        for offset in (1.0, 2.0, 5.0, 20.0):
            values.append(psnr(gray(base), gray(base + offset)))
        assert values == sorted(values, reverse=True)


class TestSsimGlobal:
    def test_identity(self, rng):
        a, _ = random_pair(rng)
        assert abs(ssim_global(a, a) - 1.0) < 1e-12

    def test_both_constant_zero(self):
        a = gray(np.zeros((4, 4)))
        assert ssim_global(a, a) == 1.0

    def test_black_vs_white_closed_form(self):
        a = gray(np.zeros((8, 8)))
        b = gray(np.full((8, 8), 255.0))
        c1 = (0.01 * 255) ** 2
        expected = c1 / (65025.0 + c1)
        got = ssim_global(a, b, SsimConstants(k1=0.01, k2=0.03, dynamic_range=255.0))
        assert abs(got - expected) < 1e-9
        assert abs(got - 9.9990e-5) < 1e-9

    def test_symmetry_and_range(self, rng):
        for _ in range(20):
            a, b = random_pair(rng)
            v = ssim_global(a, b)
            assert abs(v - ssim_global(b, a)) < 1e-15
            assert -1.0 - 1e-12 <= v <= 1.0 + 1e-12

    def test_shift_self_consistency(self, rng):
        # Adding the same constant to both images must agree with evaluating
        # the formula on the shifted pair directly.
        a, b = random_pair(rng)
        t = 11.0
        shifted = ssim_global(
            gray(a.pixels + t, max_i=266.0), gray(b.pixels + t, max_i=266.0), SsimConstants()
        )
        direct = _ssim_reference(a.pixels + t, b.pixels + t, SsimConstants())
        assert abs(shifted - direct) < 1e-12

    def test_too_small(self):
        with pytest.raises(ShapeError):
            ssim_global(gray([[1.0]]), gray([[1.0]]))


def _ssim_reference(x, y, c):
    """Independent single-window evaluation with explicit loops."""
    n = x.size
    mu_x = sum(x.flat) / n
    mu_y = sum(y.flat) / n
    var_x = sum((v - mu_x) ** 2 for v in x.flat) / n
    var_y = sum((v - mu_y) ** 2 for v in y.flat) / n
    cov = sum((u - mu_x) * (v - mu_y) for u, v in zip(x.flat, y.flat)) / n
    return ((2 * mu_x * mu_y + c.c1) * (2 * cov + c.c2)) / (
        (mu_x**2 + mu_y**2 + c.c1) * (var_x + var_y + c.c2)
    )


class TestSsimWindowed:
    def test_identity(self, rng):
        a, _ = random_pair(rng, (16, 16))
        assert abs(ssim_windowed(a, a, window=8) - 1.0) < 1e-12

    def test_full_window_equals_global(self, rng):
        a, b = random_pair(rng, (12, 12))
        assert abs(ssim_windowed(a, b, window=12) - ssim_global(a, b)) < 1e-12

    def test_matches_sliding_window_oracle(self, rng):
        a, b = random_pair(rng, (16, 16))
        w = 8
        c = SsimConstants()
        values = []
        for i in range(16 - w + 1):
            for j in range(16 - w + 1):
                values.append(
                    _ssim_reference(a.pixels[i : i + w, j : j + w], b.pixels[i : i + w, j : j + w], c)
                )
        oracle = sum(values) / len(values)
        assert abs(ssim_windowed(a, b, c, window=w) - oracle) < 1e-10

    def test_window_too_large(self, rng):
        a, b = random_pair(rng, (8, 8))
        with pytest.raises(ShapeError):
            ssim_windowed(a, b, window=9)


class TestEvaluatePairs:
    def test_report_shape_and_inf_handling(self, rng):
        a, b = random_pair(rng)
        report = evaluate_pairs([(a, b), (a, a)])
        assert report.n_pairs == 2
        assert report.identical_pairs == 1
        assert report.psnr_values[1] is None
        d = report.to_dict()
        assert d["per_pair"]["psnr"][1] == "inf"
        assert d["aggregates"]["psnr"]["count"] == 1

    def test_thread_count_does_not_change_results(self, rng):
        pairs = [random_pair(rng) for _ in range(8)]
        r1 = evaluate_pairs(pairs, threads=1)
        r4 = evaluate_pairs(pairs, threads=4)
        assert r1.to_dict() == r4.to_dict()
