"""Pixel-level reference metrics between aligned image pairs.

MSE(y, y^) = (1/n) sum_i (y_i - y^_i)^2, RMSE is its square root, and
PSNR = 10 log10(MAX_I^2 / MSE). SSIM follows the single-window structural
formula; statistics use the population (1/n) convention throughout. The
default SSIM mode evaluates one window over the whole image; a uniform
sliding-window mean is available for comparability with common practice.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .data_model import GrayImage
from .errors import IdenticalImages, ShapeError

DEFAULT_WINDOW = 11


@dataclass(frozen=True)
class SsimConstants:
    """Stabilizers c1 = (k1 L)^2 and c2 = (k2 L)^2 for the weak denominators."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise ShapeError("SSIM constants must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


def _check_pair(a: GrayImage, b: GrayImage) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise ShapeError(f"image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    if a.max_intensity != b.max_intensity:
        raise ShapeError(
            f"dynamic ranges differ: {a.max_intensity} vs {b.max_intensity}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    _check_pair(a, b)
    diff = a.pixels - b.pixels
    return float(np.mean(diff * diff))


def rmse(a: GrayImage, b: GrayImage) -> float:
    return math.sqrt(mse(a, b))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB; identical images are an error."""
    err = mse(a, b)
    if err == 0.0:
        raise IdenticalImages("PSNR undefined for identical images (MSE = 0)")
    return 10.0 * math.log10(a.max_intensity**2 / err)


def ssim_global(a: GrayImage, b: GrayImage, constants: Optional[SsimConstants] = None) -> float:
    """Structural similarity with a single window spanning the whole image."""
    _check_pair(a, b)
    if a.pixels.size < 2:
        raise ShapeError("SSIM needs at least 2 pixels")
    c = constants or SsimConstants(dynamic_range=a.max_intensity)
    x = a.pixels
    y = b.pixels
    mu_x = x.mean()
    mu_y = y.mean()
    var_x = x.var()
    var_y = y.var()
    cov = ((x - mu_x) * (y - mu_y)).mean()
    return float(
        ((2 * mu_x * mu_y + c.c1) * (2 * cov + c.c2))
        / ((mu_x**2 + mu_y**2 + c.c1) * (var_x + var_y + c.c2))
    )


def ssim_windowed(
    a: GrayImage,
    b: GrayImage,
    constants: Optional[SsimConstants] = None,
    window: int = DEFAULT_WINDOW,
) -> float:
    """Mean SSIM over all window x window patches, stride 1, uniform weights.

    Memory scales with window^2 times the number of patch positions.
    """
    _check_pair(a, b)
    h, w = a.pixels.shape
    if window < 1 or window > min(h, w):
        raise ShapeError(f"window {window} does not fit image {h}x{w}")
    c = constants or SsimConstants(dynamic_range=a.max_intensity)
    wx = sliding_window_view(a.pixels, (window, window))
    wy = sliding_window_view(b.pixels, (window, window))
    mu_x = wx.mean(axis=(2, 3))
    mu_y = wy.mean(axis=(2, 3))
    var_x = (wx * wx).mean(axis=(2, 3)) - mu_x * mu_x
    var_y = (wy * wy).mean(axis=(2, 3)) - mu_y * mu_y
    cov = (wx * wy).mean(axis=(2, 3)) - mu_x * mu_y
    ssim_map = ((2 * mu_x * mu_y + c.c1) * (2 * cov + c.c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c.c1) * (var_x + var_y + c.c2)
    )
    return float(ssim_map.mean())


@dataclass
class PixelMetricReport:
    """Per-pair values plus set-level mean/stddev for each metric.

    PSNR of an identical pair is reported as the distinguished value "inf"
    (None in memory) and excluded from the mean with a count note.
    """

    n_pairs: int
    mse_values: list[float]
    rmse_values: list[float]
    psnr_values: list[Optional[float]]
    ssim_values: list[float]
    identical_pairs: int
    ssim_mode: str = "global"
    window: Optional[int] = None
    aggregates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "identical_pairs": self.identical_pairs,
            "ssim_mode": self.ssim_mode,
            "window": self.window,
            "per_pair": {
                "mse": self.mse_values,
                "rmse": self.rmse_values,
                "psnr": ["inf" if v is None else v for v in self.psnr_values],
                "ssim": self.ssim_values,
            },
            "aggregates": self.aggregates,
        }


def _mean_std(values: Sequence[float]) -> dict:
    if not values:
        return {"mean": None, "stddev": None, "count": 0}
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "stddev": float(arr.std()), "count": len(values)}


def evaluate_pairs(
    pairs: Sequence[tuple[GrayImage, GrayImage]],
    constants: Optional[SsimConstants] = None,
    windowed: bool = False,
    window: int = DEFAULT_WINDOW,
    threads: int = 1,
) -> PixelMetricReport:
    """Evaluate all metrics over image pairs.

    Pairs are independent, so they may be mapped over a thread pool; results
    are collected in input order, keeping aggregation bit-reproducible at any
    thread count.
    """

    def one(pair):
        a, b = pair
        m = mse(a, b)
        p = None if m == 0.0 else 10.0 * math.log10(a.max_intensity**2 / m)
        s = ssim_windowed(a, b, constants, window) if windowed else ssim_global(a, b, constants)
        return m, math.sqrt(m), p, s

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, pairs))
    else:
        rows = [one(p) for p in pairs]

    mse_v = [r[0] for r in rows]
    rmse_v = [r[1] for r in rows]
    psnr_v = [r[2] for r in rows]
    ssim_v = [r[3] for r in rows]
    finite_psnr = [v for v in psnr_v if v is not None]
    report = PixelMetricReport(
        n_pairs=len(rows),
        mse_values=mse_v,
        rmse_values=rmse_v,
        psnr_values=psnr_v,
        ssim_values=ssim_v,
        identical_pairs=len(psnr_v) - len(finite_psnr),
        ssim_mode="windowed" if windowed else "global",
        window=window if windowed else None,
    )
    report.aggregates = {
        "mse": _mean_std(mse_v),
        "rmse": _mean_std(rmse_v),
        "psnr": _mean_std(finite_psnr),
        "ssim": _mean_std(ssim_v),
    }
    return report
