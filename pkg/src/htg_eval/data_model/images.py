"""Grayscale PNG ingestion.

8-bit and 16-bit grayscale PNGs load losslessly; color inputs are reduced
with the ITU-R BT.601 luma transform (0.299 R + 0.587 G + 0.114 B) before
any metric sees them.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from ..errors import FormatError
from .types import GrayImage

_LUMA = np.array([0.299, 0.587, 0.114])


def load_image(path) -> GrayImage:
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode == "L":
                return GrayImage(np.asarray(img, dtype=np.float64), max_intensity=255.0)
            if mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(img, dtype=np.float64)
                return GrayImage(arr, max_intensity=65535.0)
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
            return GrayImage(rgb @ _LUMA, max_intensity=255.0)
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise FormatError(f"{path}: not a readable image ({exc})") from exc


def save_gray_png(path, pixels: np.ndarray, bit_depth: int = 8) -> None:
    """Write a grayscale PNG from a 2-D array already in range."""
    if bit_depth == 8:
        Image.fromarray(np.asarray(pixels, dtype=np.uint8)).save(path, format="PNG")
    elif bit_depth == 16:
        Image.fromarray(np.asarray(pixels, dtype="<u2")).save(path, format="PNG")
    else:
        raise FormatError(f"unsupported bit depth {bit_depth}")
