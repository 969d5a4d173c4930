"""Contrast enhancement, block FFT sharpening, Sobel gradients and
block-adaptive binarization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ImageTooSmall, InvalidBlockSize
from .imagecore import BinaryImage, GrayImage, split_blocks

DEFAULT_K = 0.45
FFT_BLOCK = 32
BINARIZE_BLOCK = 16

SOBEL_X = np.array([[1, 0, -1],
                    [2, 0, -2],
                    [1, 0, -1]])
SOBEL_Y = np.array([[1, 2, 1],
                    [0, 0, 0],
                    [-1, -2, -1]])


def round_half_up(values) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def to_intensity(values) -> np.ndarray:
    """Round half up and clamp to the 8-bit range."""
    return np.clip(round_half_up(values), 0, 255).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray

    @property
    def width(self) -> int:
        return self.gx.shape[1]

    @property
    def height(self) -> int:
        return self.gx.shape[0]


def histogram_equalize(image: GrayImage) -> GrayImage:
    """Map each intensity v to round(255 * CDF(v))."""
    hist = np.bincount(image.pixels.ravel(), minlength=256)
    cdf = np.cumsum(hist) / image.pixels.size
    lut = to_intensity(255.0 * cdf)
    return GrayImage(lut[image.pixels])


def fft_enhance(image: GrayImage, k: float = DEFAULT_K, block_size: int = FFT_BLOCK) -> GrayImage:
    """Sharpen each block by boosting its dominant frequencies.

    Every block spectrum F is replaced by F * |F|**k and transformed back.
    The real part of the result is affinely rescaled so the block keeps its
    original min/max range. Larger k fills small ridge holes, but too high a
    value can falsely join neighbouring ridges.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    blocks = split_blocks(image, block_size)
    stack = np.stack([b.data for b in blocks]).astype(np.float64)
    spectrum = np.fft.fft2(stack, axes=(1, 2))
    boosted = np.real(np.fft.ifft2(spectrum * np.abs(spectrum) ** k, axes=(1, 2)))

    out = np.empty((image.height, image.width), dtype=np.uint8)
    for block, enhanced in zip(blocks, boosted):
        w, h = block.extent
        x, y = block.origin
        out[y:y + h, x:x + w] = to_intensity(rescale_to(enhanced[:h, :w], block.valid))
    return GrayImage(out)


def rescale_to(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Affinely map ``values`` onto the min/max range of ``reference``."""
    lo, hi = float(reference.min()), float(reference.max())
    vlo, vhi = float(values.min()), float(values.max())
    if hi == lo:
        return np.full(values.shape, lo)
    if vhi - vlo < 1e-12:
        return np.full(values.shape, float(reference.mean()))
    return (values - vlo) * ((hi - lo) / (vhi - vlo)) + lo


def _correlate3(padded: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    h, w = padded.shape[0] - 2, padded.shape[1] - 2
    out = np.zeros((h, w), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            if kernel[dy, dx]:
                out += kernel[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return out


def sobel_gradients(image: GrayImage) -> GradientField:
    """Sobel derivatives by cross-correlation with replicated borders.

    With these kernels a rightward-brightening ramp gives negative gx and a
    downward-brightening ramp gives negative gy.
    """
    if image.width < 3 or image.height < 3:
        raise ImageTooSmall(f"sobel needs at least 3x3 pixels, got {image.width}x{image.height}")
    padded = np.pad(image.pixels.astype(np.int64), 1, mode="edge")
    return GradientField(_correlate3(padded, SOBEL_X), _correlate3(padded, SOBEL_Y))


def gradient_magnitude_direction(field: GradientField) -> Tuple[np.ndarray, np.ndarray]:
    gx = np.asarray(field.gx, dtype=np.float64)
    gy = np.asarray(field.gy, dtype=np.float64)
    return np.hypot(gx, gy), np.arctan2(gy, gx)


def block_means(arr: np.ndarray, block_size: int) -> np.ndarray:
    """Per-block mean over in-image pixels, shape (blocks_y, blocks_x)."""
    h, w = arr.shape
    ph, pw = -h % block_size, -w % block_size
    vals = np.pad(arr.astype(np.float64), ((0, ph), (0, pw)))
    ones = np.pad(np.ones((h, w)), ((0, ph), (0, pw)))
    by, bx = vals.shape[0] // block_size, vals.shape[1] // block_size
    sums = vals.reshape(by, block_size, bx, block_size).sum(axis=(1, 3))
    counts = ones.reshape(by, block_size, bx, block_size).sum(axis=(1, 3))
    return sums / counts


def binarize_adaptive(image: GrayImage, block_size: int = BINARIZE_BLOCK) -> BinaryImage:
    """1 where a pixel is strictly brighter than its block mean, else 0."""
    if block_size < 1:
        raise InvalidBlockSize(f"block size must be >= 1, got {block_size}")
    means = block_means(image.pixels, block_size)
    expanded = np.repeat(np.repeat(means, block_size, axis=0), block_size, axis=1)
    expanded = expanded[:image.height, :image.width]
    return BinaryImage((image.pixels > expanded).astype(np.uint8))
