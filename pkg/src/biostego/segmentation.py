"""Block orientation, certainty classification and region-of-interest masks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .enhancement import GradientField

DIRECTION_BLOCK = 16
# coherence level below which a block counts as background; the certainty
# level is coherence / W**2, so the threshold is scaled the same way
COHERENCE_THRESHOLD = 0.05


def default_threshold(W: int) -> float:
    return COHERENCE_THRESHOLD / (W * W)


@dataclass(frozen=True, eq=False)
class DirectionMap:
    """Per-block orientation and certainty.

    ``angles`` holds the dominant gradient orientation in [0, pi); ridges
    run perpendicular to it.
    """

    width: int
    height: int
    W: int
    angles: np.ndarray
    certainty: np.ndarray
    threshold: float

    @property
    def foreground(self) -> np.ndarray:
        return self.certainty >= self.threshold

    @property
    def blocks_x(self) -> int:
        return self.angles.shape[1]

    @property
    def blocks_y(self) -> int:
        return self.angles.shape[0]


@dataclass(frozen=True, eq=False)
class RoiMask:
    mask: np.ndarray

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]


def _block_sums(values: np.ndarray, W: int) -> np.ndarray:
    h, w = values.shape
    padded = np.pad(values, ((0, -h % W), (0, -w % W)))
    by, bx = padded.shape[0] // W, padded.shape[1] // W
    return padded.reshape(by, W, bx, W).sum(axis=(1, 3))


def _moments(field: GradientField, W: int):
    if W < 2:
        raise ValueError("block size W must be >= 2")
    gx = np.asarray(field.gx, dtype=np.float64)
    gy = np.asarray(field.gy, dtype=np.float64)
    sxy = _block_sums(2.0 * gx * gy, W)
    sdiff = _block_sums(gx * gx - gy * gy, W)
    senergy = _block_sums(gx * gx + gy * gy, W)
    return sxy, sdiff, senergy


def block_direction(field: GradientField, W: int = DIRECTION_BLOCK) -> np.ndarray:
    """Least-squares block orientation, 0.5 * atan2(sum 2gxgy, sum gx^2 - gy^2) mod pi."""
    sxy, sdiff, _ = _moments(field, W)
    return np.mod(0.5 * np.arctan2(sxy, sdiff), np.pi)


def block_certainty(field: GradientField, W: int = DIRECTION_BLOCK) -> np.ndarray:
    sxy, sdiff, senergy = _moments(field, W)
    num = np.hypot(sdiff, sxy)
    out = np.zeros_like(num)
    nz = senergy > 0
    out[nz] = num[nz] / (W * W * senergy[nz])
    return out


def estimate_direction_map(field: GradientField, W: int = DIRECTION_BLOCK,
                           threshold: Optional[float] = None) -> DirectionMap:
    if threshold is None:
        threshold = default_threshold(W)
    return DirectionMap(field.width, field.height, W,
                        block_direction(field, W), block_certainty(field, W), threshold)


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    """Square erosion; pixels outside the image count as set."""
    if radius <= 0:
        return mask.astype(bool)
    return ndimage.minimum_filter(mask.astype(np.uint8), size=2 * radius + 1,
                                  mode="constant", cval=1).astype(bool)


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Square dilation; pixels outside the image count as clear."""
    if radius <= 0:
        return mask.astype(bool)
    return ndimage.maximum_filter(mask.astype(np.uint8), size=2 * radius + 1,
                                  mode="constant", cval=0).astype(bool)


def opening(mask: np.ndarray, radius: int) -> np.ndarray:
    return dilate(erode(mask, radius), radius)


def closing(mask: np.ndarray, radius: int) -> np.ndarray:
    return erode(dilate(mask, radius), radius)


def rasterize_blocks(flags: np.ndarray, W: int, width: int, height: int) -> np.ndarray:
    full = np.repeat(np.repeat(flags.astype(bool), W, axis=0), W, axis=1)
    return full[:height, :width]


def roi_extract(direction_map: DirectionMap, structuring_radius: Optional[int] = None) -> RoiMask:
    """Foreground blocks cleaned by OPEN (drops specks) then CLOSE (fills holes).

    The default radius is half a block, so the square element is one pixel
    wider than a block: single-block specks and single-block holes go,
    two-block features stay.
    """
    if structuring_radius is None:
        structuring_radius = direction_map.W // 2
    raw = rasterize_blocks(direction_map.foreground, direction_map.W,
                           direction_map.width, direction_map.height)
    return RoiMask(closing(opening(raw, structuring_radius), structuring_radius))
