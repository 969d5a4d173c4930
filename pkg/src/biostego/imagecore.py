"""Raster types, block tiling and gray image file I/O.

Images are stored as row-major numpy arrays indexed ``[y, x]`` with x growing
to the right and y growing downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptFile, InvalidBlockSize, IoError, MissingFile, UnsupportedFormat

PathLike = Union[str, Path]

_SAVE_FORMATS = {".tif": "TIFF", ".tiff": "TIFF", ".pgm": "PPM", ".png": "PNG"}
_LOAD_FORMATS = {"TIFF", "PPM", "PNG"}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single channel raster."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"gray image must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
                raise ValueError("intensities must be integers")
        object.__setattr__(self, "pixels", _frozen(arr.astype(np.uint8)))

    @classmethod
    def from_data(cls, width: int, height: int, data) -> "GrayImage":
        data = list(data)
        if width < 1 or height < 1 or len(data) != width * height:
            raise ValueError("data length must equal width * height")
        return cls(np.array(data, dtype=np.int64).reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> List[int]:
        return self.pixels.ravel().tolist()

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """1-bit raster. 0 marks ridge pixels, 1 marks furrows."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"binary image must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("binary image values must be 0 or 1")
        object.__setattr__(self, "bits", _frozen(arr.astype(np.uint8)))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def data(self) -> List[int]:
        return self.bits.ravel().tolist()

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryImage) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class Block:
    """A square tile of a parent image.

    ``data`` is always ``size x size``; cells beyond the parent's edge are
    mirror padded. ``extent`` is the (width, height) of the in-image part.
    """

    origin: Tuple[int, int]
    size: int
    data: np.ndarray
    extent: Tuple[int, int]

    @property
    def valid(self) -> np.ndarray:
        w, h = self.extent
        return self.data[:h, :w]


def split_blocks(image, block_size: int) -> List[Block]:
    """Tile ``image`` into ``block_size`` squares in row-major order.

    Edge tiles are mirror padded from their own in-image pixels only, so a
    tile never sees data from its neighbours.
    """
    if block_size < 1:
        raise InvalidBlockSize(f"block size must be >= 1, got {block_size}")
    arr = image.pixels if isinstance(image, GrayImage) else np.asarray(image)
    h, w = arr.shape
    blocks = []
    for y in range(0, h, block_size):
        for x in range(0, w, block_size):
            valid = arr[y:y + block_size, x:x + block_size]
            tile = mirror_pad(valid, block_size)
            tile.setflags(write=False)
            blocks.append(Block((x, y), block_size, tile, (valid.shape[1], valid.shape[0])))
    return blocks


def block_grid_shape(width: int, height: int, block_size: int) -> Tuple[int, int]:
    """(blocks_x, blocks_y) for the given image size."""
    return math.ceil(width / block_size), math.ceil(height / block_size)


def mirror_pad(tile: np.ndarray, size: int) -> np.ndarray:
    """Mirror pad the right and bottom of ``tile`` up to ``size x size``."""
    out = np.asarray(tile)
    # "symmetric" padding cannot exceed the array extent in one call
    while out.shape[0] < size or out.shape[1] < size:
        need_h = min(size - out.shape[0], out.shape[0])
        need_w = min(size - out.shape[1], out.shape[1])
        out = np.pad(out, ((0, need_h), (0, need_w)), mode="symmetric")
    return np.array(out, copy=True)


def load_gray(path: PathLike) -> GrayImage:
    """Read an 8-bit grayscale TIFF, PGM (P5) or PNG file."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")
    try:
        with Image.open(path) as img:
            if img.format not in _LOAD_FORMATS:
                raise UnsupportedFormat(f"{path}: unsupported container {img.format}")
            if img.mode != "L":
                raise UnsupportedFormat(f"{path}: expected 8-bit grayscale, got mode {img.mode}")
            if getattr(img, "n_frames", 1) > 1:
                raise UnsupportedFormat(f"{path}: multi-page images are not supported")
            img.load()
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a recognised image") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, (UnsupportedFormat, MissingFile)):
            raise
        raise CorruptFile(f"{path}: {exc}") from exc
    return GrayImage(arr)


def save_gray(image: GrayImage, path: PathLike) -> None:
    """Write ``image`` losslessly; the container follows the file extension."""
    path = Path(path)
    fmt = _SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise UnsupportedFormat(f"cannot write {path.suffix!r} files; use .tif, .pgm or .png")
    try:
        Image.fromarray(np.ascontiguousarray(image.pixels)).save(path, format=fmt)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
