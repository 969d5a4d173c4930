"""Least-significant-bit payload embedding.

Bitstream layout, one bit per 8-bit sample in row-major (storage) order,
every byte MSB first::

    bits 0..31   magic b"BSG1"
    bits 32..63  payload length in bytes, unsigned big-endian
    bits 64..    payload
"""

from __future__ import annotations

import struct
from typing import Union

import numpy as np

from .errors import NoMagic, PayloadTooLarge, TruncatedPayload
from .imagecore import GrayImage

MAGIC = b"BSG1"
HEADER_BITS = 64

Cover = Union[GrayImage, np.ndarray]


def _samples(cover: Cover) -> np.ndarray:
    arr = cover.pixels if isinstance(cover, GrayImage) else np.asarray(cover)
    if arr.dtype != np.uint8:
        raise TypeError(f"cover samples must be uint8, got {arr.dtype}")
    return arr


def capacity(cover: Cover) -> int:
    """Number of payload-carrying bits, header included: one per sample."""
    return int(_samples(cover).size)


def _wrap(template: Cover, arr: np.ndarray) -> Cover:
    return GrayImage(arr) if isinstance(template, GrayImage) else arr


def embed_lsb(cover: Cover, payload: bytes) -> Cover:
    """Return a copy of ``cover`` carrying ``payload``; samples move by at most 1."""
    arr = _samples(cover)
    payload = bytes(payload)
    if len(payload) > 0xFFFFFFFF:
        raise PayloadTooLarge(HEADER_BITS + 8 * len(payload), arr.size)
    stream = MAGIC + struct.pack(">I", len(payload)) + payload
    bits = np.unpackbits(np.frombuffer(stream, dtype=np.uint8))
    if bits.size > arr.size:
        raise PayloadTooLarge(int(bits.size), int(arr.size))
    flat = arr.flatten()
    flat[:bits.size] = (flat[:bits.size] & 0xFE) | bits
    return _wrap(cover, flat.reshape(arr.shape))


def _read_bytes(flat: np.ndarray, start_bit: int, count: int) -> bytes:
    return np.packbits(flat[start_bit:start_bit + 8 * count] & 1).tobytes()


def extract_lsb(stego: Cover) -> bytes:
    """Recover the payload written by :func:`embed_lsb`."""
    flat = _samples(stego).ravel()
    if flat.size < HEADER_BITS:
        raise NoMagic(f"image holds only {flat.size} bits, too few for a header")
    if _read_bytes(flat, 0, 4) != MAGIC:
        raise NoMagic("no embedded payload found (magic mismatch)")
    (length,) = struct.unpack(">I", _read_bytes(flat, 32, 4))
    needed = HEADER_BITS + 8 * length
    if needed > flat.size:
        raise TruncatedPayload(
            f"header declares {length} bytes but the image holds {(flat.size - HEADER_BITS) // 8}")
    return _read_bytes(flat, HEADER_BITS, length)
