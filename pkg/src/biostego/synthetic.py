"""Synthetic ridge patterns with known minutiae, for demos and tests.

Ridges are the dark half-periods of ``cos(2 pi phase)``. The base phase is
either a plane wave (straight parallel ridges) or concentric rings around a
centre (whorl-like flow). Each placed minutia adds a phase dislocation, a
+-1 winding of the polar angle around its core, which inserts one ridge
line with the neighbours bending smoothly around it. Whether the inserted
line ends (termination) or splits (bifurcation) depends on the background
phase at the core, so cores are nudged along the local wave direction until
that phase hits the wanted value.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .imagecore import GrayImage

# fractional background phase at the core giving each minutia kind
_CORE_PHASE = {"termination": 0.8, "bifurcation": 0.3}

Placed = Tuple[str, float, float]


class _Field:
    def __init__(self, period: float, angle: float, center: Optional[Tuple[float, float]]):
        self.period = period
        self.c, self.s = math.cos(angle), math.sin(angle)
        self.center = center

    def base(self, x, y):
        if self.center is None:
            return (x * self.c + y * self.s) / self.period
        return np.hypot(x - self.center[0], y - self.center[1]) / self.period

    def direction(self, x: float, y: float) -> float:
        """Angle of the base wave vector at (x, y)."""
        if self.center is None:
            return math.atan2(self.s, self.c)
        return math.atan2(y - self.center[1], x - self.center[0])


def _winding(x, y, core):
    _, xc, yc, sign, ref = core
    return sign * (np.arctan2(y - yc, x - xc) - ref) / (2 * np.pi)


def phase_print(minutiae: Sequence[Placed], width: int = 256, height: int = 256,
                period: float = 10.0, angle: float = 0.0,
                center: Optional[Tuple[float, float]] = None, contrast: float = 90.0,
                noise: float = 0.0, seed: int = 0) -> Tuple[GrayImage, List[Placed]]:
    """Render a ridge field with the given (kind, x, y) minutiae.

    With ``center`` unset the ridges are straight and ``angle`` is the
    direction of the wave vector (0 gives vertical ridges); otherwise they
    are rings around ``center``. Returns the image and the adjusted cores.
    """
    field = _Field(period, angle, center)
    cores = [[kind, float(x), float(y), 1 if i % 2 == 0 else -1, field.direction(x, y)]
             for i, (kind, x, y) in enumerate(minutiae)]

    def background(x, y, k):
        p = float(field.base(x, y))
        for j, other in enumerate(cores):
            if j != k:
                p += float(_winding(x, y, other))
        return p

    eps = 1e-3
    for _ in range(10):
        for k, core in enumerate(cores):
            x, y = core[1], core[2]
            gx = (background(x + eps, y, k) - background(x - eps, y, k)) / (2 * eps)
            gy = (background(x, y + eps, k) - background(x, y - eps, k)) / (2 * eps)
            g2 = gx * gx + gy * gy
            delta = (_CORE_PHASE[core[0]] - background(x, y, k) % 1.0 + 0.5) % 1.0 - 0.5
            core[1] = x + delta * gx / g2
            core[2] = y + delta * gy / g2
            core[4] = math.atan2(gy, gx)

    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    phase = field.base(xx, yy)
    for core in cores:
        phase = phase + _winding(xx, yy, core)
    img = 128.0 + contrast * np.cos(2 * np.pi * phase)
    if noise:
        img += np.random.default_rng(seed).normal(0.0, noise, img.shape)
    out = GrayImage(np.clip(np.floor(img + 0.5), 0, 255))
    return out, [(kind, x, y) for kind, x, y, _, _ in cores]


def random_layout(seed: int, count: int = 8, width: int = 256, height: int = 256,
                  margin: int = 40, spacing: float = 40.0) -> List[Placed]:
    """``count`` minutiae of random kind, at least ``spacing`` apart."""
    rng = np.random.default_rng(seed)
    placed: List[Placed] = []
    for _ in range(10000):
        if len(placed) == count:
            break
        x = rng.uniform(margin, width - margin)
        y = rng.uniform(margin, height - margin)
        if all(math.hypot(x - px, y - py) >= spacing for _, px, py in placed):
            placed.append((str(rng.choice(["termination", "bifurcation"])), x, y))
    return placed


def enrollment_print(noise: float = 0.0, seed: int = 0):
    """Whorl-like 256x256 print with twelve minutiae of both kinds."""
    return phase_print([("termination", 86, 93), ("bifurcation", 56, 146),
                        ("bifurcation", 168, 73), ("termination", 116, 158),
                        ("termination", 210, 160), ("termination", 130, 197),
                        ("bifurcation", 203, 123), ("bifurcation", 59, 58),
                        ("bifurcation", 76, 196), ("bifurcation", 149, 129),
                        ("bifurcation", 138, 47), ("termination", 42, 92)],
                       period=8.5, center=(136, 159), noise=noise, seed=seed)


def impostor_print(noise: float = 0.0, seed: int = 0):
    """A different finger: straight oblique flow, wider spacing, other layout."""
    return phase_print([("termination", 130, 207), ("termination", 207, 95),
                        ("termination", 112, 137), ("termination", 173, 135),
                        ("termination", 98, 179), ("termination", 120, 64),
                        ("termination", 213, 209), ("bifurcation", 68, 211),
                        ("termination", 150, 177), ("bifurcation", 201, 47),
                        ("bifurcation", 51, 153), ("bifurcation", 74, 54)],
                       period=10.8, angle=1.13, noise=noise, seed=seed)


def six_termination_print(noise: float = 0.0, seed: int = 0):
    """Whorl-like print with exactly six terminations and no bifurcation."""
    return phase_print([("termination", 70, 64), ("termination", 180, 60),
                        ("termination", 122, 150), ("termination", 56, 186),
                        ("termination", 196, 168), ("termination", 130, 210)],
                       period=10.0, center=(120, 110), noise=noise, seed=seed)


def texture_print(width: int = 256, height: int = 256, seed: int = 0) -> GrayImage:
    """Random labyrinth texture from band-passed noise."""
    rng = np.random.default_rng(seed)
    spectrum = np.fft.fft2(rng.normal(size=(height, width)))
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    band = np.exp(-((np.hypot(fx, fy) - 0.1) ** 2) / (2 * (1 / 60.0) ** 2))
    field = np.real(np.fft.ifft2(spectrum * band))
    field /= field.std()
    img = 128 + 90 * np.tanh(2 * field)
    return GrayImage(np.clip(np.floor(img + 0.5), 0, 255))
