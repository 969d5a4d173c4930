"""Random raster generators shared by the thinning and marking tests."""

import numpy as np

from biostego.minutiae import thin_ridge


def random_blobs(rng, max_size=32):
    """Union of random rectangles, discs and speckle on a canvas <= max_size."""
    h, w = rng.integers(4, max_size + 1, 2)
    img = np.zeros((h, w), dtype=bool)
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(rng.integers(1, 6)):
        if rng.random() < 0.5:
            y0, x0 = rng.integers(0, h), rng.integers(0, w)
            img[y0:y0 + rng.integers(1, 12), x0:x0 + rng.integers(1, 12)] = True
        else:
            cy, cx, r = rng.integers(0, h), rng.integers(0, w), rng.uniform(1, 7)
            img |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    img |= rng.random((h, w)) < rng.uniform(0, 0.15)
    return img


def random_skeleton(rng, max_size=16):
    """A unit-width skeleton: random strokes thinned to fixpoint."""
    h, w = rng.integers(5, max_size + 1, 2)
    img = np.zeros((h, w), dtype=bool)
    for _ in range(rng.integers(1, 5)):
        y, x = rng.integers(0, h), rng.integers(0, w)
        for _ in range(rng.integers(2, 20)):
            img[y, x] = True
            y = int(np.clip(y + rng.integers(-1, 2), 0, h - 1))
            x = int(np.clip(x + rng.integers(-1, 2), 0, w - 1))
    return thin_ridge(img)


def draw_line(img, x0, y0, x1, y1):
    n = max(abs(x1 - x0), abs(y1 - y0))
    for t in range(n + 1):
        x = x0 + round(t * (x1 - x0) / n) if n else x0
        y = y0 + round(t * (y1 - y0) / n) if n else y0
        img[y, x] = True
    return img
