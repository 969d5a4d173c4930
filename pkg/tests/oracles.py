"""Independent reference implementations used by the tests.

These are deliberately naive (direct sums, explicit loops, set algebra) and
share no code with the package beyond plain data types.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction

import numpy as np

EIGHT = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]


# -- DFT ------------------------------------------------------------------------

def _dft_kernel(n: int, sign: int) -> np.ndarray:
    """K[u, v, x, y] = exp(sign * 2 pi i (u x + v y) / n), built term by term."""
    u = np.arange(n).reshape(n, 1, 1, 1)
    v = np.arange(n).reshape(1, n, 1, 1)
    x = np.arange(n).reshape(1, 1, n, 1)
    y = np.arange(n).reshape(1, 1, 1, n)
    return np.exp(sign * 2j * np.pi * (u * x + v * y) / n)


_KERNELS = {}


def direct_dft(block: np.ndarray) -> np.ndarray:
    """F(u, v) = sum_x sum_y f(x, y) exp(-2 pi i (ux/M + vy/N)), all N^4 terms."""
    n = block.shape[0]
    key = (n, -1)
    if key not in _KERNELS:
        _KERNELS[key] = _dft_kernel(n, -1)
    return np.einsum("uvxy,xy->uv", _KERNELS[key], block)


def direct_idft(spectrum: np.ndarray) -> np.ndarray:
    n = spectrum.shape[0]
    key = (n, 1)
    if key not in _KERNELS:
        _KERNELS[key] = _dft_kernel(n, 1)
    return np.einsum("xyuv,uv->xy", _KERNELS[key], spectrum) / (n * n)


def enhance_block_oracle(block: np.ndarray, k: float) -> np.ndarray:
    """Boost the block spectrum by |F|^k, invert, rescale onto the input range."""
    f = block.astype(np.float64)
    F = direct_dft(f)
    g = np.real(direct_idft(F * np.abs(F) ** k))
    lo, hi = f.min(), f.max()
    if hi == lo:
        out = np.full_like(g, lo)
    elif g.max() - g.min() < 1e-12:
        out = np.full_like(g, f.mean())
    else:
        out = lo + (g - g.min()) / (g.max() - g.min()) * (hi - lo)
    return np.clip(np.floor(out + 0.5), 0, 255)


# -- Sobel / binarization ---------------------------------------------------------

def sobel_at(img: np.ndarray, y: int, x: int):
    """Gradients at one pixel by explicit window sums with clamped indices."""
    h, w = img.shape
    kx = [[1, 0, -1], [2, 0, -2], [1, 0, -1]]
    ky = [[1, 2, 1], [0, 0, 0], [-1, -2, -1]]
    gx = gy = 0
    for i in range(3):
        for j in range(3):
            v = int(img[min(max(y + i - 1, 0), h - 1), min(max(x + j - 1, 0), w - 1)])
            gx += kx[i][j] * v
            gy += ky[i][j] * v
    return gx, gy


def binarize_oracle(img: np.ndarray, block: int) -> np.ndarray:
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for by in range(0, h, block):
        for bx in range(0, w, block):
            tile = img[by:by + block, bx:bx + block]
            mean = Fraction(int(tile.astype(np.int64).sum()), tile.size)
            for y in range(tile.shape[0]):
                for x in range(tile.shape[1]):
                    out[by + y, bx + x] = 1 if tile[y, x] > mean else 0
    return out


# -- labeling ---------------------------------------------------------------------

def flood_fill_labels(mask: np.ndarray):
    """8-connected labels in raster order of first pixel, plus the count."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=int)
    current = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or labels[sy, sx]:
                continue
            current += 1
            labels[sy, sx] = current
            queue = deque([(sy, sx)])
            while queue:
                y, x = queue.popleft()
                for dy, dx in EIGHT:
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and mask[yy, xx] and not labels[yy, xx]:
                        labels[yy, xx] = current
                        queue.append((yy, xx))
    return labels, current


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """Two label images describe the same grouping of set pixels."""
    if not np.array_equal(a > 0, b > 0):
        return False
    pairs = set(zip(a[a > 0].tolist(), b[b > 0].tolist()))
    return len(pairs) == len({p[0] for p in pairs}) == len({p[1] for p in pairs})


# -- minutiae marking ---------------------------------------------------------------

def mark_oracle(ridge: np.ndarray, margin: int):
    """Per-pixel neighbour counting, then branch-candidate grouping.

    Returns sets of (x, y) terminations and bifurcations.
    """
    h, w = ridge.shape

    def count(y, x):
        return sum(1 for dy, dx in EIGHT
                   if 0 <= y + dy < h and 0 <= x + dx < w and ridge[y + dy, x + dx])

    def inside(x, y):
        return margin <= x < w - margin and margin <= y < h - margin

    terms, cands = set(), set()
    for y in range(h):
        for x in range(w):
            if ridge[y, x]:
                c = count(y, x)
                if c == 1 and inside(x, y):
                    terms.add((x, y))
                elif c == 3:
                    cands.add((x, y))
    bifs = set()
    seen = set()
    for start in sorted(cands, key=lambda p: (p[1], p[0])):
        if start in seen:
            continue
        group, stack = [], [start]
        seen.add(start)
        while stack:
            p = stack.pop()
            group.append(p)
            for dy, dx in EIGHT:
                q = (p[0] + dx, p[1] + dy)
                if q in cands and q not in seen:
                    seen.add(q)
                    stack.append(q)
        cx = Fraction(sum(p[0] for p in group), len(group))
        cy = Fraction(sum(p[1] for p in group), len(group))
        best = min(group, key=lambda p: ((p[0] - cx) ** 2 + (p[1] - cy) ** 2, p[1], p[0]))
        if inside(*best):
            bifs.add(best)
    return terms, bifs


# -- morphology ---------------------------------------------------------------------

def erode_oracle(mask: np.ndarray, r: int) -> np.ndarray:
    """p survives iff every in-image pixel of its (2r+1)^2 square is set."""
    h, w = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            out[y, x] = all(mask[yy, xx]
                            for yy in range(max(0, y - r), min(h, y + r + 1))
                            for xx in range(max(0, x - r), min(w, x + r + 1)))
    return out


def dilate_oracle(mask: np.ndarray, r: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            out[y, x] = any(mask[yy, xx]
                            for yy in range(max(0, y - r), min(h, y + r + 1))
                            for xx in range(max(0, x - r), min(w, x + r + 1)))
    return out


# -- matching -----------------------------------------------------------------------

def max_matching_oracle(t, q, r0, theta0) -> int:
    """Maximum one-to-one pairing by exhaustive search (small sets only)."""
    def ok(a, b):
        d = math.atan2(math.sin(a[2] - b[2]), math.cos(a[2] - b[2]))
        return math.hypot(a[0] - b[0], a[1] - b[1]) <= r0 and abs(d) <= theta0

    best = 0

    def go(i, used, n):
        nonlocal best
        if n + (len(t) - i) <= best:
            return
        if i == len(t):
            best = max(best, n)
            return
        for j in range(len(q)):
            if j not in used and ok(t[i], q[j]):
                go(i + 1, used | {j}, n + 1)
        go(i + 1, used, n)

    go(0, frozenset(), 0)
    return best


def max_matching_bipartite(t, q, r0, theta0) -> int:
    """Maximum one-to-one pairing via Hopcroft-Karp, for sets too large to enumerate."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    a, b = np.asarray(t, dtype=float).reshape(-1, 3), np.asarray(q, dtype=float).reshape(-1, 3)
    if not len(a) or not len(b):
        return 0
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    dt = np.abs(np.angle(np.exp(1j * (a[:, None, 2] - b[None, :, 2]))))
    adj = csr_matrix(((d <= r0) & (dt <= theta0)).astype(np.int8))
    return int((maximum_bipartite_matching(adj, perm_type="column") >= 0).sum())
