"""Skeletonization and minutiae extraction.

Skeleton arrays use 1 for ridge pixels (the inverse of ``BinaryImage``).
Pixel coordinates are (x, y) with y pointing down; arrays are indexed
``[y, x]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import ndimage

from .errors import EmptySkeleton, NotThinned
from .imagecore import BinaryImage

log = logging.getLogger(__name__)

TERMINATION = "termination"
BIFURCATION = "bifurcation"
KINDS = (TERMINATION, BIFURCATION)

BORDER_MARGIN = 10
SPUR_ITERATIONS = 5
N_SAMPLES = 10
R2_ANGLE_TOLERANCE = math.pi / 6

# (dy, dx) counter-clockwise from east
_RING = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))
_EIGHT = np.ones((3, 3), dtype=int)

Pixel = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class Skeleton:
    ridge: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_ridge(cls, ridge) -> "Skeleton":
        ridge = np.asarray(ridge).astype(bool)
        labels, _ = ndimage.label(ridge, structure=_EIGHT)
        ridge = ridge.copy()
        ridge.setflags(write=False)
        labels.setflags(write=False)
        return cls(ridge, labels)

    @property
    def width(self) -> int:
        return self.ridge.shape[1]

    @property
    def height(self) -> int:
        return self.ridge.shape[0]

    @property
    def n_ridges(self) -> int:
        return int(self.labels.max()) if self.labels.size else 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Skeleton) and np.array_equal(self.ridge, other.ridge)


@dataclass(frozen=True)
class Minutia:
    x: int
    y: int
    theta: float
    kind: str
    ridge_id: int
    # junction pixel a decomposed bifurcation arm hangs off
    anchor: Optional[Pixel] = field(default=None, compare=False)

    def distance(self, other: "Minutia") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Removal:
    rule: str
    first: Minutia
    second: Minutia


# -- neighbourhood helpers ------------------------------------------------------

def _ring_stack(img: np.ndarray) -> np.ndarray:
    """(8, h, w) stack of the ring neighbours of every pixel, zero outside."""
    p = np.pad(img.astype(np.uint8), 1)
    h, w = img.shape
    return np.stack([p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w] for dy, dx in _RING])


def neighbor_count(ridge: np.ndarray) -> np.ndarray:
    return _ring_stack(ridge).sum(axis=0)


def _yokoi8(ring: np.ndarray) -> np.ndarray:
    """8-connectivity number; a set pixel is simple exactly when this is 1."""
    inv = 1 - ring.astype(np.int64)
    total = 0
    for k in (0, 2, 4, 6):
        total = total + inv[k] - inv[k] * inv[(k + 1) % 8] * inv[(k + 2) % 8]
    return total


def _local_ring(img: np.ndarray, y: int, x: int) -> np.ndarray:
    h, w = img.shape
    vals = np.zeros(8, dtype=np.int64)
    for i, (dy, dx) in enumerate(_RING):
        yy, xx = y + dy, x + dx
        if 0 <= yy < h and 0 <= xx < w and img[yy, xx]:
            vals[i] = 1
    return vals


def _deletable(img: np.ndarray, y: int, x: int) -> bool:
    ring = _local_ring(img, y, x)
    return ring.sum() >= 2 and _yokoi8(ring) == 1


def has_square(ridge: np.ndarray) -> bool:
    r = ridge.astype(bool)
    return bool(np.any(r[:-1, :-1] & r[1:, :-1] & r[:-1, 1:] & r[1:, 1:]))


# -- thinning -------------------------------------------------------------------

def _zs_candidates(img: np.ndarray, first: bool) -> np.ndarray:
    ring = _ring_stack(img).astype(np.int64)
    # P2..P9 in the usual clockwise-from-north naming
    p2, p3, p4, p5, p6, p7, p8, p9 = ring[2], ring[1], ring[0], ring[7], ring[6], ring[5], ring[4], ring[3]
    seq = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
    b = sum(seq[:8])
    a = sum(((seq[i] == 0) & (seq[i + 1] == 1)).astype(np.int64) for i in range(8))
    if first:
        cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    return img & (b >= 2) & (b <= 6) & (a == 1) & cond


def _delete_sequentially(img: np.ndarray, candidates: np.ndarray) -> bool:
    changed = False
    for y, x in zip(*np.nonzero(candidates)):
        if img[y, x] and _deletable(img, y, x):
            img[y, x] = False
            changed = True
    return changed


def _square_origins(img: np.ndarray) -> np.ndarray:
    r = img
    return r[:-1, :-1] & r[1:, :-1] & r[:-1, 1:] & r[1:, 1:]


def _break_squares(img: np.ndarray) -> bool:
    """Remove 2x2 cores left where every core pixel is a cut pixel.

    Prefers deleting a core pixel without changing the component count
    (this may open a hole); otherwise moves a core pixel to a free
    neighbouring cell that keeps the ridge connected.
    """
    changed = False
    h, w = img.shape
    while True:
        origins = np.argwhere(_square_origins(img))
        if not len(origins):
            return changed
        base = _component_count(img)
        n_squares = len(origins)
        y0, x0 = origins[0]
        core = [(y0, x0), (y0, x0 + 1), (y0 + 1, x0), (y0 + 1, x0 + 1)]
        done = False
        for y, x in core:
            img[y, x] = False
            if _component_count(img) == base:
                done = True
                break
            img[y, x] = True
        for y, x in core if not done else ():
            img[y, x] = False
            for dy, dx in _RING:
                yy, xx = y + dy, x + dx
                if not (0 <= yy < h and 0 <= xx < w) or img[yy, xx]:
                    continue
                img[yy, xx] = True
                if (_component_count(img) == base
                        and _square_origins(img).sum() < n_squares):
                    done = True
                    break
                img[yy, xx] = False
            if done:
                break
            img[y, x] = True
        if not done:
            img[core[0]] = False
            log.debug("could not break 2x2 core at %s without changing topology", core[0])
        changed = True


def _sweep_simple(img: np.ndarray) -> bool:
    changed = False
    while True:
        ring = _ring_stack(img)
        cand = img & (ring.sum(axis=0) >= 2) & (_yokoi8(ring) == 1)
        if not cand.any() or not _delete_sequentially(img, cand):
            return changed
        changed = True


def thin_ridge(ridge: np.ndarray) -> np.ndarray:
    """Thin a boolean ridge mask to unit width, preserving 8-connected components.

    Two-subiteration peeling picks candidates in parallel; each candidate is
    then re-checked against the current state before deletion so no
    component is split or erased. A final sweep removes leftover simple,
    non-end pixels (staircase corners), and any remaining 2x2 cores are
    broken up.
    """
    img = np.array(ridge, dtype=bool)
    changed = True
    while changed:
        changed = False
        for first in (True, False):
            if _delete_sequentially(img, _zs_candidates(img, first)):
                changed = True
    _sweep_simple(img)
    while _break_squares(img):
        if not _sweep_simple(img):
            break
    return img


def thin(binary: BinaryImage) -> Skeleton:
    """Skeletonize the ridge (0-valued) pixels of a binary image."""
    return Skeleton.from_ridge(thin_ridge(binary.bits == 0))


def label_ridges(skel: Skeleton) -> Skeleton:
    """8-connected component labels numbered densely from 1 in raster order."""
    return Skeleton.from_ridge(skel.ridge)


# -- cleanup --------------------------------------------------------------------

def _component_count(img: np.ndarray) -> int:
    return ndimage.label(img, structure=_EIGHT)[1]


def _remove_hbreaks(img: np.ndarray) -> None:
    """Delete the middle pixel of H-shaped bridges unless that splits a ridge."""
    ring = _ring_stack(img).astype(bool)
    e, ne, n, nw, w, sw, s, se = ring
    horizontal = nw & n & ne & sw & s & se & ~w & ~e
    vertical = nw & w & sw & ne & e & se & ~n & ~s
    candidates = img & (horizontal | vertical)
    if not candidates.any():
        return
    base = _component_count(img)
    for y, x in zip(*np.nonzero(candidates)):
        img[y, x] = False
        if _component_count(img) != base:
            img[y, x] = True


def _trace_spur(img: np.ndarray, counts: np.ndarray, end: Pixel, limit: int) -> Optional[List[Pixel]]:
    """Pixels of the dead-end branch from ``end`` when it meets a junction
    within ``limit`` pixels, else None."""
    path = [end]
    prev = None
    cur = end
    while True:
        if cur != end and counts[cur[1], cur[0]] >= 3:
            branch = path[:-1]
            return branch if len(branch) <= limit else None
        if len(path) > limit:
            return None
        nbrs = [p for p in _neighbors(img, cur) if p != prev]
        if len(nbrs) != 1:
            return None
        prev, cur = cur, nbrs[0]
        path.append(cur)


def _prune_spurs(img: np.ndarray, limit: int) -> None:
    if limit <= 0:
        return
    counts = neighbor_count(img)
    ends = [(int(x), int(y)) for y, x in zip(*np.nonzero(img & (counts == 1)))]
    doomed: Set[Pixel] = set()
    for end in ends:
        branch = _trace_spur(img, counts, end, limit)
        if branch:
            doomed.update(branch)
    for x, y in doomed:
        img[y, x] = False


def clean_skeleton(skel: Skeleton, spur_iterations: int = SPUR_ITERATIONS) -> Skeleton:
    """Break H bridges, drop isolated pixels and prune short dead-end spurs."""
    img = np.array(skel.ridge, dtype=bool)
    _remove_hbreaks(img)
    img &= neighbor_count(img) > 0
    _prune_spurs(img, spur_iterations)
    img &= neighbor_count(img) > 0
    # pruning can expose staircase corners at the old junction
    return Skeleton.from_ridge(thin_ridge(img))


# -- marking --------------------------------------------------------------------

def _neighbors(img: np.ndarray, p: Pixel) -> List[Pixel]:
    x, y = p
    h, w = img.shape
    out = []
    for dy, dx in _RING:
        yy, xx = y + dy, x + dx
        if 0 <= yy < h and 0 <= xx < w and img[yy, xx]:
            out.append((xx, yy))
    return out


def _inside(x: int, y: int, w: int, h: int, margin: int) -> bool:
    return margin <= x < w - margin and margin <= y < h - margin


def mark_minutiae(skel: Skeleton, border_margin: int = BORDER_MARGIN) -> List[Minutia]:
    """Terminations (one set neighbour) and bifurcations (three), in raster order.

    Adjacent bifurcation candidates are one branch point seen several times,
    so each 8-connected group collapses to the member nearest its centroid.
    """
    ridge = skel.ridge.astype(bool)
    if has_square(ridge):
        raise NotThinned("skeleton contains a 2x2 block of ridge pixels")
    h, w = ridge.shape
    counts = neighbor_count(ridge)
    found: List[Minutia] = []

    for y, x in zip(*np.nonzero(ridge & (counts == 1))):
        if _inside(x, y, w, h, border_margin):
            found.append(Minutia(int(x), int(y), 0.0, TERMINATION, int(skel.labels[y, x])))

    bif = ridge & (counts == 3)
    groups, n = ndimage.label(bif, structure=_EIGHT)
    for g in range(1, n + 1):
        ys, xs = np.nonzero(groups == g)
        cy, cx = ys.mean(), xs.mean()
        # np.nonzero is raster ordered, so argmin breaks ties by (y, x)
        best = int(np.argmin((ys - cy) ** 2 + (xs - cx) ** 2))
        y, x = int(ys[best]), int(xs[best])
        if _inside(x, y, w, h, border_margin):
            found.append(Minutia(x, y, 0.0, BIFURCATION, int(skel.labels[y, x])))

    found.sort(key=lambda m: (m.y, m.x))
    return found


def inter_ridge_distance(skel: Skeleton) -> float:
    """Mean over occupied rows of row length / ridge pixels in the row."""
    per_row = skel.ridge.astype(bool).sum(axis=1)
    occupied = per_row[per_row > 0]
    if occupied.size == 0:
        raise EmptySkeleton("skeleton has no ridge pixels")
    return float(np.mean(skel.width / occupied))


# -- ridge walking --------------------------------------------------------------

def _blocked_for(skel: Skeleton, m: Minutia) -> Set[Pixel]:
    if m.anchor is None:
        return set()
    blocked = {m.anchor}
    blocked.update(p for p in _neighbors(skel.ridge, m.anchor) if p != (m.x, m.y))
    return blocked


def trace_ridge(skel: Skeleton, start: Pixel, blocked: Iterable[Pixel] = (),
                max_length: float = math.inf) -> Tuple[List[Pixel], List[float]]:
    """Follow a ridge from ``start`` until it ends, forks, or exceeds ``max_length``.

    Returns the visited pixels (start first) and the arc length at each.
    """
    ridge = skel.ridge
    visited = set(blocked)
    visited.add(start)
    path, arc = [start], [0.0]
    cur = start
    while arc[-1] < max_length:
        nxt = [p for p in _neighbors(ridge, cur) if p not in visited]
        if len(nxt) != 1:
            break
        p = nxt[0]
        step = 1.0 if (p[0] == cur[0] or p[1] == cur[1]) else math.sqrt(2.0)
        visited.add(p)
        path.append(p)
        arc.append(arc[-1] + step)
        cur = p
    return path, arc


def minutia_orientation(skel: Skeleton, minutia: Minutia, D: float) -> float:
    """Direction from the minutia to the centroid of the next D pixels of its ridge.

    A ridge consisting of the minutia pixel alone has orientation 0.
    """
    path, _ = trace_ridge(skel, (minutia.x, minutia.y), _blocked_for(skel, minutia), D)
    if len(path) < 2:
        return 0.0
    xs = np.array([p[0] for p in path], dtype=np.float64)
    ys = np.array([p[1] for p in path], dtype=np.float64)
    return math.atan2(ys.mean() - minutia.y, xs.mean() - minutia.x)


def decompose_bifurcation(skel: Skeleton, minutia: Minutia, D: float) -> List[Minutia]:
    """Split a branch point into one record per arm, at the pixel next to it."""
    anchor = (minutia.x, minutia.y)
    arms = []
    for x, y in _neighbors(skel.ridge, anchor):
        arm = Minutia(x, y, 0.0, BIFURCATION, int(skel.labels[y, x]), anchor)
        arms.append(replace(arm, theta=minutia_orientation(skel, arm, D)))
    return arms


def orient_minutiae(skel: Skeleton, minutiae: Sequence[Minutia], D: float) -> List[Minutia]:
    """Terminations get their orientation, branch points become three arms."""
    out = []
    for m in minutiae:
        if m.kind == BIFURCATION and m.anchor is None:
            out.extend(decompose_bifurcation(skel, m, D))
        else:
            out.append(replace(m, theta=minutia_orientation(skel, m, D)))
    return out


def sample_ridge(skel: Skeleton, minutia: Minutia, L: float,
                 n_max: int = N_SAMPLES) -> List[Tuple[float, float]]:
    """Points every L of arc length along the minutia's ridge, in its local frame.

    The local frame puts the minutia at the origin with the x axis along its
    orientation. The walk stops at forks.
    """
    if L <= 0:
        raise ValueError("sampling step L must be positive")
    path, arc = trace_ridge(skel, (minutia.x, minutia.y), _blocked_for(skel, minutia), n_max * L)
    c, s = math.cos(minutia.theta), math.sin(minutia.theta)
    samples = []
    k = 1
    for (px, py), a in zip(path, arc):
        if k > n_max:
            break
        if a >= k * L - 1e-9:
            dx, dy = px - minutia.x, py - minutia.y
            samples.append((c * dx + s * dy, -s * dx + c * dy))
            k += 1
    return samples


# -- false minutiae -------------------------------------------------------------

def _angle_gap_mod_pi(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _between(a: Minutia, b: Minutia, c: Minutia, pad: int = 2) -> bool:
    return (min(a.x, b.x) - pad <= c.x <= max(a.x, b.x) + pad
            and min(a.y, b.y) - pad <= c.y <= max(a.y, b.y) + pad)


def remove_false_minutiae(minutiae: Sequence[Minutia], skel: Skeleton, D: float,
                          angle_tolerance: float = R2_ANGLE_TOLERANCE,
                          removals: Optional[List[Removal]] = None) -> List[Minutia]:
    """Drop spurious minutiae pairs closer than the inter-ridge distance D.

    Rules run in order, each on the survivors of the previous one:

    * R1  bifurcation and termination on the same ridge
    * R1b two bifurcations on the same ridge
    * R2  two terminations on different ridges whose orientations agree
      (mod pi) within ``angle_tolerance`` with no other termination between
      them, i.e. a broken ridge
    * R3  two terminations on the same ridge

    Every removed pair is appended to ``removals`` when given.
    """
    alive = list(minutiae)
    thetas: Dict[int, float] = {}

    def theta(m: Minutia) -> float:
        if id(m) not in thetas:
            thetas[id(m)] = minutia_orientation(skel, m, D)
        return thetas[id(m)]

    def apply(rule: str, kinds: Tuple[str, str], same_ridge: bool, extra=None) -> None:
        nonlocal alive
        doomed = set()
        for i, a in enumerate(alive):
            for j in range(i + 1, len(alive)):
                b = alive[j]
                if sorted((a.kind, b.kind)) != sorted(kinds):
                    continue
                if a.distance(b) >= D or (a.ridge_id == b.ridge_id) != same_ridge:
                    continue
                if extra is not None and not extra(a, b):
                    continue
                doomed.update((i, j))
                if removals is not None:
                    removals.append(Removal(rule, a, b))
                log.debug("%s removes %s and %s", rule, a, b)
        alive = [m for i, m in enumerate(alive) if i not in doomed]

    def broken_ridge(a: Minutia, b: Minutia) -> bool:
        if _angle_gap_mod_pi(theta(a), theta(b)) >= angle_tolerance:
            return False
        return not any(c is not a and c is not b and c.kind == TERMINATION and _between(a, b, c)
                       for c in alive)

    apply("R1", (BIFURCATION, TERMINATION), True)
    apply("R1b", (BIFURCATION, BIFURCATION), True)
    apply("R2", (TERMINATION, TERMINATION), False, broken_ridge)
    apply("R3", (TERMINATION, TERMINATION), True)
    return alive
