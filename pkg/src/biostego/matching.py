"""Minutiae matching: ridge-correlation reference selection, rigid alignment
and elastic pairing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .template import MinutiaeTemplate

SIMILARITY_THRESHOLD = 0.8
R0 = 10.0
THETA0 = math.pi / 6
DECISION_THRESHOLD = 25

Point = Tuple[float, float, float]


class AlignedMinutia(NamedTuple):
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class MatchResult:
    score: int
    matched_pairs: int
    template_count: int
    accepted: bool
    best_reference: Optional[Tuple[int, int]]

    def summary(self) -> str:
        return f"score={self.score} accepted={'true' if self.accepted else 'false'}"


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    w = np.mod(np.asarray(a, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    w = np.where(w <= -np.pi, w + 2 * np.pi, w)
    return float(w) if np.ndim(w) == 0 else w


def ridge_similarity(samples_a: Sequence[float], samples_b: Sequence[float]) -> float:
    """Normalized correlation of two ridge sample sequences over their common prefix."""
    m = min(len(samples_a), len(samples_b))
    if m == 0:
        return 0.0
    a = np.asarray(samples_a[:m], dtype=np.float64)
    b = np.asarray(samples_b[:m], dtype=np.float64)
    denom = math.sqrt(float(a @ a) * float(b @ b))
    if denom == 0.0:
        return 0.0
    return float(np.clip(float(a @ b) / denom, -1.0, 1.0))


def similarity_matrix(samples_a: Sequence[Sequence[float]],
                      samples_b: Sequence[Sequence[float]]) -> np.ndarray:
    """All-pairs :func:`ridge_similarity`, vectorized."""
    width = max([len(s) for s in samples_a] + [len(s) for s in samples_b] + [1])

    def pack(samples):
        arr = np.zeros((len(samples), width))
        lens = np.zeros(len(samples), dtype=int)
        for i, s in enumerate(samples):
            arr[i, :len(s)] = s
            lens[i] = len(s)
        return arr, lens

    a, la = pack(samples_a)
    b, lb = pack(samples_b)
    m = np.minimum(la[:, None], lb[None, :])
    mask = np.arange(width)[None, None, :] < m[:, :, None]
    ab = np.einsum("ik,jk,ijk->ij", a, b, mask)
    aa = np.einsum("ik,ijk->ij", a * a, mask)
    bb = np.einsum("jk,ijk->ij", b * b, mask)
    denom = np.sqrt(aa * bb)
    out = np.zeros_like(ab)
    ok = denom > 0
    out[ok] = np.clip(ab[ok] / denom[ok], -1.0, 1.0)
    return out


def _align_array(points: np.ndarray, ref: Sequence[float]) -> np.ndarray:
    x, y, t = ref
    c, s = math.cos(t), math.sin(t)
    dx = points[:, 0] - x
    dy = points[:, 1] - y
    out = np.empty_like(points, dtype=np.float64)
    out[:, 0] = c * dx + s * dy
    out[:, 1] = -s * dx + c * dy
    out[:, 2] = wrap_angle(points[:, 2] - t)
    return out


def align_set(minutiae: Sequence[Point], ref: Point) -> List[AlignedMinutia]:
    """Express minutiae in the frame of ``ref``.

    The reference sits at the origin and its direction becomes the +x axis,
    i.e. offsets are rotated by -theta_ref. No scaling is applied.
    """
    pts = np.asarray(minutiae, dtype=np.float64).reshape(-1, 3)
    return [AlignedMinutia(*map(float, row)) for row in _align_array(pts, ref)]


def elastic_match(aligned_template, aligned_input, r0: float = R0, theta0: float = THETA0) -> int:
    """Greedy one-to-one pairing within distance ``r0`` and angle ``theta0``.

    Admissible pairs are taken in order of (distance, template index, input
    index) and each minutia is used at most once.
    """
    t = np.asarray(aligned_template, dtype=np.float64).reshape(-1, 3)
    q = np.asarray(aligned_input, dtype=np.float64).reshape(-1, 3)
    if not len(t) or not len(q):
        return 0
    dist = np.hypot(t[:, None, 0] - q[None, :, 0], t[:, None, 1] - q[None, :, 1])
    dtheta = np.abs(wrap_angle(t[:, None, 2] - q[None, :, 2]))
    ii, jj = np.nonzero((dist <= r0) & (dtheta <= theta0))
    if not len(ii):
        return 0
    order = np.lexsort((jj, ii, dist[ii, jj]))
    used_t, used_q = set(), set()
    for k in order:
        i, j = int(ii[k]), int(jj[k])
        if i not in used_t and j not in used_q:
            used_t.add(i)
            used_q.add(j)
    return len(used_t)


def match_points(template_points: Sequence[Point], template_samples: Sequence[Sequence[float]],
                 input_points: Sequence[Point], input_samples: Sequence[Sequence[float]], *,
                 r0: float = R0, theta0: float = THETA0,
                 similarity_threshold: float = SIMILARITY_THRESHOLD,
                 decision_threshold: float = DECISION_THRESHOLD) -> MatchResult:
    """Best elastic match over every reference pair whose ridges correlate.

    A cross-set pair (i, j) is a reference candidate when its ridge
    similarity exceeds ``similarity_threshold``. Both sets are aligned to
    their candidate and the largest matched count wins; ties go to the
    smallest (i, j). With no candidate the score is 0.
    """
    tp = np.asarray(template_points, dtype=np.float64).reshape(-1, 3)
    ip = np.asarray(input_points, dtype=np.float64).reshape(-1, 3)
    n_template = len(tp)
    if n_template == 0 or len(ip) == 0:
        return MatchResult(0, 0, n_template, False, None)

    sim = similarity_matrix(template_samples, input_samples)
    candidates = np.argwhere(sim > similarity_threshold)
    ceiling = min(len(tp), len(ip))
    aligned_t, aligned_i = {}, {}
    best, best_ref = 0, None
    for i, j in candidates:
        i, j = int(i), int(j)
        if i not in aligned_t:
            aligned_t[i] = _align_array(tp, tp[i])
        if j not in aligned_i:
            aligned_i[j] = _align_array(ip, ip[j])
        count = elastic_match(aligned_t[i], aligned_i[j], r0, theta0)
        if count > best:
            best, best_ref = count, (i, j)
            if best == ceiling:
                break
    score = int(math.floor(100.0 * best / n_template + 0.5))
    return MatchResult(score, best, n_template, score >= decision_threshold, best_ref)


def match_templates(template: MinutiaeTemplate, probe: MinutiaeTemplate, **params) -> MatchResult:
    """Compare a probe against an enrolled template; see :func:`match_points`."""
    return match_points(template.points(), template.ridge_samples,
                        probe.points(), probe.ridge_samples, **params)
