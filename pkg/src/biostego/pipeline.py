"""End-to-end fingerprint feature extraction and its tunables."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import List, Optional

import numpy as np
from scipy import ndimage

from . import enhancement as enh
from . import matching
from . import minutiae as mn
from . import segmentation as seg
from .errors import ConfigError
from .imagecore import BinaryImage, GrayImage
from .minutiae import Minutia, Removal, Skeleton
from .template import MinutiaeTemplate, samples_x

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    k: float = enh.DEFAULT_K
    fft_block: int = enh.FFT_BLOCK
    binarize_block: int = enh.BINARIZE_BLOCK
    direction_W: int = seg.DIRECTION_BLOCK
    # None means coherence 0.05, i.e. 0.05 / W**2
    E_threshold: Optional[float] = None
    # None means half a direction block
    roi_radius: Optional[int] = None
    spur_iterations: int = mn.SPUR_ITERATIONS
    border_margin: int = mn.BORDER_MARGIN
    r2_angle_tolerance: float = mn.R2_ANGLE_TOLERANCE
    n_samples: int = mn.N_SAMPLES
    r0: float = matching.R0
    theta0: float = matching.THETA0
    similarity_threshold: float = matching.SIMILARITY_THRESHOLD
    decision_threshold: float = matching.DECISION_THRESHOLD
    min_minutiae: int = 4
    # furrow specks up to this many pixels inside a ridge are filled before thinning
    max_hole_area: int = 8

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name in ("k",) and value < 0:
                raise ConfigError("k must be >= 0")
            if f.name not in ("k",) and value <= 0:
                raise ConfigError(f"{f.name} must be positive, got {value}")
        if not 0 < self.similarity_threshold <= 1:
            raise ConfigError("similarity_threshold must lie in (0, 1]")
        if self.n_samples > mn.N_SAMPLES:
            raise ConfigError(f"n_samples is capped at {mn.N_SAMPLES}")

    @property
    def threshold_E(self) -> float:
        if self.E_threshold is not None:
            return self.E_threshold
        return seg.default_threshold(self.direction_W)

    def match_params(self) -> dict:
        return dict(r0=self.r0, theta0=self.theta0,
                    similarity_threshold=self.similarity_threshold,
                    decision_threshold=self.decision_threshold)

    def with_overrides(self, **overrides) -> "PipelineConfig":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError("unknown config keys: " + ", ".join(sorted(unknown)))
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        try:
            return cls().with_overrides(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PipelineResult:
    equalized: GrayImage
    enhanced: GrayImage
    binary: BinaryImage
    gradients: enh.GradientField
    direction_map: seg.DirectionMap
    roi: seg.RoiMask
    thinned: Skeleton
    skeleton: Skeleton
    marked: List[Minutia]
    D: float
    removals: List[Removal]
    minutiae: List[Minutia]
    template: MinutiaeTemplate


def run_pipeline(image: GrayImage, config: PipelineConfig = PipelineConfig(),
                 user_id: str = "anonymous") -> PipelineResult:
    """equalize, FFT enhance, binarize, segment, thin, clean, mark, remove
    false minutiae, orient and sample."""
    equalized = enh.histogram_equalize(image)
    enhanced = enh.fft_enhance(equalized, config.k, config.fft_block)
    binary = enh.binarize_adaptive(enhanced, config.binarize_block)
    gradients = enh.sobel_gradients(enhanced)
    dmap = seg.estimate_direction_map(gradients, config.direction_W, config.threshold_E)
    roi = seg.roi_extract(dmap, config.roi_radius)

    ridge = fill_small_holes((binary.bits == 0) & roi.mask, config.max_hole_area)
    thinned = Skeleton.from_ridge(mn.thin_ridge(ridge))
    skeleton = mn.clean_skeleton(thinned, config.spur_iterations)

    # ridges cut off by the ROI boundary end in spurious terminations
    inner = seg.erode(roi.mask, config.border_margin)
    marked = [m for m in mn.mark_minutiae(skeleton, config.border_margin) if inner[m.y, m.x]]

    try:
        D = mn.inter_ridge_distance(skeleton)
    except mn.EmptySkeleton:
        D = float(max(image.width, image.height))
    removals: List[Removal] = []
    real = mn.remove_false_minutiae(marked, skeleton, D, config.r2_angle_tolerance, removals)
    oriented = mn.orient_minutiae(skeleton, real, D)
    samples = [samples_x(mn.sample_ridge(skeleton, m, D, config.n_samples)) for m in oriented]
    template = MinutiaeTemplate(user_id, image.width, image.height, D, tuple(oriented), tuple(samples))
    log.debug("pipeline: %d marked, %d after false removal, %d records, D=%.3f",
              len(marked), len(real), len(oriented), D)
    return PipelineResult(equalized, enhanced, binary, gradients, dmap, roi, thinned, skeleton,
                          marked, D, removals, oriented, template)


def fill_small_holes(ridge: np.ndarray, max_area: int) -> np.ndarray:
    """Fill 4-connected furrow regions of at most ``max_area`` pixels that
    do not touch the image border."""
    holes, n = ndimage.label(~ridge)
    if n == 0:
        return ridge
    sizes = np.bincount(holes.ravel())
    border = np.unique(np.concatenate([holes[0], holes[-1], holes[:, 0], holes[:, -1]]))
    small = sizes <= max_area
    small[0] = False
    small[border] = False
    return ridge | small[holes]


def extract_template(image: GrayImage, config: PipelineConfig = PipelineConfig(),
                     user_id: str = "anonymous") -> MinutiaeTemplate:
    return run_pipeline(image, config, user_id).template


def overlay_minutiae(result: PipelineResult) -> GrayImage:
    """Skeleton on white with termination squares (0) and bifurcation crosses (96).

    Each marker's centre pixel is the minutia position.
    """
    img = np.full(result.skeleton.ridge.shape, 255, dtype=np.uint8)
    img[result.skeleton.ridge] = 176
    h, w = img.shape

    def put(x, y, v):
        if 0 <= x < w and 0 <= y < h:
            img[y, x] = v

    for m in result.minutiae:
        if m.kind == mn.TERMINATION:
            for d in range(-3, 4):
                for x, y in ((m.x + d, m.y - 3), (m.x + d, m.y + 3), (m.x - 3, m.y + d), (m.x + 3, m.y + d)):
                    put(x, y, 0)
            put(m.x, m.y, 0)
    for m in result.minutiae:
        if m.kind == mn.BIFURCATION:
            for d in range(-3, 4):
                put(m.x + d, m.y + d, 96)
                put(m.x + d, m.y - d, 96)
    return GrayImage(img)


def roi_image(result: PipelineResult) -> GrayImage:
    return GrayImage(np.where(result.roi.mask, 255, 0).astype(np.uint8))


def skeleton_image(skel: Skeleton) -> GrayImage:
    """Ridges drawn black on white."""
    return GrayImage(np.where(skel.ridge, 0, 255).astype(np.uint8))


def binary_image(binary: BinaryImage) -> GrayImage:
    return GrayImage((binary.bits * 255).astype(np.uint8))


def report(result: PipelineResult) -> str:
    tpl = result.template
    kinds = [m.kind for m in result.minutiae]
    lines = [
        f"image {tpl.image_width}x{tpl.image_height}",
        f"inter_ridge_distance {result.D:.6f}",
        f"ridges {result.skeleton.n_ridges}",
        f"roi_fraction {float(result.roi.mask.mean()):.6f}",
        f"marked {len(result.marked)}",
        f"marked_terminations {sum(m.kind == mn.TERMINATION for m in result.marked)}",
        f"marked_bifurcations {sum(m.kind == mn.BIFURCATION for m in result.marked)}",
        f"false_pairs_removed {len(result.removals)}",
        f"minutiae {len(result.minutiae)}",
        f"terminations {kinds.count(mn.TERMINATION)}",
        f"bifurcation_arms {kinds.count(mn.BIFURCATION)}",
    ]
    for r in result.removals:
        lines.append(f"removed {r.rule} ({r.first.x},{r.first.y}) ({r.second.x},{r.second.y})")
    for m in result.minutiae:
        lines.append(f"minutia {m.x} {m.y} {m.theta:.6f} {m.kind} {m.ridge_id}")
    return "\n".join(lines) + "\n"

