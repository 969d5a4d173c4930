"""Enrollment, verification and the verification-gated stego channels."""

from __future__ import annotations

import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

from . import listega, stego_lsb
from . import pipeline as pl
from .errors import AuthenticationFailed, MissingFile, TooFewMinutiae, UserExists
from .imagecore import load_gray, save_gray
from .matching import MatchResult, match_templates
from .store import TemplateStore, check_user_id

log = logging.getLogger(__name__)

CHANNELS = ("lsb", "list")


@dataclass(frozen=True)
class EnrollSummary:
    user_id: str
    minutiae: int
    D: float
    path: Path


def enroll(store: TemplateStore, user_id: str, fingerprint, config: pl.PipelineConfig,
           overwrite: bool = False) -> EnrollSummary:
    check_user_id(user_id)
    if not overwrite and user_id in store:
        # fail before spending time on the pipeline
        raise UserExists(f"user {user_id!r} is already enrolled")
    template = pl.extract_template(load_gray(fingerprint), config, user_id)
    if len(template) < config.min_minutiae:
        raise TooFewMinutiae(
            f"only {len(template)} minutiae found, at least {config.min_minutiae} needed")
    path = store.save(template, overwrite=overwrite)
    return EnrollSummary(user_id, len(template), template.D, path)


def verify(store: TemplateStore, user_id: str, fingerprint, config: pl.PipelineConfig) -> MatchResult:
    enrolled = store.load(user_id)
    probe = pl.extract_template(load_gray(fingerprint), config, user_id)
    result = match_templates(enrolled, probe, **config.match_params())
    log.info("verify %s: %s (matched %d of %d)", user_id, result.summary(),
             result.matched_pairs, result.template_count)
    return result


def require_verified(store: TemplateStore, user_id: str, fingerprint,
                     config: pl.PipelineConfig) -> MatchResult:
    result = verify(store, user_id, fingerprint, config)
    if not result.accepted:
        raise AuthenticationFailed(f"verification failed for {user_id!r}: {result.summary()}")
    return result


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError as exc:
        raise MissingFile(f"file not found: {path}") from exc


def _write_bytes_atomic(data: bytes, path) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".out-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def send(store: TemplateStore, user_id: str, fingerprint, config: pl.PipelineConfig, *,
         channel: str, payload, out, cover=None, bank=None, seed: int = 0) -> MatchResult:
    """Hide the payload file after a successful verification.

    Every input is prepared before anything is written, so a rejection or a
    channel error leaves no output file behind.
    """
    result = require_verified(store, user_id, fingerprint, config)
    data = _read_bytes(payload)
    if channel == "lsb":
        if cover is None:
            raise ValueError("the lsb channel needs a cover image")
        stego = stego_lsb.embed_lsb(load_gray(cover), data)
        save_gray(stego, out)
    elif channel == "list":
        if bank is None:
            raise ValueError("the list channel needs a song bank")
        text = listega.generate_cover(data, listega.load_bank(bank), seed).text()
        _write_bytes_atomic(text.encode("utf-8"), out)
    else:
        raise ValueError(f"unknown channel {channel!r}")
    return result


def receive(store: TemplateStore, user_id: str, fingerprint, config: pl.PipelineConfig, *,
            channel: str, source, out) -> MatchResult:
    """Recover a payload after a successful verification."""
    result = require_verified(store, user_id, fingerprint, config)
    if channel == "lsb":
        data = stego_lsb.extract_lsb(load_gray(source))
    elif channel == "list":
        data = listega.decode_cover(listega.read_cover(source))
    else:
        raise ValueError(f"unknown channel {channel!r}")
    _write_bytes_atomic(data, out)
    return result


ANALYZE_FILES = ("equalized.png", "enhanced.png", "binarized.png", "roi.png",
                 "thinned.png", "minutiae.png")
REPORT_FILE = "report.txt"


def analyze(fingerprint, out_dir, config: pl.PipelineConfig) -> Dict[str, Path]:
    """Write every pipeline intermediate plus a text report."""
    result = pl.run_pipeline(load_gray(fingerprint), config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = (result.equalized, result.enhanced, pl.binary_image(result.binary),
              pl.roi_image(result), pl.skeleton_image(result.skeleton),
              pl.overlay_minutiae(result))
    written: Dict[str, Path] = {}
    for name, img in zip(ANALYZE_FILES, images):
        save_gray(img, out_dir / name)
        written[name] = out_dir / name
    (out_dir / REPORT_FILE).write_text(pl.report(result), encoding="utf-8")
    written[REPORT_FILE] = out_dir / REPORT_FILE
    return written


def default_store(path: Optional[str]) -> TemplateStore:
    return TemplateStore(path or os.environ.get("BIOSTEGO_STORE") or "biostego-store")
