"""Per-user minutiae template and its text file format.

Layout::

    BIOSTEGO-TPL v1 <user_id> <width> <height> <D>
    <x> <y> <theta> <kind> <ridge_id> <n> <s1> ... <sn>
    ...

Floats are written with six decimals. ``s1..sn`` are the x coordinates of
the ridge samples in the minutia's local frame.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

from .errors import TemplateFormatError
from .minutiae import KINDS, N_SAMPLES, Minutia

MAGIC = "BIOSTEGO-TPL"
VERSION = "v1"


@dataclass(frozen=True)
class MinutiaeTemplate:
    user_id: str
    image_width: int
    image_height: int
    D: float
    minutiae: Tuple[Minutia, ...]
    ridge_samples: Tuple[Tuple[float, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "minutiae", tuple(self.minutiae))
        object.__setattr__(self, "ridge_samples", tuple(tuple(float(v) for v in s)
                                                        for s in self.ridge_samples))
        if not self.D > 0:
            raise ValueError("inter-ridge distance D must be positive")
        if len(self.ridge_samples) != len(self.minutiae):
            raise ValueError("need one ridge sample sequence per minutia")
        if any(len(s) > N_SAMPLES for s in self.ridge_samples):
            raise ValueError(f"ridge sample sequences hold at most {N_SAMPLES} values")
        if any(c.isspace() for c in self.user_id) or not self.user_id:
            raise ValueError("user id must be a non-empty token")

    def __len__(self) -> int:
        return len(self.minutiae)

    def points(self) -> List[Tuple[float, float, float]]:
        return [(m.x, m.y, m.theta) for m in self.minutiae]


def format_template(tpl: MinutiaeTemplate) -> str:
    lines = [f"{MAGIC} {VERSION} {tpl.user_id} {tpl.image_width} {tpl.image_height} {tpl.D:.6f}"]
    for m, samples in zip(tpl.minutiae, tpl.ridge_samples):
        fields = [str(m.x), str(m.y), f"{m.theta:.6f}", m.kind, str(m.ridge_id), str(len(samples))]
        fields.extend(f"{v:.6f}" for v in samples)
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def parse_template(text: str) -> MinutiaeTemplate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TemplateFormatError("empty template")
    head = lines[0].split()
    if len(head) != 6 or head[0] != MAGIC:
        raise TemplateFormatError("not a minutiae template")
    if head[1] != VERSION:
        raise TemplateFormatError(f"unsupported template version {head[1]!r}")
    try:
        user_id = head[2]
        width, height, D = int(head[3]), int(head[4]), float(head[5])
        minutiae, samples = [], []
        for n, line in enumerate(lines[1:], start=2):
            f = line.split()
            if len(f) < 6 or f[3] not in KINDS:
                raise TemplateFormatError(f"line {n}: malformed minutia record")
            count = int(f[5])
            if len(f) != 6 + count:
                raise TemplateFormatError(f"line {n}: expected {count} samples")
            minutiae.append(Minutia(int(f[0]), int(f[1]), float(f[2]), f[3], int(f[4])))
            samples.append(tuple(float(v) for v in f[6:]))
        return MinutiaeTemplate(user_id, width, height, D, tuple(minutiae), tuple(samples))
    except ValueError as exc:
        if isinstance(exc, TemplateFormatError):
            raise
        raise TemplateFormatError(str(exc)) from exc


def write_template(tpl: MinutiaeTemplate, path) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tpl-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(format_template(tpl))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_template(path) -> MinutiaeTemplate:
    return parse_template(Path(path).read_text(encoding="utf-8"))


def samples_x(samples: Sequence[Tuple[float, float]]) -> Tuple[float, ...]:
    return tuple(p[0] for p in samples)
