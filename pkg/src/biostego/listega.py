"""Playlist steganography.

Every payload byte becomes two titles whose initials spell its nibbles
('a' + high nibble, then 'a' + low nibble), and a title starting with 'z'
ends the message. The receiver needs only the initials, never the bank.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (EmptyBank, InadequateBank, InvalidCodeLetter, MissingFile,
                     MissingTerminator, OddNibbleCount)

CODE_LETTERS = string.ascii_lowercase[:16]
TERMINATOR = "z"
REQUIRED_LETTERS = frozenset(CODE_LETTERS + TERMINATOR)


def initial(title: str) -> Optional[str]:
    """First alphabetic character, lowercased; None if there is none."""
    for ch in title:
        if ch.isalpha():
            return ch.lower()
    return None


@dataclass(frozen=True)
class SongBank:
    entries: Tuple[str, ...]
    index: Dict[str, Tuple[str, ...]] = field(compare=False, repr=False)

    def missing_letters(self) -> List[str]:
        return sorted(REQUIRED_LETTERS - set(self.index))

    def check_adequate(self) -> None:
        missing = self.missing_letters()
        if missing:
            raise InadequateBank(missing)


@dataclass(frozen=True)
class ListCover:
    lines: Tuple[str, ...]

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)


def bank_from_titles(titles: Iterable[str], require_adequate: bool = True) -> SongBank:
    entries = tuple(t.strip() for t in titles if t.strip())
    if not entries:
        raise EmptyBank("song bank holds no titles")
    index: Dict[str, List[str]] = {}
    for title in entries:
        letter = initial(title)
        if letter is not None:
            index.setdefault(letter, []).append(title)
    bank = SongBank(entries, {k: tuple(v) for k, v in index.items()})
    if require_adequate:
        bank.check_adequate()
    return bank


def load_bank(path) -> SongBank:
    """One title per line, UTF-8; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFile(f"song bank not found: {path}") from exc
    titles = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return bank_from_titles(titles)


def encode_message(payload: bytes) -> str:
    letters = []
    for b in bytes(payload):
        letters.append(CODE_LETTERS[b >> 4])
        letters.append(CODE_LETTERS[b & 0x0F])
    letters.append(TERMINATOR)
    return "".join(letters)


def decode_letters(letters: Iterable[Optional[str]]) -> bytes:
    """Inverse of :func:`encode_message`; anything after the terminator is ignored."""
    nibbles: List[int] = []
    for pos, letter in enumerate(letters):
        if letter == TERMINATOR:
            if len(nibbles) % 2:
                raise OddNibbleCount(f"terminator at line {pos + 1} follows an unpaired letter")
            return bytes((hi << 4) | lo for hi, lo in zip(nibbles[::2], nibbles[1::2]))
        if letter is None or letter not in CODE_LETTERS:
            raise InvalidCodeLetter(f"line {pos + 1}: initial {letter!r} is not a code letter")
        nibbles.append(CODE_LETTERS.index(letter))
    raise MissingTerminator("cover ends without a terminator line")


def generate_cover(payload: bytes, bank: SongBank, seed: int) -> ListCover:
    """Pick one title per code letter; the same inputs give the same cover.

    Within a letter's bucket the previous line is avoided when the bucket
    has an alternative, so no title repeats back to back.
    """
    bank.check_adequate()
    rng = random.Random(seed)
    lines: List[str] = []
    for letter in encode_message(payload):
        bucket: Sequence[str] = bank.index[letter]
        if lines and len(bucket) > 1 and lines[-1] in bucket:
            bucket = [t for t in bucket if t != lines[-1]] or bucket
        lines.append(rng.choice(bucket))
    return ListCover(tuple(lines))


def decode_cover(cover) -> bytes:
    """Read the payload from a :class:`ListCover` or a sequence of lines."""
    lines = cover.lines if isinstance(cover, ListCover) else cover
    return decode_letters(initial(line) for line in lines if line.strip())


def write_cover(cover: ListCover, path) -> None:
    Path(path).write_text(cover.text(), encoding="utf-8")


def read_cover(path) -> ListCover:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFile(f"cover file not found: {path}") from exc
    return ListCover(tuple(ln for ln in text.splitlines() if ln.strip()))
