"""Exception hierarchy.

Every error carries the process exit code the CLI reports for it:
1 for a rejected authentication, 2 for usage and not-found problems,
3 for bad data.
"""

from __future__ import annotations


class BiostegoError(Exception):
    exit_code = 3


# image I/O

class ImageError(BiostegoError):
    pass


class MissingFile(ImageError, FileNotFoundError):
    exit_code = 2


class UnsupportedFormat(ImageError):
    pass


class CorruptFile(ImageError):
    pass


class IoError(ImageError):
    pass


class InvalidBlockSize(BiostegoError, ValueError):
    exit_code = 2


class ImageTooSmall(BiostegoError, ValueError):
    pass


# minutiae

class NotThinned(BiostegoError, ValueError):
    pass


class EmptySkeleton(BiostegoError, ValueError):
    pass


class TemplateFormatError(BiostegoError, ValueError):
    pass


# steganography

class PayloadTooLarge(BiostegoError, ValueError):
    def __init__(self, required_bits: int, available_bits: int):
        super().__init__(
            f"payload needs {required_bits} bits but the cover holds {available_bits}"
        )
        self.required_bits = required_bits
        self.available_bits = available_bits


class NoMagic(BiostegoError, ValueError):
    pass


class TruncatedPayload(BiostegoError, ValueError):
    pass


class EmptyBank(BiostegoError, ValueError):
    pass


class InadequateBank(BiostegoError, ValueError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__("song bank has no titles for code letters: " + ", ".join(self.missing))


class InvalidCodeLetter(BiostegoError, ValueError):
    pass


class OddNibbleCount(BiostegoError, ValueError):
    pass


class MissingTerminator(BiostegoError, ValueError):
    pass


# enrollment / verification

class UserExists(BiostegoError):
    exit_code = 2


class UnknownUser(BiostegoError, KeyError):
    exit_code = 2

    def __str__(self) -> str:
        return Exception.__str__(self)


class InvalidUserId(BiostegoError, ValueError):
    exit_code = 2


class TooFewMinutiae(BiostegoError):
    pass


class AuthenticationFailed(BiostegoError):
    exit_code = 1


class ConfigError(BiostegoError, ValueError):
    exit_code = 2
