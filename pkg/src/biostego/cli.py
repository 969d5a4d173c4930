"""Command-line entry point.

Exit codes: 0 success or accepted, 1 rejected, 2 usage or not found,
3 bad data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import workflow
from .errors import BiostegoError, ConfigError
from .pipeline import PipelineConfig

log = logging.getLogger("biostego")


def _parse_override(text: str):
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(f"value for {key} is not a number or JSON literal: {raw!r}")
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biostego",
        description="Fingerprint-gated steganography: enroll, verify, send, receive, analyze.")
    parser.add_argument("--store", help="template store directory (default: $BIOSTEGO_STORE)")
    parser.add_argument("--config", help="JSON file with pipeline settings")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        type=_parse_override, metavar="KEY=VALUE",
                        help="override one pipeline setting, e.g. --set k=0.5 (repeatable)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="extract and store a user's template")
    p.add_argument("--user", required=True)
    p.add_argument("--fingerprint", required=True)
    p.add_argument("--overwrite", action="store_true")

    p = sub.add_parser("verify", help="match a probe print against the stored template")
    p.add_argument("--user", required=True)
    p.add_argument("--fingerprint", required=True)

    p = sub.add_parser("send", help="hide a payload after verification")
    p.add_argument("--user", required=True)
    p.add_argument("--fingerprint", required=True)
    p.add_argument("--channel", required=True, choices=workflow.CHANNELS)
    p.add_argument("--payload", required=True)
    p.add_argument("--cover", help="cover image (lsb channel)")
    p.add_argument("--bank", help="song bank file (list channel)")
    p.add_argument("--seed", type=int, default=0, help="title selection seed (list channel)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("receive", help="recover a payload after verification")
    p.add_argument("--user", required=True)
    p.add_argument("--fingerprint", required=True)
    p.add_argument("--channel", required=True, choices=workflow.CHANNELS)
    p.add_argument("--input", required=True, help="stego image or playlist file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="write every pipeline intermediate and a report")
    p.add_argument("--fingerprint", required=True)
    p.add_argument("--out-dir", required=True)
    return parser


def load_config(args) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    if args.overrides:
        try:
            config = config.with_overrides(**dict(args.overrides))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
    return config


def run(args) -> int:
    config = load_config(args)
    cmd = args.command
    if cmd == "analyze":
        written = workflow.analyze(args.fingerprint, args.out_dir, config)
        for path in written.values():
            print(path)
        return 0

    store = workflow.default_store(args.store)
    if cmd == "enroll":
        summary = workflow.enroll(store, args.user, args.fingerprint, config, args.overwrite)
        print(f"enrolled {summary.user_id} minutiae={summary.minutiae} D={summary.D:.3f}")
        return 0
    if cmd == "verify":
        result = workflow.verify(store, args.user, args.fingerprint, config)
        print(result.summary())
        return 0 if result.accepted else 1
    if cmd == "send":
        if args.channel == "lsb" and not args.cover:
            raise _Usage("--cover is required for the lsb channel")
        if args.channel == "list" and not args.bank:
            raise _Usage("--bank is required for the list channel")
        result = workflow.send(store, args.user, args.fingerprint, config, channel=args.channel,
                               payload=args.payload, out=args.out, cover=args.cover,
                               bank=args.bank, seed=args.seed)
        print(result.summary())
        print(f"wrote {args.out}")
        return 0
    if cmd == "receive":
        result = workflow.receive(store, args.user, args.fingerprint, config,
                                  channel=args.channel, source=args.input, out=args.out)
        print(result.summary())
        print(f"wrote {args.out}")
        return 0
    raise _Usage(f"unknown command {cmd!r}")


class _Usage(BiostegoError):
    exit_code = 2


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except BiostegoError as exc:
        print(f"biostego: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
