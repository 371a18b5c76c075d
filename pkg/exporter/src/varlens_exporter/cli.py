"""Command-line wrapper around the export operation.

Exit codes match the consumer's convention: 0 success, 1 usage,
2 validation failure, 3 I/O failure. A JSON summary goes to stdout on
success. The leading "export" token is optional, so both
`varlens-export --in ...` and `varlens-export export --in ...` work.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .encoders import DEFAULT_ENCODER
from .errors import ExportError
from .export import export
from .tagger import DEFAULT_TAGSET


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="varlens-export",
        description="Compute tokens, POS tags, and sentence embeddings for every "
        "explanation in a canonical file, writing a sidecar and its manifest.",
    )
    parser.add_argument("--in", dest="input", required=True, help="canonical file")
    parser.add_argument("--out", required=True, help="sidecar output file")
    parser.add_argument("--manifest", required=True, help="manifest output file")
    parser.add_argument("--encoder", default=DEFAULT_ENCODER,
                        help="encoder name: a sentence-transformers model id, "
                        "or 'hashed-256' for the offline fallback")
    parser.add_argument("--tagset", default=DEFAULT_TAGSET,
                        help="tagset name recorded in the manifest")
    return parser


def run(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if argv and argv[0] == "export":
        argv = argv[1:]
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if not Path(args.input).is_file():
        print(f"varlens-export: i/o error: no such file: {args.input}", file=sys.stderr)
        return 3

    try:
        manifest = export(
            args.input, args.out, args.manifest,
            encoder_name=args.encoder, tagset=args.tagset,
        )
    except ExportError as exc:
        print(f"varlens-export: validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"varlens-export: i/o error: {exc}", file=sys.stderr)
        return 3

    summary = {
        "encoder_name": manifest.encoder_name,
        "tagset_name": manifest.tagset_name,
        "dim": manifest.dim,
        "n_entries": manifest.n_entries,
        "content_hash": manifest.content_hash,
        "out": str(args.out),
        "manifest": str(args.manifest),
    }
    print(json.dumps(summary, sort_keys=True, ensure_ascii=False))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
