"""Sidecar exporter: tokens, POS tags, and embeddings for varlens."""

from .encoders import DEFAULT_ENCODER, HASHED_ENCODER, get_encoder
from .errors import (
    DuplicateKey,
    EncoderUnavailable,
    ExportError,
    ParseError,
    UnknownTagset,
)
from .export import ExportManifest, export, read_records
from .tagger import DEFAULT_TAGSET, RuleTagger, get_tagger, tokenize

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ENCODER",
    "DEFAULT_TAGSET",
    "DuplicateKey",
    "EncoderUnavailable",
    "ExportError",
    "ExportManifest",
    "HASHED_ENCODER",
    "ParseError",
    "RuleTagger",
    "UnknownTagset",
    "export",
    "get_encoder",
    "get_tagger",
    "read_records",
    "tokenize",
    "__version__",
]
