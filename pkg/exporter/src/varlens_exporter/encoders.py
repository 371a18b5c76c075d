"""Sentence encoders behind one small interface.

The default is the reference transformer model, loaded lazily through
sentence-transformers; a machine without the package or the weights gets
a typed EncoderUnavailable instead of an import crash. The hashed
projection encoder is a dependency-free fallback: a fixed signed random
projection of token and text hashes, deterministic across platforms, so
offline runs and tests produce stable sidecars. Its vectors carry no
semantics beyond lexical identity; equal texts map to equal vectors.
"""

from __future__ import annotations

import hashlib

from .errors import EncoderUnavailable
from .tagger import tokenize

DEFAULT_ENCODER = "all-distilroberta-v1"
HASHED_ENCODER = "hashed-256"

_HASHED_DIM = 256


def _scatter(payload: bytes, vector: list[float], rounds: int, weight: float) -> None:
    # Each round hashes payload + round byte into (position, sign).
    space = len(vector) - 1
    for k in range(rounds):
        digest = hashlib.blake2b(payload + bytes([k]), digest_size=8).digest()
        position = int.from_bytes(digest[:4], "big") % space
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vector[position] += sign * weight


class HashedProjectionEncoder:
    name = HASHED_ENCODER
    dim = _HASHED_DIM

    def encode(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            vector = [0.0] * self.dim
            tokens = tokenize(text)
            for token in tokens:
                _scatter(b"tok:" + token.encode("utf-8"), vector, 8, 1.0)
            _scatter(b"txt:" + text.encode("utf-8"), vector, 4, 0.5)
            # The last coordinate is reserved and strictly positive, so
            # no text ever maps to the zero vector.
            vector[-1] = 1.0 + len(tokens)
            out.append(vector)
        return out


class SentenceTransformerEncoder:
    def __init__(self, name: str):
        self.name = name
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderUnavailable(name, f"sentence-transformers not installed ({exc})") from exc
        try:
            self._model = SentenceTransformer(name, device="cpu")
        except Exception as exc:
            raise EncoderUnavailable(name, f"model could not be loaded ({exc})") from exc
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> list[list[float]]:
        vectors = self._model.encode(
            texts,
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )
        return [[float(x) for x in row] for row in vectors]


def get_encoder(name: str):
    """Resolve an encoder name; anything other than the hashed fallback
    is treated as a sentence-transformers model identifier."""
    if name == HASHED_ENCODER:
        return HashedProjectionEncoder()
    return SentenceTransformerEncoder(name)
