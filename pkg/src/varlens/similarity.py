"""Pairwise textual similarity between explanations.

Six metrics, all expressed as percentages in [0, 100] except that cosine
may go negative for anti-aligned embeddings: set-Jaccard overlap of
token unigrams/bigrams and POS-tag unigrams/bigrams, plus cosine and a
bounded Euclidean transform over sentence embeddings. Tags and
embeddings come from a precomputed sidecar; this module never runs model
inference.
"""

from __future__ import annotations

import itertools
import unicodedata
from dataclasses import dataclass
from typing import ClassVar, Sequence

import numpy as np

from .errors import DimMismatch, TooFewRecords, ZeroVector
from .model import ItemBundle


@dataclass(frozen=True)
class SimilarityScores:
    token_1gram: float
    token_2gram: float
    pos_1gram: float
    pos_2gram: float
    cosine: float
    euclidean: float

    METRICS: ClassVar[tuple[str, ...]] = (
        "token_1gram",
        "token_2gram",
        "pos_1gram",
        "pos_2gram",
        "cosine",
        "euclidean",
    )

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.METRICS}


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokenizer that splits off edge punctuation.

    Leading and trailing punctuation characters of each whitespace chunk
    become separate tokens; internal punctuation (apostrophes, hyphens)
    stays attached. Deterministic and language-agnostic.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        i, j = 0, len(chunk)
        leading: list[str] = []
        while i < j and _is_punct(chunk[i]):
            leading.append(chunk[i])
            i += 1
        trailing: list[str] = []
        while j > i and _is_punct(chunk[j - 1]):
            trailing.append(chunk[j - 1])
            j -= 1
        tokens.extend(leading)
        if i < j:
            tokens.append(chunk[i:j])
        tokens.extend(reversed(trailing))
    return tokens


def _ngram_set(seq: Sequence[str], n: int) -> set[tuple[str, ...]]:
    return {tuple(seq[i : i + n]) for i in range(len(seq) - n + 1)}


def ngram_overlap(a: Sequence[str], b: Sequence[str], n: int) -> float:
    """Set-Jaccard overlap of n-grams, as a percentage.

    Two empty n-gram sets count as identical (100); exactly one empty
    set scores 0.
    """
    sa, sb = _ngram_set(a, n), _ngram_set(b, n)
    if not sa and not sb:
        return 100.0
    if not sa or not sb:
        return 0.0
    return 100.0 * len(sa & sb) / len(sa | sb)


def pos_ngram_overlap(a_tags: Sequence[str], b_tags: Sequence[str], n: int) -> float:
    """Same set-Jaccard formula applied to POS tag sequences."""
    return ngram_overlap(a_tags, b_tags, n)


def _check_vectors(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimMismatch(f"vector shapes {u.shape} and {v.shape} are incompatible")
    return u, v


def cosine_percent(u: Sequence[float], v: Sequence[float]) -> float:
    """100 x cosine of the angle between u and v, clamped to [-100, 100]."""
    u, v = _check_vectors(u, v)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine is undefined for a zero vector")
    c = float(np.dot(u, v)) / (nu * nv)
    return 100.0 * max(-1.0, min(1.0, c))


def euclidean_percent(u: Sequence[float], v: Sequence[float]) -> float:
    """Unit-normalized Euclidean distance mapped onto [0, 100].

    With d = |u_hat - v_hat| in [0, 2], the score is 100 * (1 - d / 2):
    identical directions give 100, antipodal directions give 0, and on
    unit vectors the score is a strictly monotone function of cosine.
    """
    u, v = _check_vectors(u, v)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("normalized distance is undefined for a zero vector")
    d = float(np.linalg.norm(u / nu - v / nv))
    return 100.0 * (1.0 - min(d, 2.0) / 2.0)


def item_similarity(bundle: ItemBundle, sidecar, use_sidecar_tokens: bool = False) -> SimilarityScores:
    """Each metric averaged over all unordered explanation pairs of an item.

    ``sidecar`` must provide ``lookup(key)`` returning an entry with
    tokens, pos_tags, and embedding (see ingest.SidecarTable). Token
    n-grams default to the internal tokenizer; pass
    ``use_sidecar_tokens=True`` to score the sidecar's own tokenization
    instead.
    """
    if len(bundle.records) < 2:
        raise TooFewRecords(bundle.item_id, len(bundle.records))
    prepared = []
    for record in bundle.records:
        entry = sidecar.lookup(record.key)
        tokens = list(entry.tokens) if use_sidecar_tokens else tokenize(record.explanation)
        prepared.append((tokens, list(entry.pos_tags), entry.embedding))
    sums = [0.0] * 6
    n_pairs = 0
    for (tok_a, tags_a, emb_a), (tok_b, tags_b, emb_b) in itertools.combinations(prepared, 2):
        scores = (
            ngram_overlap(tok_a, tok_b, 1),
            ngram_overlap(tok_a, tok_b, 2),
            pos_ngram_overlap(tags_a, tags_b, 1),
            pos_ngram_overlap(tags_a, tags_b, 2),
            cosine_percent(emb_a, emb_b),
            euclidean_percent(emb_a, emb_b),
        )
        sums = [acc + s for acc, s in zip(sums, scores)]
        n_pairs += 1
    return SimilarityScores(*(s / n_pairs for s in sums))
