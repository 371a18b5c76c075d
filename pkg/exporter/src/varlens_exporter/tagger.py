"""Deterministic tokenization and rule-based Penn Treebank tagging.

The tokenizer matches the consumer's internal one (lowercase whitespace
chunks with edge punctuation split off), so sidecar tokens can stand in
for internal tokens without changing n-gram sets. Tagging is a fixed
cascade: punctuation map, closed-class lexicon, number shape, suffix
rules, NN default. No models, no state, so re-runs are byte-stable.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import UnknownTagset

DEFAULT_TAGSET = "ptb-rules"


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
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


_PUNCT_TAGS = {
    ".": ".", "!": ".", "?": ".",
    ",": ",",
    ":": ":", ";": ":", "...": ":",
    "(": "-LRB-", "[": "-LRB-", "{": "-LRB-",
    ")": "-RRB-", "]": "-RRB-", "}": "-RRB-",
    "“": "``", "`": "``", "``": "``",
    "”": "''", "'": "''", '"': "''",
    "$": "$", "#": "#",
}

_LEXICON = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "some": "DT", "any": "DT", "no": "DT",
    "each": "DT", "every": "DT", "both": "DT", "all": "DT",
    "i": "PRP", "you": "PRP", "he": "PRP", "she": "PRP", "it": "PRP",
    "we": "PRP", "they": "PRP", "me": "PRP", "him": "PRP", "her": "PRP",
    "us": "PRP", "them": "PRP",
    "my": "PRP$", "your": "PRP$", "his": "PRP$", "its": "PRP$",
    "our": "PRP$", "their": "PRP$",
    "in": "IN", "on": "IN", "at": "IN", "of": "IN", "for": "IN",
    "with": "IN", "from": "IN", "by": "IN", "about": "IN", "as": "IN",
    "into": "IN", "over": "IN", "under": "IN", "between": "IN",
    "through": "IN", "during": "IN", "against": "IN", "if": "IN",
    "because": "IN", "while": "IN", "since": "IN", "although": "IN",
    "whether": "IN",
    "and": "CC", "or": "CC", "but": "CC", "nor": "CC", "so": "CC",
    "yet": "CC",
    "can": "MD", "could": "MD", "will": "MD", "would": "MD",
    "shall": "MD", "should": "MD", "may": "MD", "might": "MD",
    "must": "MD",
    "is": "VBZ", "are": "VBP", "am": "VBP", "was": "VBD", "were": "VBD",
    "be": "VB", "been": "VBN", "being": "VBG",
    "has": "VBZ", "have": "VBP", "had": "VBD",
    "does": "VBZ", "do": "VBP", "did": "VBD",
    "not": "RB", "n't": "RB", "never": "RB", "also": "RB",
    "there": "EX",
    "to": "TO",
    "who": "WP", "what": "WP", "whom": "WP",
    "which": "WDT",
    "when": "WRB", "where": "WRB", "why": "WRB", "how": "WRB",
    "one": "CD", "two": "CD", "three": "CD", "four": "CD", "five": "CD",
    "six": "CD", "seven": "CD", "eight": "CD", "nine": "CD", "ten": "CD",
}

# Ordered: the first matching suffix wins.
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ance", "ence", "ship",
                  "hood", "ism", "ity")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ical", "ish", "less")


def _is_number(token: str) -> bool:
    seen_digit = False
    for ch in token:
        if ch.isdigit():
            seen_digit = True
        elif ch not in ".,:/-%":
            return False
    return seen_digit


def _tag_token(token: str) -> str:
    if token in _PUNCT_TAGS:
        return _PUNCT_TAGS[token]
    if all(_is_punct(ch) for ch in token):
        return "SYM"
    if _is_number(token):
        return "CD"
    if token in _LEXICON:
        return _LEXICON[token]
    if token.endswith("ly") and len(token) > 3:
        return "RB"
    if token.endswith("ing") and len(token) > 4:
        return "VBG"
    if token.endswith("ed") and len(token) > 3:
        return "VBD"
    for suffix in _NOUN_SUFFIXES:
        if token.endswith(suffix) and len(token) > len(suffix) + 1:
            return "NN"
    for suffix in _ADJ_SUFFIXES:
        if token.endswith(suffix) and len(token) > len(suffix) + 1:
            return "JJ"
    if token.endswith("s") and len(token) > 3 and not token.endswith(("ss", "us", "is")):
        return "NNS"
    return "NN"


@dataclass(frozen=True)
class RuleTagger:
    name: str = DEFAULT_TAGSET

    def process(self, text: str) -> tuple[list[str], list[str]]:
        """Token and tag lists of equal length, by construction."""
        tokens = tokenize(text)
        return tokens, [_tag_token(t) for t in tokens]


_TAGSETS = {DEFAULT_TAGSET: RuleTagger()}


def get_tagger(name: str) -> RuleTagger:
    try:
        return _TAGSETS[name]
    except KeyError:
        raise UnknownTagset(name) from None
