"""Parsers for the canonical interchange format, source-dataset adapters,
and the precomputed NLP sidecar.

The canonical format is one JSON object per line with fields item_id,
dataset_id, annotator_id, premise, hypothesis, labels, label_scheme
("tec" or "enc"), explanation, category, and an optional
external_distribution triple in (E, N, C) order. The sidecar carries
tokens, POS tags, and an embedding per ``item_id::annotator_id`` key.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .errors import (
    ConflictingItemText,
    DimMismatch,
    DuplicateKey,
    MissingSidecar,
    ParseError,
    UnknownCategory,
    UnknownField,
    UnknownLabel,
)
from .model import (
    AnnotationRecord,
    Dataset,
    ItemBundle,
    TaxonomyCategory,
    map_raw_label,
)

CANONICAL_REQUIRED = (
    "item_id",
    "dataset_id",
    "annotator_id",
    "premise",
    "hypothesis",
    "labels",
    "label_scheme",
    "explanation",
    "category",
)

_TEC_VOCAB = frozenset({"true", "either", "false"})

#: Default field names for the source-dataset adapters. The released
#: files' exact schemas vary, so both maps can be overridden per run.
LIVENLI_FIELD_MAP = {
    "item_id": "id",
    "annotator_id": "annotator",
    "premise": "premise",
    "hypothesis": "hypothesis",
    "labels": "labels",
    "explanation": "explanation",
    "category": "category",
}
VARIERR_FIELD_MAP = dict(LIVENLI_FIELD_MAP)

_HIGHLIGHT_FIELDS = ("highlight", "highlights", "highlight_premise", "highlight_hypothesis")
_VALIDITY_FIELDS = ("validity", "validity_judgments", "judgments")


@dataclass
class IngestResult:
    """Adapter output: the dataset plus counted warnings and rejections."""

    dataset: Dataset
    warnings: Counter = field(default_factory=Counter)
    n_input_records: int = 0
    n_rejected: int = 0


def _json_line(line_no: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        raise ParseError(line_no, f"invalid JSON: {err.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError(line_no, "record must be a JSON object")
    return obj


def _string_field(obj: dict, name: str, line_no: int) -> str:
    value = obj[name]
    if not isinstance(value, str):
        raise ParseError(line_no, f"field {name!r} must be a string")
    return value


def _external_distribution(obj: dict, line_no: int):
    ext = obj.get("external_distribution")
    if ext is None:
        return None
    if (
        not isinstance(ext, list)
        or len(ext) != 3
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in ext)
    ):
        raise ParseError(line_no, "external_distribution must be a list of 3 numbers")
    return tuple(float(x) for x in ext)


class _BundleBuilder:
    """Accumulates per-item state while enforcing text consistency."""

    def __init__(self):
        self.items: dict[str, dict] = {}

    def add(self, record: AnnotationRecord, premise: str, hypothesis: str, ext, line_no: int):
        slot = self.items.get(record.item_id)
        if slot is None:
            self.items[record.item_id] = {
                "premise": premise,
                "hypothesis": hypothesis,
                "ext": ext,
                "records": [record],
            }
            return
        if slot["premise"] != premise or slot["hypothesis"] != hypothesis:
            raise ConflictingItemText(record.item_id)
        if ext is not None:
            if slot["ext"] is None:
                slot["ext"] = ext
            elif slot["ext"] != ext:
                raise ParseError(line_no, f"conflicting external_distribution for item {record.item_id!r}")
        slot["records"].append(record)

    def build(self, dataset_id_hint: str | None = None) -> Dataset:
        bundles = [
            ItemBundle(item_id, slot["premise"], slot["hypothesis"], tuple(slot["records"]), slot["ext"])
            for item_id, slot in self.items.items()
        ]
        if dataset_id_hint is not None:
            dataset_id = dataset_id_hint
        else:
            ids = {r.dataset_id for b in bundles for r in b.records}
            dataset_id = ids.pop() if len(ids) == 1 else (min(ids) if ids else "")
        return Dataset(dataset_id, tuple(bundles))


def parse_canonical(stream: Iterable[str]) -> Dataset:
    """Parse canonical line-delimited records into a Dataset.

    Raises ParseError on the first malformed line and
    ConflictingItemText when two lines of one item disagree on premise
    or hypothesis. Duplicate-annotator and similar soft violations are
    left to ``validate_dataset``.
    """
    builder = _BundleBuilder()
    for line_no, line in enumerate(stream, 1):
        line = line.strip()
        if not line:
            continue
        obj = _json_line(line_no, line)
        missing = [name for name in CANONICAL_REQUIRED if name not in obj]
        if missing:
            raise ParseError(line_no, f"missing fields: {', '.join(missing)}")
        scheme = obj["label_scheme"]
        if scheme not in ("tec", "enc"):
            raise ParseError(line_no, f"unknown label_scheme {scheme!r}")
        raw_labels = obj["labels"]
        if not isinstance(raw_labels, list) or not all(isinstance(x, str) for x in raw_labels):
            raise ParseError(line_no, "labels must be a list of strings")
        try:
            labels = tuple(map_raw_label(raw, scheme) for raw in raw_labels)
        except UnknownLabel as err:
            raise ParseError(line_no, str(err)) from None
        if isinstance(obj["category"], list):
            raise ParseError(line_no, "multi-category explanations are not supported")
        try:
            category = TaxonomyCategory.parse(obj["category"])
        except UnknownCategory as err:
            raise ParseError(line_no, str(err)) from None
        record = AnnotationRecord(
            item_id=_string_field(obj, "item_id", line_no),
            dataset_id=_string_field(obj, "dataset_id", line_no),
            annotator_id=_string_field(obj, "annotator_id", line_no),
            labels=labels,
            explanation=_string_field(obj, "explanation", line_no),
            category=category,
            raw_labels=tuple(raw_labels),
        )
        builder.add(
            record,
            _string_field(obj, "premise", line_no),
            _string_field(obj, "hypothesis", line_no),
            _external_distribution(obj, line_no),
            line_no,
        )
    return builder.build()


def _adapt_source(
    stream: Iterable[str],
    dataset_id: str,
    scheme: str,
    field_map: Mapping[str, str],
    dropped_fields: tuple[str, ...],
    dropped_warning: str,
) -> IngestResult:
    builder = _BundleBuilder()
    warnings: Counter = Counter()
    n_input = 0
    n_rejected = 0
    for line_no, line in enumerate(stream, 1):
        line = line.strip()
        if not line:
            continue
        obj = _json_line(line_no, line)
        missing = [src for src in field_map.values() if src not in obj]
        if missing:
            raise ParseError(line_no, f"missing fields: {', '.join(sorted(missing))}")
        n_input += 1
        if any(name in obj for name in dropped_fields):
            warnings[dropped_warning] += 1
        raw_labels = obj[field_map["labels"]]
        if isinstance(raw_labels, str):
            raw_labels = [raw_labels]
        if not isinstance(raw_labels, list) or not all(isinstance(x, str) for x in raw_labels):
            raise ParseError(line_no, "labels must be a string or list of strings")
        labels = tuple(map_raw_label(raw, scheme) for raw in raw_labels)
        category_value = obj[field_map["category"]]
        if isinstance(category_value, list):
            if len(category_value) == 1:
                category_value = category_value[0]
            else:
                # single-category reduction: multi-category explanations are rejected
                warnings["multi_category_rejected"] += 1
                n_rejected += 1
                continue
        try:
            category = TaxonomyCategory.parse(category_value)
        except UnknownCategory as err:
            raise ParseError(line_no, str(err)) from None
        record = AnnotationRecord(
            item_id=str(obj[field_map["item_id"]]),
            dataset_id=dataset_id,
            annotator_id=str(obj[field_map["annotator_id"]]),
            labels=labels,
            explanation=_string_field(obj, field_map["explanation"], line_no),
            category=category,
            raw_labels=tuple(raw_labels),
        )
        builder.add(
            record,
            _string_field(obj, field_map["premise"], line_no),
            _string_field(obj, field_map["hypothesis"], line_no),
            _external_distribution(obj, line_no),
            line_no,
        )
    return IngestResult(builder.build(dataset_id), warnings, n_input, n_rejected)


def _merge_field_map(
    default: Mapping[str, str], override: Mapping[str, str] | None
) -> Mapping[str, str]:
    """Overlay a partial user override on an adapter's default map."""
    if not override:
        return default
    unknown = set(override) - set(default)
    if unknown:
        raise UnknownField(unknown)
    return {**default, **override}


def adapt_livenli(stream: Iterable[str], field_map: Mapping[str, str] | None = None) -> IngestResult:
    """Adapt LiveNLI-shaped records: tec labels, optional highlights.

    Highlights are dropped with a counted warning; no analysis consumes
    them. Unknown labels propagate as errors. field_map entries replace
    individual default source-field names.
    """
    return _adapt_source(
        stream,
        dataset_id="livenli",
        scheme="tec",
        field_map=_merge_field_map(LIVENLI_FIELD_MAP, field_map),
        dropped_fields=_HIGHLIGHT_FIELDS,
        dropped_warning="highlights_dropped",
    )


def adapt_varierr(stream: Iterable[str], field_map: Mapping[str, str] | None = None) -> IngestResult:
    """Adapt VariErr-shaped records: enc labels, optional validity fields.

    Validity judgments are ignored with a counted warning. field_map
    entries replace individual default source-field names.
    """
    return _adapt_source(
        stream,
        dataset_id="varierr",
        scheme="enc",
        field_map=_merge_field_map(VARIERR_FIELD_MAP, field_map),
        dropped_fields=_VALIDITY_FIELDS,
        dropped_warning="validity_ignored",
    )


@dataclass(frozen=True)
class SidecarEntry:
    key: str
    tokens: tuple[str, ...]
    pos_tags: tuple[str, ...]
    embedding: tuple[float, ...]


@dataclass
class SidecarTable:
    """Lookup table of precomputed per-explanation NLP artifacts."""

    entries: dict[str, SidecarEntry]
    dim: int

    def lookup(self, key: str) -> SidecarEntry:
        try:
            return self.entries[key]
        except KeyError:
            raise MissingSidecar(key) from None

    def get(self, key: str) -> SidecarEntry | None:
        return self.entries.get(key)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_sidecar(stream: Iterable[str]) -> SidecarTable:
    """Load sidecar lines; all embeddings must share one dimensionality."""
    entries: dict[str, SidecarEntry] = {}
    dim: int | None = None
    for line_no, line in enumerate(stream, 1):
        line = line.strip()
        if not line:
            continue
        obj = _json_line(line_no, line)
        missing = [name for name in ("key", "tokens", "pos_tags", "embedding") if name not in obj]
        if missing:
            raise ParseError(line_no, f"missing fields: {', '.join(missing)}")
        tokens = obj["tokens"]
        tags = obj["pos_tags"]
        embedding = obj["embedding"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ParseError(line_no, "tokens must be a list of strings")
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise ParseError(line_no, "pos_tags must be a list of strings")
        if len(tokens) != len(tags):
            raise ParseError(line_no, f"{len(tokens)} tokens but {len(tags)} pos_tags")
        if (
            not isinstance(embedding, list)
            or not embedding
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in embedding)
        ):
            raise ParseError(line_no, "embedding must be a non-empty list of numbers")
        if dim is None:
            dim = len(embedding)
        elif len(embedding) != dim:
            raise DimMismatch(
                f"line {line_no}: embedding has dim {len(embedding)}, table has dim {dim}"
            )
        key = obj["key"]
        if not isinstance(key, str):
            raise ParseError(line_no, "key must be a string")
        if key in entries:
            raise DuplicateKey(key)
        entries[key] = SidecarEntry(
            key, tuple(tokens), tuple(tags), tuple(float(x) for x in embedding)
        )
    return SidecarTable(entries, dim or 0)


def _infer_scheme(raw_labels: tuple[str, ...]) -> str:
    if raw_labels and all(raw.strip().lower() in _TEC_VOCAB for raw in raw_labels):
        return "tec"
    return "enc"


def write_canonical(dataset: Dataset, stream: IO[str]) -> int:
    """Serialize a dataset to canonical lines; returns the line count.

    Lines are ordered by (item_id, annotator_id) and raw label strings
    are written back verbatim with their inferred scheme, so
    ``parse_canonical`` round-trips the dataset exactly.
    """
    count = 0
    for bundle in dataset.bundles:
        for record in bundle.records:
            obj = {
                "item_id": bundle.item_id,
                "dataset_id": record.dataset_id,
                "annotator_id": record.annotator_id,
                "premise": bundle.premise,
                "hypothesis": bundle.hypothesis,
                "labels": list(record.raw_labels),
                "label_scheme": _infer_scheme(record.raw_labels),
                "explanation": record.explanation,
                "category": record.category.value,
            }
            if bundle.external_distribution is not None:
                obj["external_distribution"] = list(bundle.external_distribution)
            stream.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count
