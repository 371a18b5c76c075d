"""Domain model: NLI labels, taxonomy categories, records, bundles, datasets.

All types are immutable after construction and safe to share between
workers. Soft invariants (duplicate annotators, empty explanations, ...)
are *not* enforced by constructors; ``validate_dataset`` reports them as
data so that malformed inputs can be surfaced instead of half-parsed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

from .errors import UnknownCategory, UnknownLabel

EXTERNAL_DIST_TOL = 1e-6


class NliLabel(enum.Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"

    @classmethod
    def parse(cls, value: str) -> "NliLabel":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise UnknownLabel(value, "enc") from None

    def __repr__(self) -> str:  # compact in test diffs
        return f"<{self.value}>"


#: Canonical (E, N, C) order used by every distribution in the package.
LABELS: tuple[NliLabel, ...] = (
    NliLabel.ENTAILMENT,
    NliLabel.NEUTRAL,
    NliLabel.CONTRADICTION,
)


class SuperType(enum.Enum):
    TEXT_BASED = "TextBased"
    WORLD_KNOWLEDGE = "WorldKnowledge"


class TaxonomyCategory(enum.Enum):
    COREFERENCE = "Coreference"
    SYNTACTIC = "Syntactic"
    SEMANTIC = "Semantic"
    PRAGMATIC = "Pragmatic"
    ABSENCE_OF_MENTION = "AbsenceOfMention"
    LOGIC_CONFLICT = "LogicConflict"
    FACTUAL_KNOWLEDGE = "FactualKnowledge"
    INFERENTIAL_KNOWLEDGE = "InferentialKnowledge"

    @property
    def super_type(self) -> SuperType:
        if self in (TaxonomyCategory.FACTUAL_KNOWLEDGE, TaxonomyCategory.INFERENTIAL_KNOWLEDGE):
            return SuperType.WORLD_KNOWLEDGE
        return SuperType.TEXT_BASED

    @classmethod
    def parse(cls, value: str) -> "TaxonomyCategory":
        try:
            return cls(value.strip())
        except (ValueError, AttributeError):
            raise UnknownCategory(value) from None

    def __repr__(self) -> str:
        return f"<{self.value}>"


#: Canonical category order used by distributions and the simulator.
CATEGORIES: tuple[TaxonomyCategory, ...] = tuple(TaxonomyCategory)

_TEC_TO_ENC = {
    "true": NliLabel.ENTAILMENT,
    "either": NliLabel.NEUTRAL,
    "false": NliLabel.CONTRADICTION,
}


def map_raw_label(raw: str, scheme: str) -> NliLabel:
    """Map a source-dataset label string onto the canonical label set.

    ``tec`` maps true/either/false onto entailment/neutral/contradiction;
    ``enc`` accepts the canonical names directly. Matching is
    case-insensitive; anything outside the closed vocabulary raises
    ``UnknownLabel``.
    """
    key = raw.strip().lower()
    if scheme == "tec":
        try:
            return _TEC_TO_ENC[key]
        except KeyError:
            raise UnknownLabel(raw, scheme) from None
    if scheme == "enc":
        try:
            return NliLabel(key)
        except ValueError:
            raise UnknownLabel(raw, scheme) from None
    raise ValueError(f"unknown label scheme {scheme!r}")


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's judgment on one item.

    ``labels`` is the ordered list the annotator gave (LiveNLI permits
    more than one); ``raw_labels`` keeps the original strings as an audit
    trail and defaults to the canonical names when not supplied.
    """

    item_id: str
    dataset_id: str
    annotator_id: str
    labels: tuple[NliLabel, ...]
    explanation: str
    category: TaxonomyCategory
    raw_labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        raw = tuple(self.raw_labels) or tuple(lab.value for lab in self.labels)
        object.__setattr__(self, "raw_labels", raw)

    @property
    def key(self) -> str:
        """Sidecar lookup key."""
        return f"{self.item_id}::{self.annotator_id}"


@dataclass(frozen=True)
class ItemBundle:
    """All records for one premise-hypothesis pair.

    Records are stored sorted by annotator id so that structurally equal
    bundles compare equal regardless of input order.
    """

    item_id: str
    premise: str
    hypothesis: str
    records: tuple[AnnotationRecord, ...]
    external_distribution: tuple[float, float, float] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "records", tuple(sorted(self.records, key=lambda r: r.annotator_id))
        )
        if self.external_distribution is not None:
            object.__setattr__(
                self,
                "external_distribution",
                tuple(float(x) for x in self.external_distribution),
            )

    @property
    def annotator_ids(self) -> tuple[str, ...]:
        return tuple(r.annotator_id for r in self.records)

    def record_for(self, annotator_id: str) -> AnnotationRecord | None:
        for r in self.records:
            if r.annotator_id == annotator_id:
                return r
        return None


@dataclass(frozen=True)
class Dataset:
    """A collection of item bundles; bundles are kept sorted by item id."""

    dataset_id: str
    bundles: tuple[ItemBundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(sorted(self.bundles, key=lambda b: b.item_id)))

    @cached_property
    def by_item(self) -> dict[str, ItemBundle]:
        return {b.item_id: b for b in self.bundles}

    @cached_property
    def annotator_ids(self) -> tuple[str, ...]:
        return tuple(sorted({r.annotator_id for b in self.bundles for r in b.records}))

    @property
    def n_records(self) -> int:
        return sum(len(b.records) for b in self.bundles)


@dataclass(frozen=True)
class Violation:
    item_id: str
    rule: str
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)


def validate_dataset(dataset: Dataset) -> ValidationReport:
    """Check every type invariant and return violations as data.

    Never raises and never mutates its input; an empty report means the
    dataset is well-formed. The violation set is deterministic and
    independent of input order.
    """
    found: list[Violation] = []
    seen_items: set[str] = set()
    for bundle in dataset.bundles:
        if bundle.item_id in seen_items:
            found.append(Violation(bundle.item_id, "DuplicateItemId"))
        seen_items.add(bundle.item_id)
        seen_annotators: set[str] = set()
        for record in bundle.records:
            if record.item_id != bundle.item_id:
                found.append(
                    Violation(bundle.item_id, "MismatchedItemId", record.annotator_id)
                )
            if record.annotator_id in seen_annotators:
                found.append(
                    Violation(bundle.item_id, "DuplicateAnnotator", record.annotator_id)
                )
            seen_annotators.add(record.annotator_id)
            if not record.labels:
                found.append(Violation(bundle.item_id, "EmptyLabels", record.annotator_id))
            elif len(set(record.labels)) != len(record.labels):
                found.append(Violation(bundle.item_id, "DuplicateLabel", record.annotator_id))
            if not record.explanation.strip():
                found.append(
                    Violation(bundle.item_id, "EmptyExplanation", record.annotator_id)
                )
        ext = bundle.external_distribution
        if ext is not None:
            if len(ext) != 3 or any(x < 0 for x in ext) or abs(sum(ext) - 1.0) > EXTERNAL_DIST_TOL:
                found.append(Violation(bundle.item_id, "BadExternalDistribution"))
    found.sort(key=lambda v: (v.item_id, v.rule, v.detail))
    return ValidationReport(tuple(found))
