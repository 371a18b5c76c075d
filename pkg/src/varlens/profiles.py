"""Per-annotator label/category distributions, overlapping-annotator
subset selection, and the category x label co-occurrence matrix.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Container, Iterable

from .agreement import LabelSelectionRule, label_weights
from .errors import NoRecords, TooFewAnnotators
from .model import CATEGORIES, LABELS, Dataset, NliLabel, TaxonomyCategory

#: Above this many candidate subsets, overlap selection switches from
#: exhaustive enumeration to greedy refinement.
EXACT_ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class AnnotatorProfile:
    """Label and category preference percentages over a chosen item set."""

    annotator_id: str
    n_examples: int
    label_dist: tuple[float, float, float]          # percentages, (E, N, C) order
    category_dist: tuple[float, ...]                # percentages, CATEGORIES order

    def label_pct(self, label: NliLabel) -> float:
        return self.label_dist[LABELS.index(label)]

    def category_pct(self, category: TaxonomyCategory) -> float:
        return self.category_dist[CATEGORIES.index(category)]


def annotator_profile(
    dataset: Dataset,
    annotator_id: str,
    item_filter: Container[str] | None = None,
    rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED,
) -> AnnotatorProfile:
    """Distributions over the annotator's records passing the filter.

    ``item_filter`` restricts to a set of item ids (None keeps all).
    Under the explode rule a multi-label record contributes fractional
    mass 1/|labels| per label, so total label mass still equals the
    record count.
    """
    records = [
        r
        for b in dataset.bundles
        if item_filter is None or b.item_id in item_filter
        for r in b.records
        if r.annotator_id == annotator_id
    ]
    if not records:
        raise NoRecords(annotator_id)
    label_mass = {label: 0.0 for label in LABELS}
    category_mass = {category: 0.0 for category in CATEGORIES}
    for record in records:
        for label, weight in label_weights(record, rule).items():
            label_mass[label] += weight
        category_mass[record.category] += 1.0
    n = len(records)
    return AnnotatorProfile(
        annotator_id=annotator_id,
        n_examples=n,
        label_dist=tuple(100.0 * label_mass[label] / n for label in LABELS),
        category_dist=tuple(100.0 * category_mass[c] / n for c in CATEGORIES),
    )


@dataclass(frozen=True)
class OverlapSelection:
    annotators: tuple[str, ...]
    overlap: int
    exact: bool


def _items_by_annotator(dataset: Dataset) -> dict[str, frozenset[str]]:
    out: dict[str, set[str]] = {}
    for bundle in dataset.bundles:
        for record in bundle.records:
            out.setdefault(record.annotator_id, set()).add(bundle.item_id)
    return {a: frozenset(items) for a, items in out.items()}


def _overlap(items: dict[str, frozenset[str]], combo: Iterable[str]) -> int:
    sets = [items[a] for a in combo]
    return len(frozenset.intersection(*sets))


def shared_items(dataset: Dataset, annotators: Iterable[str]) -> frozenset[str]:
    """Item ids annotated by every one of the given annotators."""
    items = _items_by_annotator(dataset)
    sets = [items.get(a, frozenset()) for a in annotators]
    if not sets:
        return frozenset()
    return frozenset.intersection(*sets)


def select_overlapping_annotators(dataset: Dataset, k: int) -> OverlapSelection:
    """The size-k annotator set jointly covering the most items.

    Enumerates all candidate sets when their count stays within
    EXACT_ENUMERATION_LIMIT; otherwise falls back to greedy seeding plus
    single-swap hill climbing and flags the result as approximate. Ties
    break toward the lexicographically smallest annotator tuple.
    """
    items = _items_by_annotator(dataset)
    annotators = sorted(items)
    if len(annotators) < k:
        raise TooFewAnnotators(len(annotators), k)
    if math.comb(len(annotators), k) <= EXACT_ENUMERATION_LIMIT:
        best_combo: tuple[str, ...] | None = None
        best_overlap = -1
        # combinations() of a sorted pool yields candidates in lexicographic
        # order, so keeping only strict improvements realizes the tie rule.
        for combo in itertools.combinations(annotators, k):
            overlap = _overlap(items, combo)
            if overlap > best_overlap:
                best_combo, best_overlap = combo, overlap
        return OverlapSelection(best_combo, best_overlap, True)

    # Greedy seed: largest item sets first (ties lexicographic), then swap
    # members while any single exchange improves the joint overlap.
    seed = sorted(annotators, key=lambda a: (-len(items[a]), a))[:k]
    current = sorted(seed)
    current_overlap = _overlap(items, current)
    improved = True
    while improved:
        improved = False
        for i, member in enumerate(list(current)):
            for candidate in annotators:
                if candidate in current:
                    continue
                trial = sorted(current[:i] + current[i + 1 :] + [candidate])
                trial_overlap = _overlap(items, trial)
                if trial_overlap > current_overlap:
                    current, current_overlap = trial, trial_overlap
                    improved = True
                    break
            if improved:
                break
    return OverlapSelection(tuple(current), current_overlap, False)


class Normalization(enum.Enum):
    NONE = "none"
    PER_DATASET = "per_dataset"
    PER_CATEGORY = "per_category"


@dataclass
class CooccurrenceMatrix:
    """Category x label mass with an optional normalized view.

    ``counts`` holds raw mass: whole counts under first_listed and
    strict_single, possibly fractional under the explode rule. ``values``
    is the normalized view selected by ``normalization``; rows of empty
    categories stay zero and are flagged in ``empty_categories``.
    """

    counts: dict[TaxonomyCategory, dict[NliLabel, float]]
    normalization: Normalization
    values: dict[TaxonomyCategory, dict[NliLabel, float]]
    empty_categories: tuple[TaxonomyCategory, ...]

    @property
    def total(self) -> float:
        return sum(v for row in self.counts.values() for v in row.values())


def cooccurrence(
    dataset: Dataset,
    rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED,
    normalization: Normalization = Normalization.NONE,
) -> CooccurrenceMatrix:
    """Tally (category, selected label) mass over every record."""
    counts = {c: {label: 0.0 for label in LABELS} for c in CATEGORIES}
    for bundle in dataset.bundles:
        for record in bundle.records:
            for label, weight in label_weights(record, rule).items():
                counts[record.category][label] += weight
    row_sums = {c: sum(counts[c].values()) for c in CATEGORIES}
    empty = tuple(c for c in CATEGORIES if row_sums[c] == 0.0)
    total = sum(row_sums.values())
    if normalization is Normalization.PER_DATASET and total > 0:
        values = {c: {l: v / total for l, v in row.items()} for c, row in counts.items()}
    elif normalization is Normalization.PER_CATEGORY:
        values = {
            c: {l: (v / row_sums[c] if row_sums[c] else 0.0) for l, v in row.items()}
            for c, row in counts.items()
        }
    else:
        values = {c: dict(row) for c, row in counts.items()}
    return CooccurrenceMatrix(counts, normalization, values, empty)
