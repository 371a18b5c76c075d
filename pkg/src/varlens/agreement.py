"""Label-agreement classes, entropy, category agreement, and Cohen's kappa.

The kappa variants come in three flavors: plain pairwise kappa over an
explicit list of (x, y) judgments, a conditional kappa that restricts a
two-annotator comparison to the subset of shared items where the *other*
annotation layer matches, and a symmetric pairwise matrix of the latter.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import (
    EmptyInput,
    MultiLabelRecord,
    TooFewAnnotators,
    TooFewInstances,
    TooFewRecords,
    WrongArity,
)
from .model import AnnotationRecord, Dataset, ItemBundle, NliLabel, TaxonomyCategory

#: Default minimum subset size below which chance correction is refused.
DEFAULT_MIN_N = 10


class AgreementClass(enum.Enum):
    """The four label multiplicity patterns of a four-annotator item."""

    FULL = "Full"            # 4-0-0
    PARTIAL = "Partial"      # 3-1-0
    TWO_PAIRS = "TwoPairs"   # 2-2-0
    DIVERGENT = "Divergent"  # 2-1-1

    @property
    def pattern(self) -> tuple[int, ...]:
        return _CLASS_PATTERNS[self]

    @property
    def pattern_label(self) -> str:
        counts = list(self.pattern) + [0] * (3 - len(self.pattern))
        return "-".join(str(c) for c in counts)

    @property
    def pattern_entropy(self) -> float:
        """Shannon entropy (bits) of the defining count pattern."""
        total = sum(self.pattern)
        return -math.fsum((c / total) * math.log2(c / total) for c in self.pattern) + 0.0


_CLASS_PATTERNS: dict[AgreementClass, tuple[int, ...]] = {
    AgreementClass.FULL: (4,),
    AgreementClass.PARTIAL: (3, 1),
    AgreementClass.TWO_PAIRS: (2, 2),
    AgreementClass.DIVERGENT: (2, 1, 1),
}

#: Canonical ordering from most to least label agreement.
CLASS_ORDER: tuple[AgreementClass, ...] = (
    AgreementClass.FULL,
    AgreementClass.PARTIAL,
    AgreementClass.TWO_PAIRS,
    AgreementClass.DIVERGENT,
)

_PATTERN_TO_CLASS = {pattern: cls for cls, pattern in _CLASS_PATTERNS.items()}


class LabelSelectionRule(enum.Enum):
    """How multi-label records collapse to a single label.

    ``first_listed`` takes the first label the annotator gave;
    ``strict_single`` refuses multi-label records outright;
    ``uniform_explode_weighted`` spreads a record's unit mass evenly over
    its labels in distribution-style statistics, and falls back to the
    first label where a single one is structurally required (agreement
    classes, kappa).
    """

    FIRST_LISTED = "first_listed"
    UNIFORM_EXPLODE_WEIGHTED = "uniform_explode_weighted"
    STRICT_SINGLE = "strict_single"


def select_single_label(record: AnnotationRecord, rule: LabelSelectionRule) -> NliLabel:
    """Collapse a record to one label where a single label is required."""
    if not record.labels:
        raise EmptyInput(f"record {record.item_id!r}/{record.annotator_id!r} has no labels")
    if rule is LabelSelectionRule.STRICT_SINGLE and len(record.labels) != 1:
        raise MultiLabelRecord(record.item_id, record.annotator_id)
    return record.labels[0]


def label_weights(record: AnnotationRecord, rule: LabelSelectionRule) -> dict[NliLabel, float]:
    """The record's label mass for distribution-style statistics.

    Total mass is always 1 per record; under the explode rule it is
    spread uniformly over the record's labels.
    """
    if rule is LabelSelectionRule.UNIFORM_EXPLODE_WEIGHTED:
        if not record.labels:
            raise EmptyInput(
                f"record {record.item_id!r}/{record.annotator_id!r} has no labels"
            )
        share = 1.0 / len(record.labels)
        return {label: share for label in record.labels}
    return {select_single_label(record, rule): 1.0}


def classify_agreement(labels: Sequence[NliLabel]) -> AgreementClass:
    """Map exactly four single labels onto their agreement class."""
    if len(labels) != 4:
        raise WrongArity(len(labels))
    counts = tuple(sorted(Counter(labels).values(), reverse=True))
    return _PATTERN_TO_CLASS[counts]


def label_entropy(labels: Sequence[NliLabel]) -> float:
    """Shannon entropy (base 2) of the empirical label distribution."""
    if not labels:
        raise EmptyInput("cannot take the entropy of zero labels")
    n = len(labels)
    # fsum gives the exactly rounded sum, so permutations of the input
    # (which permute Counter order) cannot shift the result by an ulp.
    return -math.fsum((c / n) * math.log2(c / n) for c in Counter(labels).values()) + 0.0


def category_pair_agreement(a: TaxonomyCategory, b: TaxonomyCategory) -> int:
    """1 iff the two explanations share their category, else 0.

    This is the single-category reduction of Jaccard similarity over
    category sets.
    """
    return 1 if a == b else 0


def item_category_agreement(bundle: ItemBundle) -> float:
    """Mean same-category indicator over all unordered explanation pairs."""
    m = len(bundle.records)
    if m < 2:
        raise TooFewRecords(bundle.item_id, m)
    pairs = list(itertools.combinations(bundle.records, 2))
    return sum(category_pair_agreement(x.category, y.category) for x, y in pairs) / len(pairs)


@dataclass(frozen=True)
class KappaResult:
    """Cohen's kappa with its ingredients.

    ``kappa`` is None when chance agreement p_e equals 1 (both marginals
    concentrated on one identical category), where the statistic is
    undefined.
    """

    kappa: float | None
    p_o: float
    p_e: float
    n: int

    @property
    def defined(self) -> bool:
        return self.kappa is not None


def cohen_kappa(
    pairs: Iterable[tuple[Hashable, Hashable]], min_n: int = DEFAULT_MIN_N
) -> KappaResult:
    """Chance-corrected agreement over paired categorical judgments.

    p_o is the fraction of pairs with x == y; p_e sums the products of
    the two marginal distributions; kappa = (p_o - p_e) / (1 - p_e).
    Degenerate inputs (p_e == 1) yield an undefined kappa rather than a
    coerced 0 or 1.
    """
    pairs = list(pairs)
    n = len(pairs)
    if n < min_n:
        raise TooFewInstances(n, min_n)
    matches = sum(1 for x, y in pairs if x == y)
    left = Counter(x for x, _ in pairs)
    right = Counter(y for _, y in pairs)
    p_o = matches / n
    p_e = sum((left[c] / n) * (right[c] / n) for c in set(left) | set(right))
    # p_e == 1 exactly iff both marginals are point masses on the same value;
    # detect that on integer counts instead of comparing floats.
    if len(left) == 1 and len(right) == 1 and set(left) == set(right):
        return KappaResult(None, p_o, 1.0, n)
    return KappaResult((p_o - p_e) / (1.0 - p_e), p_o, p_e, n)


class KappaCondition(enum.Enum):
    """Which annotation layer is compared, and on which matched subset."""

    NONE = "none"                       # labels, all shared items
    T_GIVEN_L = "T_given_L"             # categories, where selected labels match
    L_GIVEN_T = "L_given_T"             # labels, where categories match


def shared_records(
    dataset: Dataset, annotator_pair: tuple[str, str]
) -> list[tuple[AnnotationRecord, AnnotationRecord]]:
    """Record pairs for the items both annotators judged, in item order."""
    a, b = annotator_pair
    out = []
    for bundle in dataset.bundles:
        ra = bundle.record_for(a)
        rb = bundle.record_for(b)
        if ra is not None and rb is not None:
            out.append((ra, rb))
    return out


def conditional_kappa(
    dataset: Dataset,
    annotator_pair: tuple[str, str],
    condition: KappaCondition,
    rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED,
    min_n: int = DEFAULT_MIN_N,
) -> KappaResult:
    """Pairwise kappa restricted by the condition's matched subset.

    ``T_GIVEN_L`` scores taxonomy categories on the shared items where
    the two annotators' selected labels match; ``L_GIVEN_T`` scores
    labels where their categories match; ``NONE`` scores labels on all
    shared items. ``n`` in the result reports the conditioned subset
    size.
    """
    pairs: list[tuple[Hashable, Hashable]] = []
    for ra, rb in shared_records(dataset, annotator_pair):
        la = select_single_label(ra, rule)
        lb = select_single_label(rb, rule)
        if condition is KappaCondition.T_GIVEN_L:
            if la == lb:
                pairs.append((ra.category, rb.category))
        elif condition is KappaCondition.L_GIVEN_T:
            if ra.category == rb.category:
                pairs.append((la, lb))
        else:
            pairs.append((la, lb))
    return cohen_kappa(pairs, min_n=min_n)


class CellStatus(enum.Enum):
    OK = "ok"
    UNDEFINED = "undefined"          # p_e == 1
    TOO_FEW = "too_few_instances"
    NOT_APPLICABLE = "not_applicable"  # diagonal


@dataclass(frozen=True)
class KappaCell:
    status: CellStatus
    result: KappaResult | None = None
    n: int = 0


@dataclass
class KappaMatrix:
    """Symmetric pairwise matrix of conditional kappa results."""

    annotators: tuple[str, ...]
    condition: KappaCondition
    cells: dict[tuple[str, str], KappaCell]

    def cell(self, a: str, b: str) -> KappaCell:
        return self.cells[(a, b)]


def pairwise_kappa_matrix(
    dataset: Dataset,
    annotators: Sequence[str],
    condition: KappaCondition,
    rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED,
    min_n: int = DEFAULT_MIN_N,
) -> KappaMatrix:
    """Conditional kappa for every annotator pair; diagonal not applicable.

    Undersized conditioned subsets are recorded per cell instead of
    aborting the whole matrix.
    """
    if len(annotators) < 2:
        raise TooFewAnnotators(len(annotators), 2)
    annotators = tuple(annotators)
    cells: dict[tuple[str, str], KappaCell] = {}
    for a in annotators:
        cells[(a, a)] = KappaCell(CellStatus.NOT_APPLICABLE)
    for a, b in itertools.combinations(annotators, 2):
        try:
            result = conditional_kappa(dataset, (a, b), condition, rule=rule, min_n=min_n)
        except TooFewInstances as err:
            cell = KappaCell(CellStatus.TOO_FEW, None, err.n)
        else:
            status = CellStatus.OK if result.defined else CellStatus.UNDEFINED
            cell = KappaCell(status, result, result.n)
        cells[(a, b)] = cell
        cells[(b, a)] = cell
    return KappaMatrix(annotators, condition, cells)
