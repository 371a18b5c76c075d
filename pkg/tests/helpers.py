"""Shared oracles and dataset builders for the test suite.

Oracles recompute expected values by the most literal route available
(explicit contingency tables, pair enumeration) so library results are
checked against independent logic rather than against themselves.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter

from varlens.model import (
    CATEGORIES,
    LABELS,
    AnnotationRecord,
    Dataset,
    ItemBundle,
    NliLabel,
    TaxonomyCategory,
)

E, N, C = LABELS


def oracle_kappa(pairs):
    """(kappa_or_None, p_o, p_e) from an explicit contingency table."""
    n = len(pairs)
    values = sorted({x for x, _ in pairs} | {y for _, y in pairs}, key=repr)
    index = {v: i for i, v in enumerate(values)}
    k = len(values)
    table = [[0] * k for _ in range(k)]
    for x, y in pairs:
        table[index[x]][index[y]] += 1
    p_o = sum(table[i][i] for i in range(k)) / n
    row = [sum(table[i]) for i in range(k)]
    col = [sum(table[i][j] for i in range(k)) for j in range(k)]
    p_e = sum(row[i] * col[i] for i in range(k)) / (n * n)
    nz_rows = [i for i in range(k) if row[i]]
    nz_cols = [j for j in range(k) if col[j]]
    if len(nz_rows) == 1 and nz_rows == nz_cols:
        return None, p_o, 1.0
    return (p_o - p_e) / (1.0 - p_e), p_o, p_e


def oracle_category_agreement(categories) -> float:
    pairs = list(itertools.combinations(range(len(categories)), 2))
    hits = sum(1 for i, j in pairs if categories[i] == categories[j])
    return hits / len(pairs)


def oracle_entropy(labels) -> float:
    n = len(labels)
    return -sum((c / n) * math.log2(c / n) for c in Counter(labels).values())


def rec(
    item: str,
    ann: str,
    labels,
    category: TaxonomyCategory,
    explanation: str = "stated plainly in the text",
    dataset_id: str = "t",
    raw=(),
) -> AnnotationRecord:
    if isinstance(labels, NliLabel):
        labels = (labels,)
    return AnnotationRecord(
        item_id=item,
        dataset_id=dataset_id,
        annotator_id=ann,
        labels=tuple(labels),
        explanation=explanation,
        category=category,
        raw_labels=tuple(raw),
    )


def bundle(item: str, rows, premise=None, hypothesis=None, ext=None) -> ItemBundle:
    """rows: AnnotationRecords, or (annotator, labels, category) tuples."""
    records = tuple(
        r if isinstance(r, AnnotationRecord) else rec(item, *r) for r in rows
    )
    return ItemBundle(
        item,
        premise if premise is not None else f"premise for {item}",
        hypothesis if hypothesis is not None else f"hypothesis for {item}",
        records,
        ext,
    )


def dataset(bundles, dataset_id: str = "t") -> Dataset:
    return Dataset(dataset_id, tuple(bundles))


def pair_dataset(rows, annotators=("a", "b")) -> Dataset:
    """Two-annotator dataset from rows of (label_a, cat_a, label_b, cat_b)."""
    a, b = annotators
    bundles = []
    for i, (la, ca, lb, cb) in enumerate(rows):
        item = f"i{i:04d}"
        bundles.append(bundle(item, [(a, la, ca), (b, lb, cb)]))
    return dataset(bundles)


_TEC = {E: "true", N: "either", C: "false"}


def present_label(label: NliLabel, mode: str) -> str:
    if mode == "enc":
        return label.value
    if mode == "enc_upper":
        return label.value.upper()
    if mode == "tec":
        return _TEC[label]
    return _TEC[label].capitalize()


_TEXTS = (
    "Plain words about the scene.",
    "Accented café text, with commas!",
    'Quotes "inside" and a tab\there.',
    "Non-latin 多言語 text works too.",
    "It's short.",
)

_PRESENTATIONS = ("enc", "enc_upper", "tec", "tec_cap")


def random_dataset(rng: random.Random, tag: str) -> Dataset:
    """A structurally valid dataset with varied raw-label presentations,
    multi-label records, unicode text, and optional external triples."""
    n_items = rng.randint(1, 12)
    annotators = [f"ann{i}" for i in range(rng.randint(1, 5))]
    bundles = []
    for i in range(n_items):
        item = f"{tag}-{i:03d}"
        rows = []
        for ann in rng.sample(annotators, rng.randint(1, len(annotators))):
            k = 1 if rng.random() < 0.75 else 2
            labels = tuple(rng.sample(list(LABELS), k))
            mode = rng.choice(_PRESENTATIONS)
            raw = tuple(present_label(lab, mode) for lab in labels)
            rows.append(
                rec(
                    item,
                    ann,
                    labels,
                    rng.choice(list(CATEGORIES)),
                    explanation=rng.choice(_TEXTS),
                    raw=raw,
                )
            )
        ext = None
        if rng.random() < 0.3:
            cut_a, cut_b = sorted((rng.random(), rng.random()))
            ext = (cut_a, cut_b - cut_a, 1.0 - cut_b)
        bundles.append(
            ItemBundle(item, f"Premise {i} text.", f"Hypothesis {i} text.", tuple(rows), ext)
        )
    return Dataset("t", tuple(bundles))
