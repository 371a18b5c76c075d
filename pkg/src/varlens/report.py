"""Aggregate report artifacts and their deterministic emission.

Builders produce class statistics with rank-deviation annotations,
per-item label distributions, pairwise kappa matrices, and verbatim case
extracts. ``emit`` serializes any report value to CSV, JSON, or SVG with
fixed number formatting (2 decimals for percents, 4 for kappa and
agreement values) so identical inputs always yield identical bytes.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

from .agreement import (
    CLASS_ORDER,
    AgreementClass,
    CellStatus,
    KappaMatrix,
    LabelSelectionRule,
    classify_agreement,
    item_category_agreement,
    label_weights,
    select_single_label,
)
from .errors import MultiLabelRecord, NoEligibleItems, UnknownItem, UnsupportedFormat
from .ingest import SidecarTable
from .model import CATEGORIES, LABELS, Dataset, ItemBundle, NliLabel, TaxonomyCategory
from .profiles import AnnotatorProfile, CooccurrenceMatrix, OverlapSelection
from .similarity import SimilarityScores, item_similarity


# ---------------------------------------------------------------------------
# Report values


@dataclass(frozen=True)
class ClassStatsRow:
    agreement_class: AgreementClass
    entropy: float
    support_pct: float
    category_agreement: float | None          # None when the class has no items
    similarity: SimilarityScores | None


@dataclass(frozen=True)
class ClassStats:
    rows: tuple[ClassStatsRow, ...]           # always the four classes, canonical order
    n_items: int                              # items contributing to the statistics
    skipped: tuple[tuple[str, str], ...]      # (item_id, reason) for excluded items


@dataclass(frozen=True)
class RankDeviation:
    column: str
    agreement_class: AgreementClass
    expected_rank: float
    observed_rank: float
    delta: float


@dataclass(frozen=True)
class RankDeviations:
    deviations: tuple[RankDeviation, ...]


@dataclass(frozen=True)
class PerItemDistribution:
    rows: tuple[tuple[str, tuple[float, float, float]], ...]


@dataclass(frozen=True)
class CaseRow:
    annotator_id: str
    labels: tuple[NliLabel, ...]
    explanation: str
    category: TaxonomyCategory


@dataclass(frozen=True)
class CaseSection:
    dataset_id: str
    rows: tuple[CaseRow, ...]


@dataclass(frozen=True)
class CaseExtract:
    item_id: str
    premise: str
    hypothesis: str
    sections: tuple[CaseSection, ...]
    external_distribution: tuple[float, float, float] | None


@dataclass(frozen=True)
class AgreementItems:
    """Per-item agreement classes, as emitted by the agree subcommand."""

    rows: tuple[tuple[str, AgreementClass, float], ...]   # (item_id, class, entropy)
    skipped: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SimilarityReport:
    rows: tuple[tuple[str, SimilarityScores], ...]
    metrics: tuple[str, ...] = SimilarityScores.METRICS


@dataclass(frozen=True)
class ProfileReport:
    profiles: tuple[AnnotatorProfile, ...]
    selection: OverlapSelection | None = None


# ---------------------------------------------------------------------------
# Builders


_WORKER_STATE: dict = {}


def _init_item_metrics_worker(sidecar, use_sidecar_tokens):
    _WORKER_STATE["sidecar"] = sidecar
    _WORKER_STATE["use_sidecar_tokens"] = use_sidecar_tokens


def _item_metrics_in_worker(bundle: ItemBundle):
    return (
        item_category_agreement(bundle),
        item_similarity(bundle, _WORKER_STATE["sidecar"], _WORKER_STATE["use_sidecar_tokens"]),
    )


def _item_metrics(
    bundles: Sequence[ItemBundle], sidecar: SidecarTable, use_sidecar_tokens: bool, jobs: int
) -> list[tuple[float, SimilarityScores]]:
    if jobs > 1 and len(bundles) > 1:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_item_metrics_worker,
            initargs=(sidecar, use_sidecar_tokens),
        ) as pool:
            return list(pool.map(_item_metrics_in_worker, bundles, chunksize=16))
    return [
        (item_category_agreement(b), item_similarity(b, sidecar, use_sidecar_tokens))
        for b in bundles
    ]


def class_stats(
    dataset: Dataset,
    sidecar: SidecarTable,
    rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED,
    use_sidecar_tokens: bool = False,
    jobs: int = 1,
) -> ClassStats:
    """Per-agreement-class support, category agreement, and similarity means.

    Only items with exactly four selected single labels contribute; the
    rest are listed in ``skipped``. The entropy column is each class's
    constant pattern entropy. Per-item metric evaluation fans out to a
    process pool when ``jobs`` > 1; results are identical either way.
    """
    eligible: list[tuple[ItemBundle, AgreementClass]] = []
    skipped: list[tuple[str, str]] = []
    for bundle in dataset.bundles:
        if len(bundle.records) != 4:
            skipped.append((bundle.item_id, f"{len(bundle.records)} records, need 4"))
            continue
        try:
            labels = [select_single_label(r, rule) for r in bundle.records]
        except MultiLabelRecord:
            skipped.append((bundle.item_id, "multi-label record under strict_single"))
            continue
        eligible.append((bundle, classify_agreement(labels)))
    if not eligible:
        raise NoEligibleItems("no items with exactly four selected labels")
    metrics = _item_metrics([b for b, _ in eligible], sidecar, use_sidecar_tokens, jobs)
    grouped: dict[AgreementClass, list[tuple[float, SimilarityScores]]] = {
        cls: [] for cls in CLASS_ORDER
    }
    for (bundle, cls), item in zip(eligible, metrics):
        grouped[cls].append(item)
    n = len(eligible)
    rows = []
    for cls in CLASS_ORDER:
        members = grouped[cls]
        support = 100.0 * len(members) / n
        if members:
            category_agreement = sum(m[0] for m in members) / len(members)
            similarity = SimilarityScores(
                *(
                    sum(getattr(m[1], name) for m in members) / len(members)
                    for name in SimilarityScores.METRICS
                )
            )
        else:
            category_agreement = None
            similarity = None
        rows.append(
            ClassStatsRow(cls, cls.pattern_entropy, support, category_agreement, similarity)
        )
    return ClassStats(tuple(rows), n, tuple(skipped))


#: Metric columns that participate in rank-deviation annotation.
RANK_COLUMNS: tuple[str, ...] = ("category_agreement",) + SimilarityScores.METRICS


def _column_value(row: ClassStatsRow, column: str) -> float | None:
    if column == "category_agreement":
        return row.category_agreement
    return None if row.similarity is None else getattr(row.similarity, column)


def _average_ranks_desc(values: Sequence[float]) -> list[float]:
    """1-based ranks by descending value, average rank on exact ties."""
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + 1 + j + 1) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def rank_deviations(rows: Sequence[ClassStatsRow]) -> list[RankDeviation]:
    """Deviations between each metric's class ranking and label agreement.

    The expected order is Full > Partial > TwoPairs > Divergent; per
    column, classes are ranked by value descending with average ranks on
    ties, and only nonzero deltas are emitted. A class whose value is
    exactly tied with another's ranks neither higher nor lower than it,
    so tied classes never deviate; an all-equal column emits nothing.
    Columns with a missing value (an empty class) produce no deviations.
    """
    ordered = sorted(rows, key=lambda r: CLASS_ORDER.index(r.agreement_class))
    if len(ordered) != 4:
        raise ValueError(f"expected 4 class rows, got {len(ordered)}")
    out: list[RankDeviation] = []
    for column in RANK_COLUMNS:
        values = [_column_value(row, column) for row in ordered]
        if any(v is None for v in values):
            continue
        observed = _average_ranks_desc(values)
        tie_sizes = Counter(values)
        for index, cls in enumerate(CLASS_ORDER):
            if tie_sizes[values[index]] > 1:
                continue
            delta = observed[index] - (index + 1)
            if delta != 0:
                out.append(RankDeviation(column, cls, float(index + 1), observed[index], delta))
    return out


def per_item_label_distribution(
    dataset: Dataset, rule: LabelSelectionRule = LabelSelectionRule.FIRST_LISTED
) -> list[tuple[str, tuple[float, float, float]]]:
    """Normalized (E, N, C) distribution per item.

    Items are ordered by entailment proportion descending, ties broken
    by item id. Bundles without records are skipped.
    """
    out = []
    for bundle in dataset.bundles:
        if not bundle.records:
            continue
        mass = {label: 0.0 for label in LABELS}
        for record in bundle.records:
            for label, weight in label_weights(record, rule).items():
                mass[label] += weight
        total = sum(mass.values())
        out.append((bundle.item_id, tuple(mass[label] / total for label in LABELS)))
    out.sort(key=lambda row: (-row[1][0], row[0]))
    return out


def extract_case(item_id: str, datasets: Sequence[Dataset]) -> CaseExtract:
    """Verbatim assembly of every record of one item across datasets."""
    sections = []
    premise = hypothesis = None
    external = None
    for dataset in datasets:
        bundle = dataset.by_item.get(item_id)
        if bundle is None:
            continue
        if premise is None:
            premise, hypothesis = bundle.premise, bundle.hypothesis
        if external is None:
            external = bundle.external_distribution
        sections.append(
            CaseSection(
                dataset.dataset_id,
                tuple(
                    CaseRow(r.annotator_id, r.labels, r.explanation, r.category)
                    for r in bundle.records
                ),
            )
        )
    if not sections:
        raise UnknownItem(item_id)
    return CaseExtract(item_id, premise, hypothesis, tuple(sections), external)


# ---------------------------------------------------------------------------
# Emission


def _fmt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def _fmt_agree(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _round_opt(value: float | None, digits: int):
    return None if value is None else round(value, digits)


def _csv_bytes(header: Sequence[str], rows: Sequence[Sequence[str]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


CLASS_STATS_HEADER = ("agreement_class", "entropy", "support_pct", "category_agreement") + (
    SimilarityScores.METRICS
)


def _class_stats_csv(stats: ClassStats) -> bytes:
    rows = []
    for row in stats.rows:
        sim = row.similarity
        rows.append(
            [
                row.agreement_class.value,
                f"{row.entropy:.2f}",
                _fmt_pct(row.support_pct),
                _fmt_agree(row.category_agreement),
            ]
            + [_fmt_pct(getattr(sim, name)) if sim else "" for name in SimilarityScores.METRICS]
        )
    return _csv_bytes(CLASS_STATS_HEADER, rows)


def _class_stats_json(stats: ClassStats) -> bytes:
    payload = {
        "kind": "class_stats",
        "n_items": stats.n_items,
        "rows": [
            {
                "agreement_class": row.agreement_class.value,
                "pattern": row.agreement_class.pattern_label,
                "entropy": round(row.entropy, 2),
                "support_pct": _round_opt(row.support_pct, 2),
                "category_agreement": _round_opt(row.category_agreement, 4),
                "similarity": (
                    {k: round(v, 2) for k, v in row.similarity.as_dict().items()}
                    if row.similarity
                    else None
                ),
            }
            for row in stats.rows
        ],
        "skipped": [{"item_id": i, "reason": r} for i, r in stats.skipped],
    }
    return _json_bytes(payload)


# Rank-deviation shading: blue when a class ranks higher than label
# agreement predicts, red when lower; darker from |delta| >= 2.
_SHADE = {
    ("high", False): "#cfe4f5",
    ("high", True): "#7fb7e0",
    ("low", False): "#f6d5d5",
    ("low", True): "#e39191",
}


def _deviation_shades(rows: Sequence[ClassStatsRow]) -> dict[tuple[str, AgreementClass], str]:
    shades = {}
    for dev in rank_deviations(rows):
        direction = "high" if dev.delta < 0 else "low"
        shades[(dev.column, dev.agreement_class)] = _SHADE[(direction, abs(dev.delta) >= 2)]
    return shades


def _class_stats_svg(stats: ClassStats) -> bytes:
    cell_w, label_w, cell_h = 86, 120, 26
    columns = ("entropy", "support_pct") + RANK_COLUMNS
    width = label_w + cell_w * len(columns)
    height = cell_h * (len(stats.rows) + 1)
    shades = _deviation_shades(stats.rows)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">'
    ]
    parts.append(f'<rect x="0" y="0" width="{width}" height="{cell_h}" fill="#e8e8e8"/>')
    parts.append(f'<text x="4" y="17">class</text>')
    for ci, name in enumerate(columns):
        x = label_w + ci * cell_w
        parts.append(f'<text x="{x + 4}" y="17">{escape(name[:11])}</text>')
    for ri, row in enumerate(stats.rows):
        y = cell_h * (ri + 1)
        parts.append(f'<text x="4" y="{y + 17}">{escape(row.agreement_class.value)}</text>')
        for ci, name in enumerate(columns):
            x = label_w + ci * cell_w
            if name == "entropy":
                text, value = f"{row.entropy:.2f}", f"{row.entropy:.2f}"
            elif name == "support_pct":
                text, value = _fmt_pct(row.support_pct), _fmt_pct(row.support_pct)
            elif name == "category_agreement":
                text = value = _fmt_agree(row.category_agreement)
            else:
                v = None if row.similarity is None else getattr(row.similarity, name)
                text = value = _fmt_pct(v)
            fill = shades.get((name, row.agreement_class), "#ffffff")
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" fill="{fill}" '
                f'stroke="#cccccc" data-column="{escape(name)}" data-value="{value}"/>'
            )
            parts.append(f'<text x="{x + 4}" y="{y + 17}">{text}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts).encode("utf-8")


def _rank_deviations_csv(report: RankDeviations) -> bytes:
    rows = [
        [d.column, d.agreement_class.value, f"{d.expected_rank:g}", f"{d.observed_rank:g}", f"{d.delta:g}"]
        for d in report.deviations
    ]
    return _csv_bytes(("column", "agreement_class", "expected_rank", "observed_rank", "delta"), rows)


def _rank_deviations_json(report: RankDeviations) -> bytes:
    payload = {
        "kind": "rank_deviations",
        "deviations": [
            {
                "column": d.column,
                "agreement_class": d.agreement_class.value,
                "expected_rank": d.expected_rank,
                "observed_rank": d.observed_rank,
                "delta": d.delta,
            }
            for d in report.deviations
        ],
    }
    return _json_bytes(payload)


def _per_item_csv(report: PerItemDistribution) -> bytes:
    rows = [
        [item_id, _fmt_agree(e), _fmt_agree(n), _fmt_agree(c)]
        for item_id, (e, n, c) in report.rows
    ]
    return _csv_bytes(("item_id", "entailment", "neutral", "contradiction"), rows)


def _per_item_json(report: PerItemDistribution) -> bytes:
    payload = {
        "kind": "per_item_label_distribution",
        "items": [
            {
                "item_id": item_id,
                "entailment": round(e, 4),
                "neutral": round(n, 4),
                "contradiction": round(c, 4),
            }
            for item_id, (e, n, c) in report.rows
        ],
    }
    return _json_bytes(payload)


_LABEL_COLORS = {"entailment": "#4daf4a", "neutral": "#b3b3b3", "contradiction": "#e41a1c"}


def _per_item_svg(report: PerItemDistribution) -> bytes:
    n = len(report.rows)
    bar_w = max(3, min(24, 900 // max(n, 1)))
    chart_h, pad = 200, 20
    width = pad * 2 + bar_w * n
    height = chart_h + pad * 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="10">'
    ]
    for i, (item_id, (e, nn, c)) in enumerate(report.rows):
        x = pad + i * bar_w
        y = pad
        for label, share in zip(("entailment", "neutral", "contradiction"), (e, nn, c)):
            seg_h = share * chart_h
            parts.append(
                f'<rect x="{x}" y="{y:.2f}" width="{bar_w}" height="{seg_h:.2f}" '
                f'fill="{_LABEL_COLORS[label]}" data-item="{escape(item_id)}" '
                f'data-label="{label}" data-value="{share:.4f}"/>'
            )
            y += seg_h
    parts.append("</svg>\n")
    return "\n".join(parts).encode("utf-8")


def _kappa_color(kappa: float) -> str:
    if kappa >= 0:
        t, base = min(kappa, 1.0), (33, 102, 172)
    else:
        t, base = min(-kappa, 1.0), (178, 24, 43)
    r, g, b = (round(255 + (ch - 255) * t) for ch in base)
    return f"#{r:02x}{g:02x}{b:02x}"


def _kappa_cell_text(cell) -> str:
    if cell.status is CellStatus.OK:
        return _fmt_agree(cell.result.kappa)
    if cell.status is CellStatus.UNDEFINED:
        return "undef"
    if cell.status is CellStatus.TOO_FEW:
        return f"n={cell.n}"
    return ""


def _kappa_matrix_csv(matrix: KappaMatrix) -> bytes:
    rows = []
    for a, b in itertools.combinations(matrix.annotators, 2):
        cell = matrix.cell(a, b)
        result = cell.result
        rows.append(
            [
                a,
                b,
                cell.status.value,
                _fmt_agree(result.kappa) if result else "",
                _fmt_agree(result.p_o) if result else "",
                _fmt_agree(result.p_e) if result else "",
                str(cell.n),
            ]
        )
    return _csv_bytes(
        ("annotator_a", "annotator_b", "status", "kappa", "p_o", "p_e", "n"), rows
    )


def _kappa_matrix_json(matrix: KappaMatrix) -> bytes:
    cells = {}
    for (a, b), cell in matrix.cells.items():
        result = cell.result
        cells.setdefault(a, {})[b] = {
            "status": cell.status.value,
            "kappa": _round_opt(result.kappa, 4) if result else None,
            "p_o": _round_opt(result.p_o, 4) if result else None,
            "p_e": _round_opt(result.p_e, 4) if result else None,
            "n": cell.n,
        }
    payload = {
        "kind": "kappa_matrix",
        "condition": matrix.condition.value,
        "annotators": list(matrix.annotators),
        "cells": cells,
    }
    return _json_bytes(payload)


def _kappa_matrix_svg(matrix: KappaMatrix) -> bytes:
    cell = 64
    pad = 70
    n = len(matrix.annotators)
    size = pad + n * cell + 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'font-family="monospace" font-size="11">'
    ]
    for i, name in enumerate(matrix.annotators):
        parts.append(f'<text x="{pad + i * cell + 6}" y="{pad - 8}">{escape(name[:8])}</text>')
        parts.append(f'<text x="6" y="{pad + i * cell + 36}">{escape(name[:8])}</text>')
    for i, a in enumerate(matrix.annotators):
        for j, b in enumerate(matrix.annotators):
            x, y = pad + j * cell, pad + i * cell
            c = matrix.cell(a, b)
            if c.status is CellStatus.OK:
                fill = _kappa_color(c.result.kappa)
                data = _fmt_agree(c.result.kappa)
            elif c.status is CellStatus.NOT_APPLICABLE:
                fill, data = "#f0f0f0", ""
            else:
                fill, data = "#ffffff", c.status.value
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" '
                f'stroke="#999999" data-row="{escape(a)}" data-col="{escape(b)}" '
                f'data-kappa="{data}"/>'
            )
            text = _kappa_cell_text(c)
            if text:
                parts.append(f'<text x="{x + 6}" y="{y + 36}">{text}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts).encode("utf-8")


def _case_csv(case: CaseExtract) -> bytes:
    rows = []
    for section in case.sections:
        for row in section.rows:
            rows.append(
                [
                    case.item_id,
                    case.premise,
                    case.hypothesis,
                    section.dataset_id,
                    row.annotator_id,
                    "|".join(label.value for label in row.labels),
                    row.category.value,
                    row.explanation,
                ]
            )
    return _csv_bytes(
        (
            "item_id",
            "premise",
            "hypothesis",
            "dataset_id",
            "annotator_id",
            "labels",
            "category",
            "explanation",
        ),
        rows,
    )


def _case_json(case: CaseExtract) -> bytes:
    payload = {
        "kind": "case_extract",
        "item_id": case.item_id,
        "premise": case.premise,
        "hypothesis": case.hypothesis,
        "external_distribution": (
            list(case.external_distribution) if case.external_distribution else None
        ),
        "sections": [
            {
                "dataset_id": section.dataset_id,
                "records": [
                    {
                        "annotator_id": row.annotator_id,
                        "labels": [label.value for label in row.labels],
                        "category": row.category.value,
                        "explanation": row.explanation,
                    }
                    for row in section.rows
                ],
            }
            for section in case.sections
        ],
    }
    return _json_bytes(payload)


def _agreement_items_csv(report: AgreementItems) -> bytes:
    rows = [
        [item_id, cls.value, f"{entropy:.2f}"] for item_id, cls, entropy in report.rows
    ]
    return _csv_bytes(("item_id", "agreement_class", "entropy"), rows)


def _agreement_items_json(report: AgreementItems) -> bytes:
    payload = {
        "kind": "agreement_items",
        "items": [
            {"item_id": item_id, "agreement_class": cls.value, "entropy": round(entropy, 2)}
            for item_id, cls, entropy in report.rows
        ],
        "skipped": [{"item_id": i, "reason": r} for i, r in report.skipped],
    }
    return _json_bytes(payload)


def _similarity_csv(report: SimilarityReport) -> bytes:
    rows = [
        [item_id] + [_fmt_pct(getattr(scores, name)) for name in report.metrics]
        for item_id, scores in report.rows
    ]
    return _csv_bytes(("item_id",) + report.metrics, rows)


def _similarity_json(report: SimilarityReport) -> bytes:
    payload = {
        "kind": "item_similarity",
        "metrics": list(report.metrics),
        "items": [
            {"item_id": item_id}
            | {name: round(getattr(scores, name), 2) for name in report.metrics}
            for item_id, scores in report.rows
        ],
    }
    return _json_bytes(payload)


def _profiles_csv(report: ProfileReport) -> bytes:
    header = (
        ("annotator_id", "n_examples")
        + tuple(label.value for label in LABELS)
        + tuple(c.value for c in CATEGORIES)
    )
    rows = [
        [p.annotator_id, str(p.n_examples)]
        + [_fmt_pct(v) for v in p.label_dist]
        + [_fmt_pct(v) for v in p.category_dist]
        for p in report.profiles
    ]
    return _csv_bytes(header, rows)


def _profiles_json(report: ProfileReport) -> bytes:
    payload = {
        "kind": "annotator_profiles",
        "profiles": [
            {
                "annotator_id": p.annotator_id,
                "n_examples": p.n_examples,
                "label_dist": {
                    label.value: round(v, 2) for label, v in zip(LABELS, p.label_dist)
                },
                "category_dist": {
                    c.value: round(v, 2) for c, v in zip(CATEGORIES, p.category_dist)
                },
            }
            for p in report.profiles
        ],
    }
    if report.selection is not None:
        payload["selection"] = {
            "annotators": list(report.selection.annotators),
            "overlap": report.selection.overlap,
            "exact": report.selection.exact,
        }
    return _json_bytes(payload)


def _cooccurrence_csv(matrix: CooccurrenceMatrix) -> bytes:
    normalized = matrix.normalization.value != "none"
    fmt = _fmt_agree if normalized else (lambda v: f"{v:g}")
    rows = [
        [category.value] + [fmt(matrix.values[category][label]) for label in LABELS]
        for category in CATEGORIES
    ]
    return _csv_bytes(("category",) + tuple(label.value for label in LABELS), rows)


def _cooccurrence_json(matrix: CooccurrenceMatrix) -> bytes:
    payload = {
        "kind": "cooccurrence",
        "normalization": matrix.normalization.value,
        "counts": {
            c.value: {label.value: round(v, 4) for label, v in row.items()}
            for c, row in matrix.counts.items()
        },
        "values": {
            c.value: {label.value: round(v, 4) for label, v in row.items()}
            for c, row in matrix.values.items()
        },
        "empty_categories": [c.value for c in matrix.empty_categories],
    }
    return _json_bytes(payload)


def _cooccurrence_svg(matrix: CooccurrenceMatrix) -> bytes:
    cell_w, cell_h, pad_x, pad_y = 90, 28, 150, 30
    width = pad_x + cell_w * len(LABELS) + 10
    height = pad_y + cell_h * len(CATEGORIES) + 10
    peak = max((v for row in matrix.values.values() for v in row.values()), default=0.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="10">'
    ]
    for j, label in enumerate(LABELS):
        parts.append(f'<text x="{pad_x + j * cell_w + 4}" y="{pad_y - 8}">{label.value[:12]}</text>')
    for i, category in enumerate(CATEGORIES):
        y = pad_y + i * cell_h
        parts.append(f'<text x="4" y="{y + 18}">{category.value[:20]}</text>')
        for j, label in enumerate(LABELS):
            x = pad_x + j * cell_w
            value = matrix.values[category][label]
            t = 0.0 if peak == 0 else value / peak
            r, g, b = (round(255 + (ch - 255) * t) for ch in (84, 39, 143))
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="#{r:02x}{g:02x}{b:02x}" stroke="#aaaaaa" '
                f'data-category="{category.value}" data-label="{label.value}" '
                f'data-value="{value:.4f}"/>'
            )
            parts.append(f'<text x="{x + 4}" y="{y + 18}">{value:.4f}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts).encode("utf-8")


_EMITTERS = {
    (ClassStats, "csv"): _class_stats_csv,
    (ClassStats, "json"): _class_stats_json,
    (ClassStats, "svg"): _class_stats_svg,
    (RankDeviations, "csv"): _rank_deviations_csv,
    (RankDeviations, "json"): _rank_deviations_json,
    (PerItemDistribution, "csv"): _per_item_csv,
    (PerItemDistribution, "json"): _per_item_json,
    (PerItemDistribution, "svg"): _per_item_svg,
    (KappaMatrix, "csv"): _kappa_matrix_csv,
    (KappaMatrix, "json"): _kappa_matrix_json,
    (KappaMatrix, "svg"): _kappa_matrix_svg,
    (CaseExtract, "csv"): _case_csv,
    (CaseExtract, "json"): _case_json,
    (AgreementItems, "csv"): _agreement_items_csv,
    (AgreementItems, "json"): _agreement_items_json,
    (SimilarityReport, "csv"): _similarity_csv,
    (SimilarityReport, "json"): _similarity_json,
    (ProfileReport, "csv"): _profiles_csv,
    (ProfileReport, "json"): _profiles_json,
    (CooccurrenceMatrix, "csv"): _cooccurrence_csv,
    (CooccurrenceMatrix, "json"): _cooccurrence_json,
    (CooccurrenceMatrix, "svg"): _cooccurrence_svg,
}


def emit(report, fmt: str) -> bytes:
    """Serialize a report value to deterministic bytes.

    Raises UnsupportedFormat for unknown formats and for report kinds
    that have no sensible rendering in the requested format.
    """
    fmt = fmt.lower()
    if fmt not in ("csv", "json", "svg"):
        raise UnsupportedFormat(fmt)
    emitter = _EMITTERS.get((type(report), fmt))
    if emitter is None:
        raise UnsupportedFormat(f"{fmt} for {type(report).__name__}")
    return emitter(report)
