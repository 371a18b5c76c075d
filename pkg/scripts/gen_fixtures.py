#!/usr/bin/env python3
"""Regenerates the data files bundled under src/varlens/data.

Everything here is deterministic: pseudo-randomness comes from SHA-256
of stable strings, never from Python's salted hash() or global RNG
state. Rerunning the script reproduces the committed files byte for
byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from varlens.model import CATEGORIES, TaxonomyCategory
from varlens.similarity import tokenize

DATA = Path(__file__).resolve().parent.parent / "src" / "varlens" / "data"

E, N, C = "entailment", "neutral", "contradiction"

CO = "Coreference"
SY = "Syntactic"
SE = "Semantic"
PR = "Pragmatic"
AB = "AbsenceOfMention"
LC = "LogicConflict"
FK = "FactualKnowledge"
IK = "InferentialKnowledge"


def hash_unit(parts: tuple, salt: str) -> float:
    """Deterministic uniform in [0, 1) from the given identifiers."""
    text = salt + "|" + "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def hash_floats(text: str, k: int, salt: str) -> list[float]:
    """k deterministic floats in [-1, 1) derived from the text."""
    out: list[float] = []
    counter = 0
    while len(out) < k:
        digest = hashlib.sha256(f"{salt}|{text}|{counter}".encode("utf-8")).digest()
        for i in range(0, 32, 4):
            u = int.from_bytes(digest[i : i + 4], "big") / 2**32
            out.append(2.0 * u - 1.0)
        counter += 1
    return out[:k]


def weighted_pick(u: float, weights: list[tuple[str, float]]) -> str:
    acc = 0.0
    for value, w in weights:
        acc += w
        if u < acc:
            return value
    return weights[-1][0]


# ---------------------------------------------------------------------------
# sample20: 20 items, 4 annotators, fixed agreement-class mix.

NOUNS = [
    "garden", "train", "doctor", "market", "violin", "harbor", "bakery",
    "glacier", "library", "engine", "orchard", "bridge", "teacher", "kettle",
    "museum", "river", "tailor", "lantern", "stadium", "compass",
]

CAT_PHRASES = {
    CO: "the pronoun picks out the same {noun} in both sentences",
    SY: "the clause order around the {noun} changes nothing",
    SE: "the verb here means the same thing for the {noun}",
    PR: "reading it plainly, the remark about the {noun} implies this",
    AB: "the premise never mentions the {noun} doing that",
    LC: "both statements about the {noun} cannot hold at once",
    FK: "everyone knows a {noun} works that way",
    IK: "a {noun} would usually lead to that outcome",
}

TAILS = ["", " overall", " in my reading", " as written"]

# item -> (labels by annotator 0..3, categories by annotator 0..3)
SAMPLE_ITEMS: list[tuple[list[str], list[str]]] = [
    ([E, E, E, E], [CO, CO, CO, CO]),          # s-001 Full
    ([E, E, E, E], [SY, SY, SY, SY]),          # s-002 Full
    ([N, N, N, N], [AB, AB, AB, AB]),          # s-003 Full
    ([N, N, N, N], [AB, AB, IK, AB]),          # s-004 Full
    ([C, C, C, C], [LC, LC, LC, LC]),          # s-005 Full
    ([C, C, C, C], [LC, FK, LC, LC]),          # s-006 Full
    ([E, E, E, E], [SE, SE, SE, SE]),          # s-007 Full
    ([N, N, N, N], [PR, AB, PR, IK]),          # s-008 Full
    ([E, E, E, N], [SE, SE, SE, AB]),          # s-009 Partial
    ([N, N, N, E], [AB, AB, IK, FK]),          # s-010 Partial
    ([N, N, C, N], [AB, AB, LC, PR]),          # s-011 Partial
    ([C, C, C, N], [LC, LC, LC, AB]),          # s-012 Partial
    ([E, N, E, E], [FK, IK, FK, SE]),          # s-013 Partial
    ([E, E, N, E], [CO, CO, AB, CO]),          # s-014 Partial
    ([E, E, N, N], [SE, SE, AB, AB]),          # s-015 TwoPairs
    ([N, N, C, C], [AB, PR, LC, LC]),          # s-016 TwoPairs
    ([E, N, E, N], [IK, AB, FK, AB]),          # s-017 TwoPairs
    ([C, C, N, N], [LC, LC, IK, AB]),          # s-018 TwoPairs
    ([E, E, N, C], [SE, CO, AB, LC]),          # s-019 Divergent
    ([N, C, E, N], [AB, LC, IK, AB]),          # s-020 Divergent
]

# Extra listed labels beyond the first, keyed by (item, annotator).
SAMPLE_MULTI: dict[tuple[str, str], list[str]] = {
    ("s-004", "3"): [N, E],
    ("s-017", "1"): [N, C],
}

SAMPLE_EXTERNAL: dict[str, list[float]] = {
    "s-001": [0.9, 0.05, 0.05],
    "s-015": [0.45, 0.45, 0.1],
    "s-019": [0.4, 0.3, 0.3],
}


def sample20_lines() -> list[dict]:
    lines = []
    for index, (labels, cats) in enumerate(SAMPLE_ITEMS):
        item_id = f"s-{index + 1:03d}"
        noun = NOUNS[index]
        premise = f"The {noun} was busy on a gray morning."
        hypothesis = f"Someone noticed the {noun} early in the day."
        for a in range(4):
            annotator = str(a)
            body = CAT_PHRASES[cats[a]].format(noun=noun) + TAILS[a]
            explanation = body[0].upper() + body[1:] + "."
            listed = SAMPLE_MULTI.get((item_id, annotator), [labels[a]])
            obj = {
                "item_id": item_id,
                "dataset_id": "sample",
                "annotator_id": annotator,
                "premise": premise,
                "hypothesis": hypothesis,
                "labels": listed,
                "label_scheme": "enc",
                "explanation": explanation,
                "category": cats[a],
            }
            if item_id in SAMPLE_EXTERNAL:
                obj["external_distribution"] = SAMPLE_EXTERNAL[item_id]
            lines.append(obj)
    return lines


# ---------------------------------------------------------------------------
# sample20 sidecar: rule-based tags plus category-structured embeddings.

_PUNCT = {".", ",", "!", "?", ";", ":"}
_DT = {"the", "a", "an", "both", "every", "this", "that"}
_IN = {"in", "on", "of", "about", "around", "at", "for", "to", "out", "by"}
_RB = {"never", "usually", "plainly", "nothing", "early", "here", "once", "same"}
_MD = {"cannot", "would", "was", "works", "means", "knows", "implies", "picks",
       "mentions", "hold", "lead", "changes", "noticed", "described"}
_PRP = {"it", "this", "that", "someone", "everyone"}


def pos_tag(tokens: list[str]) -> list[str]:
    tags = []
    for token in tokens:
        if token in _PUNCT:
            tags.append(".")
        elif token in _DT:
            tags.append("DT")
        elif token in _IN:
            tags.append("IN")
        elif token in _RB:
            tags.append("RB")
        elif token in _PRP:
            tags.append("PRP")
        elif token in _MD:
            tags.append("VBZ")
        elif token.endswith("ing"):
            tags.append("VBG")
        elif token.endswith("ed"):
            tags.append("VBD")
        elif token.endswith("ly"):
            tags.append("RB")
        else:
            tags.append("NN")
    return tags


DIM = 16


def embed(category: str, text: str) -> list[float]:
    ci = [c.value for c in CATEGORIES].index(category)
    base = [0.0] * DIM
    base[2 * ci] = 1.0
    base[2 * ci + 1] = 0.5
    noise = hash_floats(text, DIM, "emb")
    mixed = [b + 0.25 * n for b, n in zip(base, noise)]
    norm = math.sqrt(sum(x * x for x in mixed))
    # stored unnormalized: scale varies per text, angles stay put
    scale = 1.0 + 0.5 * hash_floats(text, 1, "scale")[0]
    return [round(scale * x / norm, 6) for x in mixed]


def sidecar_lines(canonical: list[dict]) -> list[dict]:
    lines = []
    for obj in canonical:
        tokens = tokenize(obj["explanation"])
        lines.append(
            {
                "key": f"{obj['item_id']}::{obj['annotator_id']}",
                "tokens": tokens,
                "pos_tags": pos_tag(tokens),
                "embedding": embed(obj["category"], obj["explanation"]),
            }
        )
    return lines


# ---------------------------------------------------------------------------
# livenli_overlap: 10 annotators with a known unique best 4-way overlap.

LABEL_WEIGHTS = [(E, 0.5), (N, 0.3), (C, 0.2)]
CATEGORY_WEIGHTS = [
    (AB, 0.28), (IK, 0.18), (SE, 0.14), (FK, 0.12),
    (PR, 0.08), (LC, 0.08), (CO, 0.07), (SY, 0.05),
]
_TO_TEC = {E: "true", N: "either", C: "false"}

LIVENLI_MARKERS = {
    CO: "they point to one referent",
    SY: "the phrasing is just rearranged",
    SE: "the wording means the same",
    PR: "the implied point carries over",
    AB: "the premise does not say so",
    LC: "the claims contradict directly",
    FK: "that is common knowledge",
    IK: "it is a reasonable inference",
}


def livenli_annotator_items() -> dict[str, set[int]]:
    core = set(range(1, 116))
    return {
        "w1": core | {116},
        "w2": set(range(1, 51)),
        "w3": set(range(40, 91)),
        "w4": core | {117},
        "w5": set(range(60, 123)),
        "w6": set(range(1, 31)) | set(range(100, 123)),
        "w7": core | {118},
        "w8": core | {119},
        "w9": set(range(20, 71)),
        "w10": set(range(80, 123)),
    }


def livenli_lines() -> list[dict]:
    assignment = livenli_annotator_items()
    lines = []
    for i in range(1, 123):
        item_id = f"li-{i:03d}"
        premise = f"Premise text number {i} describes an everyday scene."
        hypothesis = f"Hypothesis {i} restates part of that scene."
        for annotator in sorted(assignment, key=lambda a: (len(a), a)):
            if i not in assignment[annotator]:
                continue
            label = weighted_pick(hash_unit((item_id, annotator), "label"), LABEL_WEIGHTS)
            category = weighted_pick(
                hash_unit((item_id, annotator), "category"), CATEGORY_WEIGHTS
            )
            listed = [_TO_TEC[label]]
            if hash_unit((item_id, annotator), "multi") < 0.08:
                second = weighted_pick(
                    hash_unit((item_id, annotator), "second"), LABEL_WEIGHTS
                )
                if second != label:
                    listed.append(_TO_TEC[second])
            if hash_unit((item_id, annotator), "case") < 0.25:
                listed = [raw.capitalize() for raw in listed]
            explanation = (
                f"On item {i} {LIVENLI_MARKERS[category]}, says {annotator}."
            )
            lines.append(
                {
                    "item_id": item_id,
                    "dataset_id": "livenli",
                    "annotator_id": annotator,
                    "premise": premise,
                    "hypothesis": hypothesis,
                    "labels": listed,
                    "label_scheme": "tec",
                    "explanation": explanation,
                    "category": category,
                }
            )
    return lines


# ---------------------------------------------------------------------------
# Simulator scenarios.


def uniform_prefs() -> dict[str, float]:
    return {c.value: 0.125 for c in CATEGORIES}


def planted_scenario() -> dict:
    shared_abs_row = [0.05, 0.9, 0.05]
    rows_base = {
        CO: [0.7, 0.2, 0.1],
        SY: [0.6, 0.3, 0.1],
        SE: [0.5, 0.3, 0.2],
        PR: [0.3, 0.5, 0.2],
        AB: shared_abs_row,
        LC: [0.1, 0.1, 0.8],
        FK: [0.7, 0.2, 0.1],
        IK: [0.3, 0.6, 0.1],
    }
    prefs = {
        "a1": {AB: 0.5, IK: 0.5},
        "a2": {AB: 0.3, SE: 0.3, FK: 0.4},
        "a3": {AB: 0.25, CO: 0.25, LC: 0.25, PR: 0.25},
        "a4": {AB: 0.4, IK: 0.2, SY: 0.2, SE: 0.2},
    }
    return {
        "n_items": 10000,
        "seed": 20250101,
        "profiles": [
            {
                "annotator_id": name,
                "category_prefs": prefs[name],
                "label_given_category": rows_base,
            }
            for name in sorted(prefs)
        ],
    }


def independent_scenario() -> dict:
    return {
        "n_items": 10000,
        "seed": 424242,
        "expect": "independent",
        "profiles": [
            {"annotator_id": f"u{i}", "category_prefs": uniform_prefs()}
            for i in range(1, 5)
        ],
    }


def shared_map_scenario() -> dict:
    onehot = {E: [1.0, 0.0, 0.0], N: [0.0, 1.0, 0.0], C: [0.0, 0.0, 1.0]}
    category_to_label = {
        CO: E, SY: E, SE: N, PR: N, AB: N, LC: C, FK: E, IK: N,
    }
    rows = {cat: onehot[label] for cat, label in category_to_label.items()}
    return {
        "n_items": 10000,
        "seed": 99173,
        "expect": "shared_map",
        "profiles": [
            {
                "annotator_id": f"s{i}",
                "category_prefs": uniform_prefs(),
                "label_given_category": rows,
            }
            for i in range(1, 5)
        ],
    }


# ---------------------------------------------------------------------------


def write_jsonl(path: Path, lines: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for obj in lines:
            handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {path} ({len(lines)} lines)")


def write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")


def verify() -> None:
    from varlens.agreement import classify_agreement, select_single_label, LabelSelectionRule
    from varlens.fixtures import load_livenli_overlap, load_sample20, load_sample20_sidecar
    from varlens.profiles import select_overlapping_annotators

    sample = load_sample20()
    counts = {"Full": 0, "Partial": 0, "TwoPairs": 0, "Divergent": 0}
    for bundle in sample.bundles:
        labels = [
            select_single_label(r, LabelSelectionRule.FIRST_LISTED) for r in bundle.records
        ]
        counts[classify_agreement(labels).value] += 1
    assert counts == {"Full": 8, "Partial": 6, "TwoPairs": 4, "Divergent": 2}, counts

    sidecar = load_sample20_sidecar()
    assert len(sidecar) == sample.n_records == 80
    assert sidecar.dim == DIM

    livenli = load_livenli_overlap()
    selection = select_overlapping_annotators(livenli, 4)
    assert selection.annotators == ("w1", "w4", "w7", "w8"), selection
    assert selection.overlap == 115, selection
    assert selection.exact
    print("verification passed:", counts, "| overlap", selection.overlap)


def main() -> None:
    canonical = sample20_lines()
    write_jsonl(DATA / "sample20.jsonl", canonical)
    write_jsonl(DATA / "sample20.sidecar.jsonl", sidecar_lines(canonical))
    write_jsonl(DATA / "livenli_overlap.jsonl", livenli_lines())
    write_json(DATA / "scenarios" / "planted.json", planted_scenario())
    write_json(DATA / "scenarios" / "independent.json", independent_scenario())
    write_json(DATA / "scenarios" / "shared_map.json", shared_map_scenario())
    verify()


if __name__ == "__main__":
    main()
