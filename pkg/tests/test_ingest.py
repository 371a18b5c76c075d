"""Canonical parsing, source adapters, sidecar loading, round-trips."""

from __future__ import annotations

import io
import json
import random

import pytest

from helpers import C, E, N, bundle, dataset, random_dataset, rec
from varlens.errors import (
    ConflictingItemText,
    DimMismatch,
    DuplicateKey,
    MissingSidecar,
    ParseError,
    UnknownField,
    UnknownLabel,
)
from varlens.ingest import (
    CANONICAL_REQUIRED,
    LIVENLI_FIELD_MAP,
    adapt_livenli,
    adapt_varierr,
    load_sidecar,
    parse_canonical,
    write_canonical,
)
from varlens.model import NliLabel, TaxonomyCategory

ABS = TaxonomyCategory.ABSENCE_OF_MENTION


def canonical_line(**over) -> str:
    obj = {
        "item_id": "i1",
        "dataset_id": "d",
        "annotator_id": "a1",
        "premise": "A premise.",
        "hypothesis": "A hypothesis.",
        "labels": ["entailment"],
        "label_scheme": "enc",
        "explanation": "It is stated outright.",
        "category": "AbsenceOfMention",
    }
    obj.update(over)
    return json.dumps(obj, ensure_ascii=False)


class TestParseCanonical:
    def test_groups_two_items_by_four_annotators(self):
        lines = [
            canonical_line(item_id=item, annotator_id=f"a{k}")
            for item in ("x", "y")
            for k in range(4)
        ]
        ds = parse_canonical(lines)
        assert len(ds.bundles) == 2
        assert [b.item_id for b in ds.bundles] == ["x", "y"]
        for b in ds.bundles:
            assert len(b.records) == 4
            assert [r.annotator_id for r in b.records] == ["a0", "a1", "a2", "a3"]
        assert ds.dataset_id == "d"
        assert ds.n_records == 8

    def test_blank_lines_skipped(self):
        ds = parse_canonical(["", canonical_line(), "   ", "\n"])
        assert ds.n_records == 1

    @pytest.mark.parametrize("missing", list(CANONICAL_REQUIRED))
    def test_missing_required_field(self, missing):
        obj = json.loads(canonical_line())
        del obj[missing]
        with pytest.raises(ParseError) as exc:
            parse_canonical([json.dumps(obj)])
        assert exc.value.line_no == 1
        assert missing in str(exc.value)

    @pytest.mark.parametrize(
        "line,fragment",
        [
            ("{not json", "invalid JSON"),
            ("[1, 2, 3]", "JSON object"),
            (canonical_line(label_scheme="abc"), "label_scheme"),
            (canonical_line(labels="entailment"), "list of strings"),
            (canonical_line(labels=[1]), "list of strings"),
            (canonical_line(category=["AbsenceOfMention", "Semantic"]), "multi-category"),
            (canonical_line(category="NotACategory"), "NotACategory"),
            (canonical_line(item_id=7), "item_id"),
            (canonical_line(external_distribution=[0.5, 0.5]), "external_distribution"),
            (canonical_line(external_distribution=[0.5, "x", 0.2]), "external_distribution"),
            (canonical_line(external_distribution=[0.5, True, 0.25]), "external_distribution"),
        ],
    )
    def test_malformed_lines(self, line, fragment):
        with pytest.raises(ParseError) as exc:
            parse_canonical([line])
        assert fragment in str(exc.value)

    def test_line_number_reported(self):
        with pytest.raises(ParseError) as exc:
            parse_canonical([canonical_line(), "{bad"])
        assert exc.value.line_no == 2

    def test_unknown_label_becomes_parse_error(self):
        with pytest.raises(ParseError) as exc:
            parse_canonical([canonical_line(labels=["true"], label_scheme="enc")])
        assert "true" in str(exc.value)

    def test_tec_mapping_case_and_whitespace(self):
        ds = parse_canonical(
            [canonical_line(labels=[" True ", "either"], label_scheme="tec")]
        )
        record = ds.bundles[0].records[0]
        assert record.labels == (NliLabel.ENTAILMENT, NliLabel.NEUTRAL)
        assert record.raw_labels == (" True ", "either")

    def test_conflicting_premise(self):
        lines = [
            canonical_line(annotator_id="a1"),
            canonical_line(annotator_id="a2", premise="A different premise."),
        ]
        with pytest.raises(ConflictingItemText):
            parse_canonical(lines)

    def test_conflicting_hypothesis(self):
        lines = [
            canonical_line(annotator_id="a1"),
            canonical_line(annotator_id="a2", hypothesis="Another hypothesis."),
        ]
        with pytest.raises(ConflictingItemText):
            parse_canonical(lines)

    def test_external_distribution_parsed_and_shared(self):
        lines = [
            canonical_line(annotator_id="a1", external_distribution=[0.5, 0.25, 0.25]),
            canonical_line(annotator_id="a2"),
        ]
        ds = parse_canonical(lines)
        assert ds.bundles[0].external_distribution == (0.5, 0.25, 0.25)

    def test_conflicting_external_distribution(self):
        lines = [
            canonical_line(annotator_id="a1", external_distribution=[0.5, 0.25, 0.25]),
            canonical_line(annotator_id="a2", external_distribution=[0.4, 0.3, 0.3]),
        ]
        with pytest.raises(ParseError) as exc:
            parse_canonical(lines)
        assert "external_distribution" in str(exc.value)

    def test_dataset_id_inference(self):
        lines = [
            canonical_line(item_id="x", dataset_id="zeta"),
            canonical_line(item_id="y", dataset_id="alpha"),
        ]
        assert parse_canonical(lines).dataset_id == "alpha"


def livenli_line(**over) -> str:
    obj = {
        "id": "ln1",
        "annotator": "w1",
        "premise": "A premise.",
        "hypothesis": "A hypothesis.",
        "labels": ["true"],
        "explanation": "Not mentioned anywhere.",
        "category": "AbsenceOfMention",
    }
    obj.update(over)
    return json.dumps(obj, ensure_ascii=False)


class TestAdapters:
    def test_livenli_label_mapping(self):
        result = adapt_livenli([livenli_line(labels=["true", "either"])])
        record = result.dataset.bundles[0].records[0]
        assert record.labels == (NliLabel.ENTAILMENT, NliLabel.NEUTRAL)
        assert record.raw_labels == ("true", "either")
        assert result.dataset.dataset_id == "livenli"

    def test_livenli_string_label(self):
        result = adapt_livenli([livenli_line(labels="false")])
        assert result.dataset.bundles[0].records[0].labels == (NliLabel.CONTRADICTION,)

    def test_livenli_unknown_label(self):
        with pytest.raises(UnknownLabel):
            adapt_livenli([livenli_line(labels=["yes"])])

    def test_varierr_identity_mapping_and_int_ids(self):
        lines = [
            livenli_line(id="v1", annotator=k, labels=["neutral"]) for k in range(4)
        ]
        result = adapt_varierr(lines)
        ds = result.dataset
        assert ds.dataset_id == "varierr"
        assert len(ds.bundles) == 1
        b = ds.bundles[0]
        assert [r.annotator_id for r in b.records] == ["0", "1", "2", "3"]
        assert all(r.labels == (NliLabel.NEUTRAL,) for r in b.records)

    def test_highlights_dropped_with_warning(self):
        lines = [
            livenli_line(annotator="w1", highlight_premise=[0, 3]),
            livenli_line(annotator="w2"),
        ]
        result = adapt_livenli(lines)
        assert result.warnings["highlights_dropped"] == 1
        assert result.dataset.n_records == 2

    def test_validity_ignored_with_warning(self):
        lines = [livenli_line(labels=["entailment"], validity={"0": "valid"})]
        result = adapt_varierr(lines)
        assert result.warnings["validity_ignored"] == 1

    def test_single_element_category_list_unwrapped(self):
        result = adapt_livenli([livenli_line(category=["Semantic"])])
        record = result.dataset.bundles[0].records[0]
        assert record.category is TaxonomyCategory.SEMANTIC

    def test_multi_category_rejected_and_counted(self):
        lines = [
            livenli_line(annotator="w1"),
            livenli_line(annotator="w2", category=["Semantic", "Pragmatic"]),
            livenli_line(annotator="w3"),
        ]
        result = adapt_livenli(lines)
        assert result.n_input_records == 3
        assert result.n_rejected == 1
        assert result.warnings["multi_category_rejected"] == 1
        # Adapters never invent records.
        assert result.dataset.n_records == result.n_input_records - result.n_rejected

    def test_field_map_override(self):
        line = json.dumps(
            {
                "example": "e9",
                "worker": "w5",
                "text_a": "P text.",
                "text_b": "H text.",
                "labels": ["either"],
                "explanation": "Could go both ways.",
                "category": "Pragmatic",
            }
        )
        field_map = dict(
            LIVENLI_FIELD_MAP,
            item_id="example",
            annotator_id="worker",
            premise="text_a",
            hypothesis="text_b",
        )
        result = adapt_livenli([line], field_map=field_map)
        b = result.dataset.bundles[0]
        assert b.item_id == "e9"
        assert b.premise == "P text."
        assert b.records[0].annotator_id == "w5"

    def test_missing_mapped_field(self):
        obj = json.loads(livenli_line())
        del obj["premise"]
        del obj["category"]
        with pytest.raises(ParseError) as exc:
            adapt_livenli([json.dumps(obj)])
        assert "category, premise" in str(exc.value)

    def test_partial_field_map_keeps_defaults(self):
        obj = json.loads(livenli_line(id="e1", annotator="w1"))
        obj["example"] = obj.pop("id")
        result = adapt_livenli([json.dumps(obj)], field_map={"item_id": "example"})
        record = result.dataset.bundles[0].records[0]
        assert record.item_id == "e1"
        assert record.annotator_id == "w1"

    def test_field_map_unknown_canonical_field(self):
        with pytest.raises(UnknownField) as exc:
            adapt_livenli([livenli_line()], field_map={"premis": "text_a"})
        assert exc.value.names == ("premis",)


def sidecar_line(key="i1::a1", tokens=("a", "b"), tags=("DT", "NN"), emb=(0.1, 0.2, 0.3)):
    return json.dumps(
        {"key": key, "tokens": list(tokens), "pos_tags": list(tags), "embedding": list(emb)}
    )


class TestSidecar:
    def test_load_and_lookup(self):
        lines = [sidecar_line(key=f"i{k}::a") for k in range(3)]
        table = load_sidecar(lines)
        assert len(table) == 3
        assert table.dim == 3
        assert "i1::a" in table
        entry = table.lookup("i0::a")
        assert entry.tokens == ("a", "b")
        assert entry.pos_tags == ("DT", "NN")
        assert entry.embedding == (0.1, 0.2, 0.3)
        assert table.get("nope") is None
        with pytest.raises(MissingSidecar) as exc:
            table.lookup("nope")
        assert "nope" in str(exc.value)

    def test_empty_stream(self):
        table = load_sidecar([])
        assert len(table) == 0
        assert table.dim == 0

    def test_dim_mismatch(self):
        lines = [sidecar_line(), sidecar_line(key="i2::a", emb=(0.1, 0.2))]
        with pytest.raises(DimMismatch):
            load_sidecar(lines)

    def test_token_tag_parity(self):
        with pytest.raises(ParseError) as exc:
            load_sidecar([sidecar_line(tokens=("a", "b", "c"))])
        assert "3 tokens but 2 pos_tags" in str(exc.value)

    def test_duplicate_key(self):
        with pytest.raises(DuplicateKey):
            load_sidecar([sidecar_line(), sidecar_line()])

    @pytest.mark.parametrize(
        "line",
        [
            json.dumps({"key": "k", "tokens": [], "pos_tags": []}),
            sidecar_line(emb=()),
            sidecar_line(emb=(0.1, True, 0.3)),
            json.dumps({"key": 5, "tokens": [], "pos_tags": [], "embedding": [0.1]}),
            json.dumps({"key": "k", "tokens": "ab", "pos_tags": ["DT"], "embedding": [0.1]}),
        ],
    )
    def test_malformed_sidecar_lines(self, line):
        with pytest.raises(ParseError):
            load_sidecar([line])


class TestWriteCanonical:
    def test_line_count_and_order(self):
        ds = dataset(
            [
                bundle("b-item", [("z", E, ABS), ("a", N, ABS)]),
                bundle("a-item", [("m", C, ABS)]),
            ]
        )
        out = io.StringIO()
        assert write_canonical(ds, out) == 3
        rows = [json.loads(line) for line in out.getvalue().splitlines()]
        assert [(r["item_id"], r["annotator_id"]) for r in rows] == [
            ("a-item", "m"),
            ("b-item", "a"),
            ("b-item", "z"),
        ]

    def test_empty_dataset(self):
        out = io.StringIO()
        assert write_canonical(dataset([]), out) == 0
        assert out.getvalue() == ""

    @pytest.mark.parametrize(
        "raw,scheme",
        [
            (("true",), "tec"),
            ((" Either ", "FALSE"), "tec"),
            (("entailment",), "enc"),
            (("true", "neutral"), "enc"),
        ],
    )
    def test_scheme_inference(self, raw, scheme):
        labels = tuple(NliLabel.ENTAILMENT for _ in raw)
        ds = dataset([bundle("i", [rec("i", "a", labels, ABS, raw=raw)])])
        out = io.StringIO()
        write_canonical(ds, out)
        row = json.loads(out.getvalue())
        assert row["label_scheme"] == scheme
        assert row["labels"] == list(raw)

    def test_round_trip_hand_built(self):
        ds = dataset(
            [
                bundle(
                    "i1",
                    [
                        rec("i1", "a", [E, N], ABS, raw=("True", "either")),
                        rec("i1", "b", [C], TaxonomyCategory.SEMANTIC,
                            explanation="Sens contraire, voilà."),
                    ],
                    premise="Unicode première.",
                    hypothesis='With "quotes" and\ttabs.',
                    ext=(0.2, 0.3, 0.5),
                ),
                bundle("i0", [rec("i0", "a", [N], TaxonomyCategory.PRAGMATIC)]),
            ]
        )
        out = io.StringIO()
        write_canonical(ds, out)
        assert parse_canonical(io.StringIO(out.getvalue())) == ds

    def test_round_trip_random_datasets(self):
        rng = random.Random(97)
        for trial in range(30):
            ds = random_dataset(rng, f"rt{trial}")
            out = io.StringIO()
            n = write_canonical(ds, out)
            assert n == ds.n_records
            again = parse_canonical(io.StringIO(out.getvalue()))
            assert again == ds
