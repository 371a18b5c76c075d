import pytest

from varlens.errors import UnknownCategory, UnknownLabel
from varlens.model import (
    CATEGORIES,
    LABELS,
    AnnotationRecord,
    Dataset,
    ItemBundle,
    NliLabel,
    SuperType,
    TaxonomyCategory,
    map_raw_label,
    validate_dataset,
)

from helpers import E, N, C, bundle, dataset, rec


class TestLabelMapping:
    def test_tec_mapping(self):
        assert map_raw_label("true", "tec") is E
        assert map_raw_label("either", "tec") is N
        assert map_raw_label("false", "tec") is C

    def test_enc_identity(self):
        for label in LABELS:
            assert map_raw_label(label.value, "enc") is label

    @pytest.mark.parametrize("raw,scheme,expected", [
        ("True", "tec", NliLabel.ENTAILMENT),
        ("EITHER", "tec", NliLabel.NEUTRAL),
        ("  false ", "tec", NliLabel.CONTRADICTION),
        ("Entailment", "enc", NliLabel.ENTAILMENT),
        ("NEUTRAL", "enc", NliLabel.NEUTRAL),
    ])
    def test_case_and_whitespace_insensitive(self, raw, scheme, expected):
        assert map_raw_label(raw, scheme) is expected

    def test_unknown_label_raises(self):
        with pytest.raises(UnknownLabel):
            map_raw_label("maybe", "tec")
        with pytest.raises(UnknownLabel):
            map_raw_label("true", "enc")

    def test_unknown_scheme_raises(self):
        with pytest.raises(ValueError):
            map_raw_label("true", "bool")


class TestTaxonomy:
    def test_eight_categories(self):
        assert len(CATEGORIES) == 8
        assert len({c.value for c in CATEGORIES}) == 8

    def test_super_types(self):
        world = {
            TaxonomyCategory.FACTUAL_KNOWLEDGE,
            TaxonomyCategory.INFERENTIAL_KNOWLEDGE,
        }
        for category in CATEGORIES:
            expected = SuperType.WORLD_KNOWLEDGE if category in world else SuperType.TEXT_BASED
            assert category.super_type is expected

    def test_parse(self):
        assert TaxonomyCategory.parse("AbsenceOfMention") is TaxonomyCategory.ABSENCE_OF_MENTION
        assert TaxonomyCategory.parse(" LogicConflict ") is TaxonomyCategory.LOGIC_CONFLICT
        with pytest.raises(UnknownCategory):
            TaxonomyCategory.parse("Sarcasm")


class TestRecordAndBundle:
    def test_raw_labels_default_to_canonical(self):
        record = rec("i1", "a", (E, N), TaxonomyCategory.SEMANTIC)
        assert record.raw_labels == ("entailment", "neutral")

    def test_raw_labels_preserved_verbatim(self):
        record = rec("i1", "a", E, TaxonomyCategory.SEMANTIC, raw=("True",))
        assert record.raw_labels == ("True",)

    def test_key(self):
        assert rec("i1", "a", E, CATEGORIES[0]).key == "i1::a"

    def test_bundle_sorts_records_by_annotator(self):
        b = bundle("i1", [("z", E, CATEGORIES[0]), ("a", N, CATEGORIES[1]), ("m", C, CATEGORIES[2])])
        assert b.annotator_ids == ("a", "m", "z")

    def test_bundle_equality_ignores_input_order(self):
        rows = [("a", E, CATEGORIES[0]), ("b", N, CATEGORIES[1])]
        assert bundle("i1", rows) == bundle("i1", list(reversed(rows)))

    def test_record_for(self):
        b = bundle("i1", [("a", E, CATEGORIES[0]), ("b", N, CATEGORIES[1])])
        assert b.record_for("b").labels == (N,)
        assert b.record_for("zz") is None


class TestDataset:
    def test_sorts_bundles_and_counts(self):
        ds = dataset([
            bundle("i2", [("a", E, CATEGORIES[0])]),
            bundle("i1", [("a", N, CATEGORIES[1]), ("b", C, CATEGORIES[2])]),
        ])
        assert [b.item_id for b in ds.bundles] == ["i1", "i2"]
        assert ds.n_records == 3
        assert ds.by_item["i2"].records[0].labels == (E,)

    def test_annotator_ids_sorted(self):
        ds = dataset([
            bundle("i1", [("z", E, CATEGORIES[0]), ("a", E, CATEGORIES[0])]),
            bundle("i2", [("m", E, CATEGORIES[0])]),
        ])
        assert ds.annotator_ids == ("a", "m", "z")


class TestValidation:
    def test_clean_dataset_is_ok(self):
        ds = dataset([bundle("i1", [("a", E, CATEGORIES[0]), ("b", N, CATEGORIES[1])])])
        report = validate_dataset(ds)
        assert report.ok
        assert len(report) == 0

    def test_duplicate_annotator(self):
        b = bundle("i1", [("a", E, CATEGORIES[0]), ("a", N, CATEGORIES[1])])
        report = validate_dataset(dataset([b]))
        assert [v.rule for v in report.violations] == ["DuplicateAnnotator"]
        assert report.violations[0].detail == "a"

    def test_empty_labels_and_empty_explanation(self):
        record = AnnotationRecord(
            item_id="i1", dataset_id="t", annotator_id="a",
            labels=(), explanation="  ", category=CATEGORIES[0],
        )
        report = validate_dataset(dataset([bundle("i1", [record])]))
        assert [v.rule for v in report.violations] == ["EmptyExplanation", "EmptyLabels"]

    def test_duplicate_label_within_record(self):
        record = rec("i1", "a", (E, E), CATEGORIES[0])
        report = validate_dataset(dataset([bundle("i1", [record])]))
        assert [v.rule for v in report.violations] == ["DuplicateLabel"]

    def test_mismatched_item_id(self):
        stray = rec("other", "a", E, CATEGORIES[0])
        b = ItemBundle("i1", "p", "h", (stray,))
        report = validate_dataset(dataset([b]))
        assert [v.rule for v in report.violations] == ["MismatchedItemId"]

    def test_duplicate_item_id(self):
        bundles = (
            bundle("i1", [("a", E, CATEGORIES[0])]),
            bundle("i1", [("b", N, CATEGORIES[1])]),
        )
        report = validate_dataset(Dataset("t", bundles))
        assert [v.rule for v in report.violations] == ["DuplicateItemId"]

    @pytest.mark.parametrize("ext", [
        (0.5, 0.5, 0.5),          # sums to 1.5
        (-0.1, 0.6, 0.5),         # negative entry
    ])
    def test_bad_external_distribution(self, ext):
        b = bundle("i1", [("a", E, CATEGORIES[0])], ext=ext)
        report = validate_dataset(dataset([b]))
        assert [v.rule for v in report.violations] == ["BadExternalDistribution"]

    def test_external_distribution_within_tolerance_ok(self):
        b = bundle("i1", [("a", E, CATEGORIES[0])], ext=(0.3, 0.3, 0.4 + 5e-7))
        assert validate_dataset(dataset([b])).ok

    def test_violations_sorted_deterministically(self):
        bundles = [
            bundle("i2", [("a", E, CATEGORIES[0]), ("a", E, CATEGORIES[0])]),
            bundle("i1", [rec("i1", "b", (), CATEGORIES[1], explanation="")]),
        ]
        report = validate_dataset(dataset(bundles))
        keys = [(v.item_id, v.rule, v.detail) for v in report.violations]
        assert keys == sorted(keys)
        assert [v.rule for v in report.violations] == [
            "EmptyExplanation", "EmptyLabels", "DuplicateAnnotator",
        ]

    def test_validate_never_mutates(self):
        b = bundle("i1", [("a", E, CATEGORIES[0]), ("a", N, CATEGORIES[1])])
        ds = dataset([b])
        before = ds.bundles
        validate_dataset(ds)
        assert ds.bundles == before
