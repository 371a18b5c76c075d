"""Acceptance gate: one test per required behavior, each timed.

Every test prints one [PASS]/[FAIL] line (visible under pytest -s).
Oracles here recompute results by the most literal route available:
exhaustive enumeration, explicit contingency tables, and explicit
subset filters, independent of the library's own shortcuts.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from contextlib import contextmanager, redirect_stdout

import pytest
from scipy.stats import spearmanr

from helpers import E, N, C, bundle, dataset, oracle_kappa, random_dataset, rec
from varlens.agreement import (
    KappaCondition,
    classify_agreement,
    cohen_kappa,
    conditional_kappa,
    item_category_agreement,
    label_entropy,
)
from varlens.cli import run
from varlens.errors import TooFewInstances
from varlens.fixtures import (
    SCENARIO_NAMES,
    load_livenli_overlap,
    sample20_path,
    sample20_sidecar_path,
    scenario_path,
)
from varlens.ingest import parse_canonical, write_canonical
from varlens.model import CATEGORIES, LABELS, TaxonomyCategory
from varlens.profiles import select_overlapping_annotators
from varlens.similarity import cosine_percent, euclidean_percent, ngram_overlap
from varlens.simulate import generate, load_sim_config, recovery_check
import io


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    within = elapsed < budget_s
    print(f"[{'PASS' if within else 'FAIL'}] {name} ({elapsed:.2f}s, budget {budget_s:g}s)")
    assert within, f"{name}: {elapsed:.2f}s exceeds the {budget_s:g}s budget"


def test_entropy_per_agreement_class():
    with criterion("entropy per agreement class", 1.0):
        patterns = {
            (E, E, E, E): 0.00,
            (E, E, E, N): 0.81,
            (E, E, N, N): 1.00,
            (E, E, N, C): 1.50,
        }
        for labels, expected in patterns.items():
            assert label_entropy(labels) == pytest.approx(expected, abs=0.005)


def test_agreement_class_enumeration():
    with criterion("exhaustive 4-label class counts", 1.0):
        counts: dict = {}
        for labels in itertools.product(LABELS, repeat=4):
            cls = classify_agreement(labels)
            counts[cls.value] = counts.get(cls.value, 0) + 1
        assert counts == {"Full": 3, "Partial": 24, "TwoPairs": 18, "Divergent": 36}


def test_kappa_matches_contingency_oracle():
    with criterion("kappa vs contingency-table oracle, 1000 trials", 5.0):
        rng = random.Random(8801)
        for trial in range(1000):
            n_cats = rng.randint(3, 8)
            values = [f"c{k}" for k in range(n_cats)]
            n = rng.randint(1, 500)
            if trial % 20 == 0:
                fixed = rng.choice(values)
                pairs = [(fixed, fixed)] * n
            else:
                pairs = [(rng.choice(values), rng.choice(values)) for _ in range(n)]
            result = cohen_kappa(pairs, min_n=1)
            want_kappa, want_po, want_pe = oracle_kappa(pairs)
            assert result.p_o == pytest.approx(want_po, abs=1e-12)
            assert result.p_e == pytest.approx(want_pe, abs=1e-12)
            if want_kappa is None:
                assert result.kappa is None and not result.defined
            else:
                assert result.kappa == pytest.approx(want_kappa, abs=1e-12)


def _conditional_oracle_pairs(ds, pair, condition):
    a, b = pair
    out = []
    for item in ds.bundles:
        by = {r.annotator_id: r for r in item.records}
        if a not in by or b not in by:
            continue
        ra, rb = by[a], by[b]
        la, lb = ra.labels[0], rb.labels[0]
        if condition is KappaCondition.T_GIVEN_L:
            if la is lb:
                out.append((ra.category, rb.category))
        else:
            if ra.category is rb.category:
                out.append((la, lb))
    return out


def _random_two_annotator_dataset(rng):
    bundles = []
    for i in range(rng.randint(10, 60)):
        rows = []
        la = rng.choice(LABELS)
        ca = rng.choice(CATEGORIES)
        rows.append(("a", la, ca))
        lb = la if rng.random() < 0.5 else rng.choice(LABELS)
        cb = ca if rng.random() < 0.5 else rng.choice(CATEGORIES)
        rows.append(("b", lb, cb))
        bundles.append(bundle(f"i{i:04d}", rows))
    return dataset(bundles)


def test_conditional_kappa_matches_subset_oracle():
    with criterion("conditional kappa vs subset-filter oracle, 200 datasets", 5.0):
        rng = random.Random(442)
        for _ in range(200):
            ds = _random_two_annotator_dataset(rng)
            for condition in (KappaCondition.T_GIVEN_L, KappaCondition.L_GIVEN_T):
                expected_pairs = _conditional_oracle_pairs(ds, ("a", "b"), condition)
                if not expected_pairs:
                    with pytest.raises(TooFewInstances):
                        conditional_kappa(ds, ("a", "b"), condition, min_n=1)
                    continue
                result = conditional_kappa(ds, ("a", "b"), condition, min_n=1)
                want_kappa, want_po, want_pe = oracle_kappa(expected_pairs)
                assert result.n == len(expected_pairs)
                assert result.p_o == pytest.approx(want_po, abs=1e-12)
                assert result.p_e == pytest.approx(want_pe, abs=1e-12)
                if want_kappa is None:
                    assert result.kappa is None
                else:
                    assert result.kappa == pytest.approx(want_kappa, abs=1e-12)


def test_category_agreement_matches_pair_oracle():
    with criterion("category agreement vs pair-enumeration oracle", 2.0):
        for ca, cb in itertools.product(CATEGORIES, repeat=2):
            b2 = bundle("i", [("a", E, ca), ("b", N, cb)])
            assert item_category_agreement(b2) == (1.0 if ca is cb else 0.0)
        rng = random.Random(99)
        for i in range(1000):
            cats = [rng.choice(CATEGORIES) for _ in range(4)]
            rows = [(f"a{k}", rng.choice(LABELS), cats[k]) for k in range(4)]
            got = item_category_agreement(bundle(f"i{i}", rows))
            matches = sum(
                1 for x, y in itertools.combinations(cats, 2) if x is y
            )
            assert got == matches / 6


def test_similarity_properties():
    with criterion("similarity properties and rank agreement", 5.0):
        rng = random.Random(2717)
        vocab_a = [f"w{k}" for k in range(30)]
        vocab_b = [f"x{k}" for k in range(30)]
        for _ in range(300):
            n = rng.choice([1, 2])
            left = [rng.choice(vocab_a) for _ in range(rng.randint(n, 12))]
            right = [rng.choice(vocab_a) for _ in range(rng.randint(n, 12))]
            score = ngram_overlap(left, right, n)
            assert score == ngram_overlap(right, left, n)
            assert 0.0 <= score <= 100.0
            assert ngram_overlap(left, left, n) == 100.0
            disjoint = [rng.choice(vocab_b) for _ in range(max(n, 2))]
            assert ngram_overlap(left, disjoint, n) == 0.0

        cosines, euclideans = [], []
        for _ in range(1000):
            dim = rng.randint(2, 16)
            u = [rng.gauss(0, 1) for _ in range(dim)]
            v = [rng.gauss(0, 1) for _ in range(dim)]
            nu = math.sqrt(sum(x * x for x in u))
            nv = math.sqrt(sum(x * x for x in v))
            u = [x / nu for x in u]
            v = [x / nv for x in v]
            assert cosine_percent(u, u) == pytest.approx(100.0, abs=1e-9)
            assert euclidean_percent(u, u) == pytest.approx(100.0, abs=1e-9)
            cosines.append(cosine_percent(u, v))
            euclideans.append(euclidean_percent(u, v))
        rho = spearmanr(cosines, euclideans).statistic
        assert rho == pytest.approx(1.0, abs=1e-12)


def test_simulator_recovery():
    with criterion("simulator recovery on bundled scenarios", 60.0):
        for name in SCENARIO_NAMES:
            config, expect = load_sim_config(scenario_path(name))
            ds, truth = generate(config)
            report = recovery_check(ds, truth, config, expect=expect)
            failed = [c for c in report.checks if not c.passed]
            assert report.ok, f"{name}: {failed}"
            if expect == "independent":
                peak = [c for c in report.checks if c.name == "max_abs_kappa"][0]
                assert peak.value < 0.05
            if expect == "shared_map":
                worst = [c for c in report.checks if c.name == "min_kappa_L_given_T"][0]
                assert worst.value == pytest.approx(1.0, abs=1e-9)


def _coverage_dataset(cover):
    items: dict = {}
    for ann, ids in cover.items():
        for item in ids:
            items.setdefault(item, []).append(ann)
    return dataset(
        bundle(item, [(a, E, TaxonomyCategory.SEMANTIC) for a in sorted(anns)])
        for item, anns in sorted(items.items())
    )


def test_overlap_selection():
    with criterion("overlap selection vs exhaustive enumeration", 2.0):
        rng = random.Random(606)
        for _ in range(10):
            universe = [f"m{k}" for k in range(40)]
            cover = {
                f"a{j}": set(rng.sample(universe, rng.randint(8, 30))) for j in range(6)
            }
            ds = _coverage_dataset(cover)
            got = select_overlapping_annotators(ds, 4)
            scored = [
                (len(set.intersection(*(cover[a] for a in combo))), combo)
                for combo in itertools.combinations(sorted(cover), 4)
            ]
            best = max(score for score, _ in scored)
            winner = min(combo for score, combo in scored if score == best)
            assert got.exact
            assert got.overlap == best
            assert got.annotators == winner

        selection = select_overlapping_annotators(load_livenli_overlap(), 4)
        assert selection.annotators == ("w1", "w4", "w7", "w8")
        assert selection.overlap == 115
        assert selection.exact


def test_report_byte_determinism(tmp_path):
    with criterion("report byte determinism across two runs", 10.0):
        outputs = []
        for name, jobs in (("one", 1), ("two", 2)):
            out = tmp_path / name
            with redirect_stdout(io.StringIO()):
                code = run(
                    [
                        "report",
                        "--in", str(sample20_path()),
                        "--sidecar", str(sample20_sidecar_path()),
                        "--out-dir", str(out),
                        "--jobs", str(jobs),
                    ]
                )
            assert code == 0
            outputs.append({p.name: p.read_bytes() for p in out.iterdir()})
        assert outputs[0].keys() == outputs[1].keys()
        assert len(outputs[0]) == 14
        for name in outputs[0]:
            assert outputs[0][name] == outputs[1][name], name


def test_canonical_round_trip():
    with criterion("write/parse round trip on 100 random datasets", 5.0):
        rng = random.Random(31337)
        for k in range(100):
            ds = random_dataset(rng, f"rt{k}")
            buf = io.StringIO()
            n = write_canonical(ds, buf)
            assert n == ds.n_records
            parsed = parse_canonical(io.StringIO(buf.getvalue()))
            assert parsed == ds
            again = io.StringIO()
            write_canonical(parsed, again)
            assert again.getvalue() == buf.getvalue()
