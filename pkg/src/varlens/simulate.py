"""Synthetic annotator populations under a two-step decision model.

Each annotator first samples an explanation category from personal
preferences, then samples a label from that category's conditional
distribution, then renders a category-marked explanation. Generation is
driven by numpy's PCG64 generator with a documented draw order, so a
config plus seed pins the output byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from numpy.random import Generator, PCG64

from .agreement import (
    DEFAULT_MIN_N,
    CellStatus,
    KappaCondition,
    pairwise_kappa_matrix,
)
from .errors import InvalidProfile
from .model import (
    CATEGORIES,
    LABELS,
    AnnotationRecord,
    Dataset,
    ItemBundle,
    NliLabel,
    TaxonomyCategory,
)
from .profiles import Normalization, annotator_profile, cooccurrence

_PROB_TOL = 1e-9

#: Category-marked templates: the leading repeated marker tokens give
#: explanations of the same category a high n-gram overlap and
#: explanations of different categories a low one.
DEFAULT_TEMPLATES: dict[TaxonomyCategory, str] = {
    TaxonomyCategory.COREFERENCE: (
        "coref coref coref the pronoun binds one entity in {item} per {annotator}"
    ),
    TaxonomyCategory.SYNTACTIC: (
        "syntax syntax syntax the clause structure carries it in {item} per {annotator}"
    ),
    TaxonomyCategory.SEMANTIC: (
        "lexical lexical lexical the word senses decide it in {item} per {annotator}"
    ),
    TaxonomyCategory.PRAGMATIC: (
        "implicature implicature implicature the intended reading in {item} per {annotator}"
    ),
    TaxonomyCategory.ABSENCE_OF_MENTION: (
        "unmentioned unmentioned unmentioned the premise never says it in {item} per {annotator}"
    ),
    TaxonomyCategory.LOGIC_CONFLICT: (
        "conflict conflict conflict the statements cannot both hold in {item} per {annotator}"
    ),
    TaxonomyCategory.FACTUAL_KNOWLEDGE: (
        "worldfact worldfact worldfact common knowledge settles it in {item} per {annotator}"
    ),
    TaxonomyCategory.INFERENTIAL_KNOWLEDGE: (
        "inference inference inference a plausible guess bridges it in {item} per {annotator}"
    ),
}


def _check_prob_vector(vector: Sequence[float], what: str, size: int) -> tuple[float, ...]:
    values = tuple(float(v) for v in vector)
    if len(values) != size:
        raise InvalidProfile(f"{what}: expected {size} entries, got {len(values)}")
    if any(v < 0 for v in values):
        raise InvalidProfile(f"{what}: negative entry")
    if abs(sum(values) - 1.0) > _PROB_TOL:
        raise InvalidProfile(f"{what}: entries sum to {sum(values)!r}, not 1")
    return values


@dataclass(frozen=True)
class GenerativeProfile:
    """One synthetic annotator: category preferences and conditional labels."""

    annotator_id: str
    category_prefs: tuple[float, ...]                 # over CATEGORIES, sums to 1
    label_given_category: tuple[tuple[float, ...], ...]  # 8 rows over LABELS
    explanation_templates: dict[TaxonomyCategory, str] = field(
        default_factory=lambda: dict(DEFAULT_TEMPLATES)
    )

    def __post_init__(self):
        if not self.annotator_id:
            raise InvalidProfile("empty annotator_id")
        object.__setattr__(
            self,
            "category_prefs",
            _check_prob_vector(
                self.category_prefs, f"{self.annotator_id} category_prefs", len(CATEGORIES)
            ),
        )
        rows = tuple(self.label_given_category)
        if len(rows) != len(CATEGORIES):
            raise InvalidProfile(
                f"{self.annotator_id}: expected {len(CATEGORIES)} label rows, got {len(rows)}"
            )
        object.__setattr__(
            self,
            "label_given_category",
            tuple(
                _check_prob_vector(
                    row, f"{self.annotator_id} label row {CATEGORIES[i].value}", len(LABELS)
                )
                for i, row in enumerate(rows)
            ),
        )
        for category in CATEGORIES:
            template = self.explanation_templates.get(category)
            if template is None:
                raise InvalidProfile(
                    f"{self.annotator_id}: no template for {category.value}"
                )
            try:
                template.format(item="x", annotator="y")
            except (KeyError, IndexError, ValueError) as exc:
                raise InvalidProfile(
                    f"{self.annotator_id}: bad template for {category.value}: {exc}"
                ) from exc

    def marginal_label_dist(self) -> tuple[float, ...]:
        """Planted label marginal: category prefs folded through label rows."""
        return tuple(
            sum(
                self.category_prefs[ci] * self.label_given_category[ci][li]
                for ci in range(len(CATEGORIES))
            )
            for li in range(len(LABELS))
        )


@dataclass(frozen=True)
class SimConfig:
    n_items: int
    profiles: tuple[GenerativeProfile, ...]
    seed: int

    def __post_init__(self):
        if self.n_items < 1:
            raise InvalidProfile(f"n_items must be >= 1, got {self.n_items}")
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if len(self.profiles) < 2:
            raise InvalidProfile(f"need >= 2 profiles, got {len(self.profiles)}")
        ids = [p.annotator_id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise InvalidProfile("duplicate annotator_id in profiles")
        if not (0 <= self.seed < 2**64):
            raise InvalidProfile("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TruthEntry:
    """One sampling event: the category and label actually drawn."""

    item_id: str
    annotator_id: str
    category: TaxonomyCategory
    label: NliLabel


def _pick(u: float, probs: Sequence[float]) -> int:
    acc = 0.0
    for index, p in enumerate(probs):
        acc += p
        if u < acc:
            return index
    return len(probs) - 1


def generate(config: SimConfig) -> tuple[Dataset, tuple[TruthEntry, ...]]:
    """Sample a synthetic dataset plus the ground-truth draw log.

    Draw order (PCG64 seeded with config.seed): items in index order;
    within an item, profiles in listed order; per record exactly two
    uniform draws, the first selecting the category by cumulative scan
    over category_prefs, the second selecting the label by cumulative
    scan over that category's label row. Nothing else consumes the
    stream, so identical configs give identical output.
    """
    rng = Generator(PCG64(config.seed))
    width = max(4, len(str(config.n_items)))
    bundles = []
    truth = []
    for i in range(config.n_items):
        item_id = f"sim-{i:0{width}d}"
        records = []
        for profile in config.profiles:
            category = CATEGORIES[_pick(rng.random(), profile.category_prefs)]
            row = profile.label_given_category[CATEGORIES.index(category)]
            label = LABELS[_pick(rng.random(), row)]
            explanation = profile.explanation_templates[category].format(
                item=item_id, annotator=profile.annotator_id
            )
            records.append(
                AnnotationRecord(
                    item_id=item_id,
                    dataset_id="sim",
                    annotator_id=profile.annotator_id,
                    labels=(label,),
                    explanation=explanation,
                    category=category,
                )
            )
            truth.append(TruthEntry(item_id, profile.annotator_id, category, label))
        bundles.append(
            ItemBundle(
                item_id=item_id,
                premise=f"synthetic premise {item_id}",
                hypothesis=f"synthetic hypothesis {item_id}",
                records=tuple(records),
            )
        )
    return Dataset("sim", tuple(bundles)), tuple(truth)


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Total variation distance: half the L1 distance."""
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    return 0.5 * sum(abs(a - b) for a, b in zip(p, q))


@dataclass(frozen=True)
class RecoveryCheck:
    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class RecoveryReport:
    checks: tuple[RecoveryCheck, ...]

    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)


def _planted_joint(config: SimConfig) -> dict[TaxonomyCategory, dict[NliLabel, float]]:
    joint = {c: {label: 0.0 for label in LABELS} for c in CATEGORIES}
    for profile in config.profiles:
        for ci, category in enumerate(CATEGORIES):
            for li, label in enumerate(LABELS):
                joint[category][label] += (
                    profile.category_prefs[ci]
                    * profile.label_given_category[ci][li]
                    / len(config.profiles)
                )
    return joint


def recovery_check(
    dataset: Dataset,
    truth: Sequence[TruthEntry],
    config: SimConfig,
    tv_threshold: float = 0.02,
    kappa_threshold: float = 0.05,
    min_n: int = DEFAULT_MIN_N,
    expect: str | None = None,
) -> RecoveryReport:
    """Compare recovered statistics against the planted configuration.

    Always checks, per annotator, the TV distance of the recovered
    category and label distributions from the planted ones, and the TV
    distance of the dataset co-occurrence joint from the planted joint.
    With expect="independent" it additionally requires all defined
    unconditional pairwise |kappa| below kappa_threshold; with
    expect="shared_map", kappa(L|T) = 1 on every defined pair. The truth
    log is cross-checked against the dataset (same draws).
    """
    checks: list[RecoveryCheck] = []
    by_key = {(e.item_id, e.annotator_id): e for e in truth}
    mismatches = 0
    for bundle in dataset.bundles:
        for record in bundle.records:
            entry = by_key.get((record.item_id, record.annotator_id))
            if (
                entry is None
                or entry.category is not record.category
                or entry.label is not record.labels[0]
            ):
                mismatches += 1
    checks.append(RecoveryCheck("truth_log_consistent", float(mismatches), 0.0, mismatches == 0))

    for profile in config.profiles:
        recovered = annotator_profile(dataset, profile.annotator_id)
        cat_tv = tv_distance(
            [v / 100.0 for v in recovered.category_dist], profile.category_prefs
        )
        checks.append(
            RecoveryCheck(
                f"category_tv[{profile.annotator_id}]", cat_tv, tv_threshold, cat_tv <= tv_threshold
            )
        )
        label_tv = tv_distance(
            [v / 100.0 for v in recovered.label_dist], profile.marginal_label_dist()
        )
        checks.append(
            RecoveryCheck(
                f"label_tv[{profile.annotator_id}]", label_tv, tv_threshold, label_tv <= tv_threshold
            )
        )

    observed = cooccurrence(dataset, normalization=Normalization.PER_DATASET)
    planted = _planted_joint(config)
    joint_tv = 0.5 * sum(
        abs(observed.values[category][label] - planted[category][label])
        for category in CATEGORIES
        for label in LABELS
    )
    checks.append(RecoveryCheck("joint_tv", joint_tv, tv_threshold, joint_tv <= tv_threshold))

    # Conditional label-given-category rows, for categories carrying
    # enough planted mass for the empirical row to be stable.
    per_category = cooccurrence(dataset, normalization=Normalization.PER_CATEGORY)
    for category in CATEGORIES:
        mass = sum(planted[category].values())
        if mass < 0.01:
            continue
        planted_row = [planted[category][label] / mass for label in LABELS]
        observed_row = [per_category.values[category][label] for label in LABELS]
        row_tv = tv_distance(observed_row, planted_row)
        checks.append(
            RecoveryCheck(
                f"row_tv[{category.value}]", row_tv, tv_threshold, row_tv <= tv_threshold
            )
        )

    if expect == "independent":
        matrix = pairwise_kappa_matrix(
            dataset, dataset.annotator_ids, KappaCondition.NONE, min_n=min_n
        )
        peak = 0.0
        for cell in matrix.cells.values():
            if cell.status is CellStatus.OK:
                peak = max(peak, abs(cell.result.kappa))
        checks.append(
            RecoveryCheck("max_abs_kappa", peak, kappa_threshold, peak < kappa_threshold)
        )
    elif expect == "shared_map":
        matrix = pairwise_kappa_matrix(
            dataset, dataset.annotator_ids, KappaCondition.L_GIVEN_T, min_n=min_n
        )
        worst = 1.0
        defined = 0
        for cell in matrix.cells.values():
            if cell.status is CellStatus.OK:
                defined += 1
                worst = min(worst, cell.result.kappa)
        passed = defined > 0 and worst >= 1.0 - 1e-9
        checks.append(RecoveryCheck("min_kappa_L_given_T", worst, 1.0, passed))
    elif expect is not None:
        raise ValueError(f"unknown expectation {expect!r}")

    return RecoveryReport(tuple(checks))


# ---------------------------------------------------------------------------
# Scenario configs (JSON): schema mirrors SimConfig with category-keyed maps.


def _category_map_to_vector(mapping: dict, what: str) -> tuple[float, ...]:
    known = {c.value: i for i, c in enumerate(CATEGORIES)}
    values = [0.0] * len(CATEGORIES)
    for key, value in mapping.items():
        if key not in known:
            raise InvalidProfile(f"{what}: unknown category {key!r}")
        values[known[key]] = float(value)
    return tuple(values)


def load_sim_config(path) -> tuple[SimConfig, str | None]:
    """Read a scenario file; returns the config and its optional
    expectation tag ("independent" or "shared_map")."""
    with open(path, encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidProfile(f"scenario file is not valid JSON: {exc}") from exc
    try:
        return _build_sim_config(raw)
    except (KeyError, TypeError, ValueError) as exc:
        # Schema errors (missing keys, wrong types, bad enum values) are
        # user input problems, not crashes.
        raise InvalidProfile(f"bad scenario file: {exc!r}") from exc


def _build_sim_config(raw: dict) -> tuple[SimConfig, str | None]:
    profiles = []
    for entry in raw["profiles"]:
        prefs = _category_map_to_vector(
            entry["category_prefs"], f"{entry['annotator_id']} category_prefs"
        )
        rows_map = entry.get("label_given_category", {})
        uniform = tuple(1.0 / len(LABELS) for _ in LABELS)
        rows = []
        for category in CATEGORIES:
            row = rows_map.get(category.value)
            rows.append(uniform if row is None else tuple(float(v) for v in row))
        templates = dict(DEFAULT_TEMPLATES)
        for key, template in entry.get("explanation_templates", {}).items():
            templates[TaxonomyCategory(key)] = template
        profiles.append(
            GenerativeProfile(
                annotator_id=entry["annotator_id"],
                category_prefs=prefs,
                label_given_category=tuple(rows),
                explanation_templates=templates,
            )
        )
    config = SimConfig(
        n_items=int(raw["n_items"]), profiles=tuple(profiles), seed=int(raw["seed"])
    )
    return config, raw.get("expect")
