"""Command-line entry point wiring ingest, analysis, and simulation.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 I/O failure.
Every subcommand stages its outputs to temp files and publishes them
with atomic renames only after all computation succeeds, so a failed
run never leaves partial outputs. A JSON summary goes to stdout on
success; diagnostics go to stderr, gated by VARLENS_LOG.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .agreement import (
    DEFAULT_MIN_N,
    KappaCondition,
    LabelSelectionRule,
    classify_agreement,
    pairwise_kappa_matrix,
    select_single_label,
)
from .errors import MissingSidecar, MultiLabelRecord, VarlensError
from .ingest import (
    adapt_livenli,
    adapt_varierr,
    load_sidecar,
    parse_canonical,
    write_canonical,
)
from .model import Dataset, validate_dataset
from .profiles import (
    Normalization,
    annotator_profile,
    cooccurrence,
    select_overlapping_annotators,
    shared_items,
)
from .report import (
    AgreementItems,
    PerItemDistribution,
    ProfileReport,
    RankDeviations,
    SimilarityReport,
    class_stats,
    emit,
    extract_case,
    per_item_label_distribution,
    rank_deviations,
    _item_metrics,
)
from .similarity import SimilarityScores
from .simulate import generate, load_sim_config, recovery_check

logger = logging.getLogger("varlens")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

_METRIC_ALIASES = {
    "token1": "token_1gram",
    "token2": "token_2gram",
    "pos1": "pos_1gram",
    "pos2": "pos_2gram",
    "cos": "cosine",
    "euc": "euclidean",
}

_NORMALIZATIONS = {
    "none": Normalization.NONE,
    "dataset": Normalization.PER_DATASET,
    "category": Normalization.PER_CATEGORY,
}


@dataclass(frozen=True)
class RunConfig:
    """Shared run parameters assembled from parsed arguments."""

    subcommand: str
    inputs: tuple[Path, ...]
    sidecar: Path | None
    rule: LabelSelectionRule
    min_n: int
    out_dir: Path | None
    formats: tuple[str, ...]
    seed: int | None
    log_level: str
    jobs: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        raw_inputs = getattr(args, "input", None)
        if raw_inputs is None:
            inputs: tuple[Path, ...] = ()
        elif isinstance(raw_inputs, list):
            inputs = tuple(Path(p) for p in raw_inputs)
        else:
            inputs = (Path(raw_inputs),)
        return cls(
            subcommand=args.subcommand,
            inputs=inputs,
            sidecar=Path(args.sidecar) if getattr(args, "sidecar", None) else None,
            rule=LabelSelectionRule(getattr(args, "rule", "first_listed")),
            min_n=getattr(args, "min_n", DEFAULT_MIN_N),
            out_dir=Path(args.out_dir) if getattr(args, "out_dir", None) else None,
            formats=getattr(args, "formats", ("csv", "json", "svg")),
            seed=None,
            log_level=os.environ.get("VARLENS_LOG", "error").lower(),
            jobs=getattr(args, "jobs", 1),
        )

    def required_files(self, args: argparse.Namespace) -> list[Path]:
        paths = list(self.inputs)
        if self.sidecar is not None:
            paths.append(self.sidecar)
        for name in ("config", "field_map"):
            value = getattr(args, name, None)
            if value:
                paths.append(Path(value))
        return paths


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class _RootParser(_Parser):
    """Top-level parser whose --help also lists every subcommand's flags."""

    subparsers_by_name: dict[str, argparse.ArgumentParser] = {}

    def format_help(self):
        parts = [super().format_help()]
        for name in sorted(self.subparsers_by_name):
            parts.append(self.subparsers_by_name[name].format_help())
        return "\n".join(parts)


class _StagedWriter:
    """Two-phase output: stage bytes to temp files, publish by rename."""

    def __init__(self):
        self._staged: list[tuple[str, Path]] = []

    def stage(self, final_path: Path, data: bytes) -> None:
        final_path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(
            dir=final_path.parent, prefix=final_path.name + ".", suffix=".tmp"
        )
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        self._staged.append((tmp, final_path))

    def publish(self) -> list[str]:
        published = []
        for tmp, final in self._staged:
            os.replace(tmp, final)
            published.append(str(final))
        self._staged.clear()
        return published

    def discard(self) -> None:
        for tmp, _ in self._staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        self._staged.clear()


# ---------------------------------------------------------------------------
# Shared helpers


def _read_dataset(path: Path) -> Dataset:
    logger.info("reading canonical input %s", path)
    with open(path, encoding="utf-8") as handle:
        dataset = parse_canonical(handle)
    logger.debug("parsed %d items, %d records", len(dataset.bundles), dataset.n_records)
    return dataset


def _read_sidecar(path: Path):
    logger.info("reading sidecar %s", path)
    with open(path, encoding="utf-8") as handle:
        return load_sidecar(handle)


def _require_sidecar_keys(dataset: Dataset, sidecar) -> None:
    missing = sorted(
        {
            record.key
            for bundle in dataset.bundles
            for record in bundle.records
            if record.key not in sidecar
        }
    )
    if missing:
        raise MissingSidecar(", ".join(missing))


def _classify_items(dataset: Dataset, rule: LabelSelectionRule) -> AgreementItems:
    rows = []
    skipped = []
    for bundle in dataset.bundles:
        if len(bundle.records) != 4:
            skipped.append((bundle.item_id, f"{len(bundle.records)} records, need 4"))
            continue
        try:
            labels = [select_single_label(r, rule) for r in bundle.records]
        except MultiLabelRecord:
            skipped.append((bundle.item_id, "multi-label record under strict_single"))
            continue
        cls = classify_agreement(labels)
        rows.append((bundle.item_id, cls, cls.pattern_entropy))
    return AgreementItems(tuple(rows), tuple(skipped))


def _safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in name)


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns the summary dict and stages outputs.


def _cmd_ingest(config: RunConfig, args, writer: _StagedWriter) -> dict:
    path = config.inputs[0]
    field_map = None
    if args.field_map:
        with open(args.field_map, encoding="utf-8") as handle:
            field_map = json.load(handle)
    with open(path, encoding="utf-8") as handle:
        if args.source_format == "canonical":
            dataset = parse_canonical(handle)
            warnings: dict[str, int] = {}
            rejected = 0
        else:
            adapter = adapt_livenli if args.source_format == "livenli" else adapt_varierr
            result = adapter(handle, field_map)
            dataset, warnings, rejected = (
                result.dataset,
                dict(result.warnings),
                result.n_rejected,
            )
    report = validate_dataset(dataset)
    buf = io.StringIO()
    n_written = write_canonical(dataset, buf)
    writer.stage(Path(args.out), buf.getvalue().encode("utf-8"))
    return {
        "subcommand": "ingest",
        "dataset_id": dataset.dataset_id,
        "items": len(dataset.bundles),
        "records": n_written,
        "rejected": rejected,
        "warnings": warnings,
        "violations": len(report.violations),
        "out": str(args.out),
    }


def _cmd_agree(config: RunConfig, args, writer: _StagedWriter) -> dict:
    dataset = _read_dataset(config.inputs[0])
    items = _classify_items(dataset, config.rule)
    condition = KappaCondition(args.condition)
    matrix = pairwise_kappa_matrix(
        dataset, dataset.annotator_ids, condition, min_n=config.min_n
    )
    out = Path(args.out)
    writer.stage(out / "items.csv", emit(items, "csv"))
    writer.stage(out / "items.json", emit(items, "json"))
    writer.stage(out / "kappa.csv", emit(matrix, "csv"))
    writer.stage(out / "kappa.json", emit(matrix, "json"))
    return {
        "subcommand": "agree",
        "items": len(items.rows),
        "skipped": len(items.skipped),
        "annotators": len(matrix.annotators),
        "condition": condition.value,
        "out": str(out),
    }


def _cmd_sim(config: RunConfig, args, writer: _StagedWriter) -> dict:
    dataset = _read_dataset(config.inputs[0])
    sidecar = _read_sidecar(config.sidecar)
    eligible = [b for b in dataset.bundles if len(b.records) >= 2]
    _require_sidecar_keys(
        Dataset(dataset.dataset_id, tuple(eligible)) if eligible else dataset, sidecar
    )
    use_sidecar_tokens = args.tokens == "sidecar"
    metrics = _item_metrics(eligible, sidecar, use_sidecar_tokens, config.jobs)
    rows = tuple(
        (bundle.item_id, scores) for bundle, (_, scores) in zip(eligible, metrics)
    )
    report = SimilarityReport(rows, args.metrics)
    out = Path(args.out)
    writer.stage(out / "similarity.csv", emit(report, "csv"))
    writer.stage(out / "similarity.json", emit(report, "json"))
    return {
        "subcommand": "sim",
        "items": len(rows),
        "skipped": len(dataset.bundles) - len(eligible),
        "metrics": list(args.metrics),
        "out": str(out),
    }


def _cmd_profile(config: RunConfig, args, writer: _StagedWriter) -> dict:
    dataset = _read_dataset(config.inputs[0])
    selection = None
    item_filter = None
    if args.select_k is not None:
        selection = select_overlapping_annotators(dataset, args.select_k)
        annotators = selection.annotators
        item_filter = shared_items(dataset, annotators)
    else:
        annotators = tuple(args.annotators)
    profiles = tuple(
        annotator_profile(dataset, a, item_filter, config.rule) for a in annotators
    )
    report = ProfileReport(profiles, selection)
    out = Path(args.out)
    writer.stage(out / "profiles.csv", emit(report, "csv"))
    writer.stage(out / "profiles.json", emit(report, "json"))
    summary = {
        "subcommand": "profile",
        "annotators": list(annotators),
        "out": str(out),
    }
    if selection is not None:
        summary["overlap"] = selection.overlap
        summary["exact"] = selection.exact
    return summary


def _cmd_cooccur(config: RunConfig, args, writer: _StagedWriter) -> dict:
    dataset = _read_dataset(config.inputs[0])
    matrix = cooccurrence(dataset, config.rule, _NORMALIZATIONS[args.norm])
    out = Path(args.out)
    writer.stage(out / "cooccurrence.csv", emit(matrix, "csv"))
    writer.stage(out / "cooccurrence.json", emit(matrix, "json"))
    return {
        "subcommand": "cooccur",
        "normalization": matrix.normalization.value,
        "total_mass": matrix.total,
        "empty_categories": [c.value for c in matrix.empty_categories],
        "out": str(out),
    }


def _cmd_report(config: RunConfig, args, writer: _StagedWriter) -> dict:
    datasets = [_read_dataset(path) for path in config.inputs]
    sidecar = _read_sidecar(config.sidecar)
    out = Path(args.out_dir)
    formats = config.formats
    use_sidecar_tokens = args.tokens == "sidecar"
    artifacts = []

    def stage(name: str, report, valid_formats=("csv", "json", "svg")):
        for fmt in formats:
            if fmt not in valid_formats:
                continue
            writer.stage(out / f"{name}.{fmt}", emit(report, fmt))
            artifacts.append(f"{name}.{fmt}")

    for dataset in datasets:
        prefix = _safe_name(dataset.dataset_id)
        four = [b for b in dataset.bundles if len(b.records) == 4]
        _require_sidecar_keys(
            Dataset(dataset.dataset_id, tuple(four)) if four else dataset, sidecar
        )
        stats = class_stats(
            dataset, sidecar, config.rule, use_sidecar_tokens, jobs=config.jobs
        )
        stage(f"{prefix}.class_stats", stats)
        stage(
            f"{prefix}.rank_deviations",
            RankDeviations(tuple(rank_deviations(stats.rows))),
            ("csv", "json"),
        )
        stage(
            f"{prefix}.label_distribution",
            PerItemDistribution(tuple(per_item_label_distribution(dataset, config.rule))),
        )
        for condition in (KappaCondition.T_GIVEN_L, KappaCondition.L_GIVEN_T):
            matrix = pairwise_kappa_matrix(
                dataset, dataset.annotator_ids, condition, min_n=config.min_n
            )
            stage(f"{prefix}.kappa_{condition.value}", matrix)

    if args.case:
        case = extract_case(args.case, datasets)
        stage("case", case, ("csv", "json"))

    return {
        "subcommand": "report",
        "datasets": [d.dataset_id for d in datasets],
        "artifacts": sorted(artifacts),
        "out_dir": str(out),
    }


def _cmd_simulate(config: RunConfig, args, writer: _StagedWriter) -> dict:
    sim_config, expect = load_sim_config(args.config)
    logger.info(
        "generating %d items x %d annotators (seed %d)",
        sim_config.n_items,
        len(sim_config.profiles),
        sim_config.seed,
    )
    dataset, truth = generate(sim_config)
    buf = io.StringIO()
    n_written = write_canonical(dataset, buf)
    writer.stage(Path(args.out), buf.getvalue().encode("utf-8"))
    truth_lines = "".join(
        json.dumps(
            {
                "item_id": e.item_id,
                "annotator_id": e.annotator_id,
                "category": e.category.value,
                "label": e.label.value,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        + "\n"
        for e in truth
    )
    writer.stage(Path(args.truth_out), truth_lines.encode("utf-8"))
    recovery = recovery_check(dataset, truth, sim_config, expect=expect)
    return {
        "subcommand": "simulate",
        "items": sim_config.n_items,
        "annotators": len(sim_config.profiles),
        "records": n_written,
        "seed": sim_config.seed,
        "expect": expect,
        "recovery_ok": recovery.ok,
        "checks": [
            {
                "name": c.name,
                "value": c.value,
                "threshold": c.threshold,
                "passed": c.passed,
            }
            for c in recovery.checks
        ],
        "out": str(args.out),
        "truth_out": str(args.truth_out),
    }


# ---------------------------------------------------------------------------
# Parser assembly


def _metrics_arg(text: str) -> tuple[str, ...]:
    names = []
    for part in text.split(","):
        part = part.strip()
        if part not in _METRIC_ALIASES:
            raise argparse.ArgumentTypeError(f"unknown metric {part!r}")
        names.append(_METRIC_ALIASES[part])
    if not names:
        raise argparse.ArgumentTypeError("empty metric list")
    return tuple(names)


def _formats_arg(text: str) -> tuple[str, ...]:
    formats = []
    for part in text.split(","):
        part = part.strip().lower()
        if part not in ("csv", "json", "svg"):
            raise argparse.ArgumentTypeError(f"unknown format {part!r}")
        formats.append(part)
    if not formats:
        raise argparse.ArgumentTypeError("empty format list")
    return tuple(formats)


def _annotators_arg(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise argparse.ArgumentTypeError("empty annotator list")
    return names


def _add_rule(parser) -> None:
    parser.add_argument(
        "--rule",
        choices=[r.value for r in LabelSelectionRule],
        default="first_listed",
        help="single-label selection rule applied to every analysis in the run",
    )


def _add_jobs(parser) -> None:
    parser.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="worker processes for per-item stages (results are identical at any value)",
    )


def build_parser() -> _RootParser:
    parser = _RootParser(
        prog="varlens",
        description="Agreement, explanation-similarity, and annotator-profile "
        "analyses over multi-annotator NLI data.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    by_name: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("ingest", help="convert a source file to canonical lines")
    p.add_argument("--from", dest="source_format", required=True,
                   choices=["canonical", "livenli", "varierr"])
    p.add_argument("--in", dest="input", required=True, help="source file")
    p.add_argument("--out", required=True, help="canonical output file")
    p.add_argument("--field-map", dest="field_map",
                   help="JSON file overriding source field names")
    p.set_defaults(func=_cmd_ingest)
    by_name["ingest"] = p

    p = sub.add_parser("agree", help="per-item agreement classes and pairwise kappa")
    p.add_argument("--in", dest="input", required=True, help="canonical file")
    _add_rule(p)
    p.add_argument("--condition", choices=[c.value for c in KappaCondition],
                   default="none", help="conditioning for the kappa matrix")
    p.add_argument("--min-n", dest="min_n", type=int, default=DEFAULT_MIN_N,
                   help="minimum shared instances per kappa cell")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_agree)
    by_name["agree"] = p

    p = sub.add_parser("sim", help="per-item explanation similarity scores")
    p.add_argument("--in", dest="input", required=True, help="canonical file")
    p.add_argument("--sidecar", required=True, help="sidecar file with embeddings")
    p.add_argument("--metrics", type=_metrics_arg,
                   default=SimilarityScores.METRICS,
                   help="comma list from token1,token2,pos1,pos2,cos,euc")
    p.add_argument("--tokens", choices=["internal", "sidecar"], default="internal",
                   help="tokenizer feeding the token n-gram metrics")
    _add_jobs(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_sim)
    by_name["sim"] = p

    p = sub.add_parser("profile", help="annotator label/category distributions")
    p.add_argument("--in", dest="input", required=True, help="canonical file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--annotators", type=_annotators_arg,
                       help="comma list of annotator ids")
    group.add_argument("--select-k", dest="select_k", type=int,
                       help="pick the k annotators sharing the most items, "
                            "then profile them over the shared items")
    _add_rule(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_profile)
    by_name["profile"] = p

    p = sub.add_parser("cooccur", help="category x label co-occurrence matrix")
    p.add_argument("--in", dest="input", required=True, help="canonical file")
    p.add_argument("--norm", choices=sorted(_NORMALIZATIONS), default="none",
                   help="normalization of the emitted values")
    _add_rule(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_cooccur)
    by_name["cooccur"] = p

    p = sub.add_parser("report", help="full per-dataset report artifact set")
    p.add_argument("--in", dest="input", required=True, action="append",
                   help="canonical file (repeatable)")
    p.add_argument("--sidecar", required=True, help="sidecar file with embeddings")
    _add_rule(p)
    p.add_argument("--min-n", dest="min_n", type=int, default=DEFAULT_MIN_N,
                   help="minimum shared instances per kappa cell")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--formats", type=_formats_arg, default=("csv", "json", "svg"),
                   help="comma list from csv,json,svg")
    p.add_argument("--case", help="also emit a verbatim extract of this item id")
    p.add_argument("--tokens", choices=["internal", "sidecar"], default="internal",
                   help="tokenizer feeding the token n-gram metrics")
    _add_jobs(p)
    p.set_defaults(func=_cmd_report)
    by_name["report"] = p

    p = sub.add_parser("simulate", help="generate a synthetic dataset from a scenario")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="canonical output file")
    p.add_argument("--truth-out", dest="truth_out", required=True,
                   help="ground-truth draw log (JSON lines)")
    p.set_defaults(func=_cmd_simulate)
    by_name["simulate"] = p

    parser.subparsers_by_name = by_name
    return parser


def run(argv=None) -> int:
    """Parse argv, dispatch, and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    level = _LOG_LEVELS.get(os.environ.get("VARLENS_LOG", "error").lower(), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(level)

    config = RunConfig.from_args(args)
    for path in config.required_files(args):
        if not path.is_file():
            print(f"varlens: i/o error: no such file: {path}", file=sys.stderr)
            return 3

    writer = _StagedWriter()
    try:
        summary = args.func(config, args, writer)
        written = writer.publish()
    except VarlensError as exc:
        writer.discard()
        print(f"varlens: validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        writer.discard()
        print(f"varlens: i/o error: {exc}", file=sys.stderr)
        return 3
    except Exception:
        writer.discard()
        raise
    summary["written"] = len(written)
    print(json.dumps(summary, sort_keys=True, ensure_ascii=False))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
