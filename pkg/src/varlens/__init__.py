"""Label variation and explanation analysis for multi-annotator NLI data.

Core objects: canonical datasets of per-annotator labeled, explained,
categorized items; agreement classes and conditional kappa; explanation
similarity metrics; annotator profiles and co-occurrence; a two-step
generative simulator; and deterministic report emission.
"""

from .agreement import (
    DEFAULT_MIN_N,
    AgreementClass,
    CellStatus,
    KappaCell,
    KappaCondition,
    KappaMatrix,
    KappaResult,
    LabelSelectionRule,
    classify_agreement,
    cohen_kappa,
    conditional_kappa,
    item_category_agreement,
    label_entropy,
    pairwise_kappa_matrix,
    select_single_label,
)
from .errors import VarlensError
from .ingest import (
    IngestResult,
    SidecarEntry,
    SidecarTable,
    adapt_livenli,
    adapt_varierr,
    load_sidecar,
    parse_canonical,
    write_canonical,
)
from .model import (
    CATEGORIES,
    LABELS,
    AnnotationRecord,
    Dataset,
    ItemBundle,
    NliLabel,
    SuperType,
    TaxonomyCategory,
    ValidationReport,
    map_raw_label,
    validate_dataset,
)
from .profiles import (
    AnnotatorProfile,
    CooccurrenceMatrix,
    Normalization,
    OverlapSelection,
    annotator_profile,
    cooccurrence,
    select_overlapping_annotators,
    shared_items,
)
from .report import (
    CaseExtract,
    ClassStats,
    ClassStatsRow,
    RankDeviation,
    class_stats,
    emit,
    extract_case,
    per_item_label_distribution,
    rank_deviations,
)
from .similarity import (
    SimilarityScores,
    cosine_percent,
    euclidean_percent,
    item_similarity,
    ngram_overlap,
    pos_ngram_overlap,
    tokenize,
)
from .simulate import (
    GenerativeProfile,
    RecoveryReport,
    SimConfig,
    TruthEntry,
    generate,
    load_sim_config,
    recovery_check,
    tv_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementClass",
    "AnnotationRecord",
    "AnnotatorProfile",
    "CATEGORIES",
    "CaseExtract",
    "CellStatus",
    "ClassStats",
    "ClassStatsRow",
    "CooccurrenceMatrix",
    "DEFAULT_MIN_N",
    "Dataset",
    "GenerativeProfile",
    "IngestResult",
    "ItemBundle",
    "KappaCell",
    "KappaCondition",
    "KappaMatrix",
    "KappaResult",
    "LABELS",
    "LabelSelectionRule",
    "NliLabel",
    "Normalization",
    "OverlapSelection",
    "RankDeviation",
    "RecoveryReport",
    "SidecarEntry",
    "SidecarTable",
    "SimConfig",
    "SimilarityScores",
    "SuperType",
    "TaxonomyCategory",
    "TruthEntry",
    "ValidationReport",
    "VarlensError",
    "adapt_livenli",
    "adapt_varierr",
    "annotator_profile",
    "class_stats",
    "classify_agreement",
    "cohen_kappa",
    "conditional_kappa",
    "cooccurrence",
    "cosine_percent",
    "emit",
    "euclidean_percent",
    "extract_case",
    "generate",
    "item_category_agreement",
    "item_similarity",
    "label_entropy",
    "load_sidecar",
    "load_sim_config",
    "map_raw_label",
    "ngram_overlap",
    "pairwise_kappa_matrix",
    "parse_canonical",
    "per_item_label_distribution",
    "pos_ngram_overlap",
    "rank_deviations",
    "recovery_check",
    "select_overlapping_annotators",
    "select_single_label",
    "shared_items",
    "tokenize",
    "tv_distance",
    "validate_dataset",
    "write_canonical",
]
