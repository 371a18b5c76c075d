"""Accessors for the data files bundled with the package.

sample20: a 20-item, 4-annotator corpus with a fixed agreement-class
mix (8 Full, 6 Partial, 4 TwoPairs, 2 Divergent) and a matching sidecar
of deterministic embeddings and POS tags. livenli_overlap: a sparse
10-annotator corpus whose best 4-way overlap is a known unique set.
Scenario files configure the simulator.
"""

from __future__ import annotations

from pathlib import Path

from .ingest import SidecarTable, load_sidecar, parse_canonical
from .model import Dataset

_DATA = Path(__file__).parent / "data"

SCENARIO_NAMES = ("planted", "independent", "shared_map")


def sample20_path() -> Path:
    return _DATA / "sample20.jsonl"


def sample20_sidecar_path() -> Path:
    return _DATA / "sample20.sidecar.jsonl"


def livenli_overlap_path() -> Path:
    return _DATA / "livenli_overlap.jsonl"


def scenario_path(name: str) -> Path:
    if name not in SCENARIO_NAMES:
        raise ValueError(f"unknown scenario {name!r}; choose from {SCENARIO_NAMES}")
    return _DATA / "scenarios" / f"{name}.json"


def load_sample20() -> Dataset:
    with open(sample20_path(), encoding="utf-8") as handle:
        return parse_canonical(handle)


def load_sample20_sidecar() -> SidecarTable:
    with open(sample20_sidecar_path(), encoding="utf-8") as handle:
        return load_sidecar(handle)


def load_livenli_overlap() -> Dataset:
    with open(livenli_overlap_path(), encoding="utf-8") as handle:
        return parse_canonical(handle)
