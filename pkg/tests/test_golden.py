"""Byte-for-byte stability of the full report artifact set.

The files under tests/golden/ were produced by the report subcommand on
the bundled sample corpus. Any byte drift in formatting, ordering, or
numeric rounding shows up here as a diff, not a flake: two fresh runs
must agree with each other and with the frozen files.
"""

from __future__ import annotations

from pathlib import Path

from varlens.cli import run
from varlens.fixtures import sample20_path, sample20_sidecar_path

GOLDEN_DIR = Path(__file__).parent / "golden"

EXPECTED_FILES = sorted(
    f"sample.{stem}.{fmt}"
    for stem, formats in (
        ("class_stats", ("csv", "json", "svg")),
        ("rank_deviations", ("csv", "json")),
        ("label_distribution", ("csv", "json", "svg")),
        ("kappa_T_given_L", ("csv", "json", "svg")),
        ("kappa_L_given_T", ("csv", "json", "svg")),
    )
    for fmt in formats
)


def regenerate(out_dir: Path, jobs: int) -> None:
    code = run(
        [
            "report",
            "--in", str(sample20_path()),
            "--sidecar", str(sample20_sidecar_path()),
            "--out-dir", str(out_dir),
            "--jobs", str(jobs),
        ]
    )
    assert code == 0


def test_golden_directory_is_complete():
    assert sorted(p.name for p in GOLDEN_DIR.iterdir()) == EXPECTED_FILES


def test_two_runs_match_each_other_and_the_golden_files(tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    regenerate(first, jobs=1)
    regenerate(second, jobs=2)
    for name in EXPECTED_FILES:
        fresh = (first / name).read_bytes()
        assert fresh == (second / name).read_bytes(), f"{name}: runs disagree"
        assert fresh == (GOLDEN_DIR / name).read_bytes(), f"{name}: drifted from golden"
