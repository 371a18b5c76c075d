"""One-shot export: canonical records in, sidecar plus manifest out.

Reads every annotation record from a canonical JSON-lines file, runs the
named tagger and encoder over each explanation, and writes one sidecar
entry per record keyed item_id::annotator_id, ordered by key. The
manifest records which encoder and tagset produced the file, the
embedding dimension, the entry count, and a content hash of the input,
so two sidecars are comparable at a glance. Both files are staged to
temp paths and published by rename only after everything succeeds.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

from .encoders import DEFAULT_ENCODER, get_encoder
from .errors import DuplicateKey, ParseError
from .tagger import DEFAULT_TAGSET, get_tagger

REQUIRED_FIELDS = ("item_id", "annotator_id", "explanation")


@dataclass(frozen=True)
class ExportManifest:
    encoder_name: str
    tagset_name: str
    dim: int
    n_entries: int
    content_hash: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_records(stream) -> list[tuple[str, str]]:
    """Collect (key, explanation) pairs from canonical lines.

    Only the three fields the exporter needs are validated; the rest of
    each record passes through untouched. Blank lines are skipped.
    """
    seen: dict[str, str] = {}
    for line_no, line in enumerate(stream, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise ParseError(line_no, "invalid JSON")
        if not isinstance(obj, dict):
            raise ParseError(line_no, "record must be a JSON object")
        missing = [f for f in REQUIRED_FIELDS if f not in obj]
        if missing:
            raise ParseError(line_no, f"missing fields: {', '.join(missing)}")
        for field in REQUIRED_FIELDS:
            if not isinstance(obj[field], str):
                raise ParseError(line_no, f"field {field!r} must be a string")
        key = f"{obj['item_id']}::{obj['annotator_id']}"
        if key in seen:
            raise DuplicateKey(key)
        seen[key] = obj["explanation"]
    return sorted(seen.items())


def _publish_all(outputs: list[tuple[Path, bytes]]) -> None:
    """Stage every file to a temp path, then rename them all, so a
    failure part-way leaves no final path touched."""
    staged: list[tuple[str, Path]] = []
    try:
        for path, data in outputs:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(
                dir=path.parent, prefix=path.name + ".", suffix=".tmp"
            )
            staged.append((tmp, path))
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        raise


def export(
    canonical_in,
    sidecar_out,
    manifest_out,
    encoder_name: str = DEFAULT_ENCODER,
    tagset: str = DEFAULT_TAGSET,
) -> ExportManifest:
    """Write the sidecar and manifest for one canonical file."""
    raw = Path(canonical_in).read_bytes()
    content_hash = hashlib.sha256(raw).hexdigest()
    records = read_records(io.StringIO(raw.decode("utf-8")))

    tagger = get_tagger(tagset)
    encoder = get_encoder(encoder_name)

    embeddings = encoder.encode([text for _, text in records])
    dim = len(embeddings[0]) if embeddings else encoder.dim

    lines = []
    for (key, text), embedding in zip(records, embeddings):
        tokens, tags = tagger.process(text)
        lines.append(
            json.dumps(
                {
                    "key": key,
                    "tokens": tokens,
                    "pos_tags": tags,
                    "embedding": embedding,
                },
                sort_keys=True,
                ensure_ascii=False,
            )
            + "\n"
        )

    manifest = ExportManifest(
        encoder_name=encoder.name,
        tagset_name=tagger.name,
        dim=dim,
        n_entries=len(records),
        content_hash=content_hash,
    )
    _publish_all(
        [
            (Path(sidecar_out), "".join(lines).encode("utf-8")),
            (Path(manifest_out), manifest.to_json().encode("utf-8")),
        ]
    )
    return manifest
