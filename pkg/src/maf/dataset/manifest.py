"""Dataset manifest: which sequences exist, where they come from, who wears the camera."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from maf.dataset import jsonio
from maf.dataset.jsonio import SCHEMA_VERSION, field
from maf.errors import SchemaError

TF2023 = "tf2023"
IUSHAREVIEW = "iushareview"
EGO4D_TF = "ego4d_tf"
SYNTHETIC = "synthetic"
SOURCE_TAGS = (TF2023, IUSHAREVIEW, EGO4D_TF, SYNTHETIC)

MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class CandidateEntry:
    candidate_id: str
    ground_truth: bool = False


@dataclass(frozen=True)
class SequenceEntry:
    """One query sequence. ``order`` is its temporal position within ``video_id``;
    ``query`` is the query directory, relative to the manifest's folder."""

    sequence_id: str
    source_tag: str
    video_id: str
    wearer_id: str
    order: int | None
    t: int
    query: str
    candidates: tuple[CandidateEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if self.source_tag not in SOURCE_TAGS:
            raise SchemaError(f"sequence {self.sequence_id!r}: unknown source tag {self.source_tag!r}")
        n_gt = sum(c.ground_truth for c in self.candidates)
        if n_gt != 1:
            raise SchemaError(
                f"sequence {self.sequence_id!r} has {n_gt} ground-truth candidates, expected 1"
            )

    @property
    def ground_truth_id(self) -> str:
        return next(c.candidate_id for c in self.candidates if c.ground_truth)

    def to_json(self) -> dict:
        return {
            "sequence_id": self.sequence_id,
            "source_tag": self.source_tag,
            "video_id": self.video_id,
            "wearer_id": self.wearer_id,
            "order": self.order,
            "t": self.t,
            "query": self.query,
            "candidates": [
                {"candidate_id": c.candidate_id, "ground_truth": c.ground_truth}
                for c in self.candidates
            ],
        }


@dataclass(frozen=True)
class DatasetManifest:
    sequences: tuple[SequenceEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequences", tuple(self.sequences))
        seen = set()
        for s in self.sequences:
            if s.sequence_id in seen:
                raise SchemaError(f"duplicate sequence_id {s.sequence_id!r}")
            seen.add(s.sequence_id)

    def by_id(self) -> dict[str, SequenceEntry]:
        return {s.sequence_id: s for s in self.sequences}

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sequences": [s.to_json() for s in self.sequences],
        }


def manifest_from_json(doc, path=None) -> DatasetManifest:
    jsonio.check_version(doc, path)
    entries = []
    for s in field(doc, "sequences", list, path):
        cands = tuple(
            CandidateEntry(field(c, "candidate_id", str, path), field(c, "ground_truth", bool, path))
            for c in field(s, "candidates", list, path)
        )
        try:
            entries.append(
                SequenceEntry(
                    sequence_id=field(s, "sequence_id", str, path),
                    source_tag=field(s, "source_tag", str, path),
                    video_id=field(s, "video_id", str, path),
                    wearer_id=field(s, "wearer_id", str, path),
                    order=field(s, "order", int, path, nullable=True),
                    t=field(s, "t", int, path),
                    query=field(s, "query", str, path),
                    candidates=cands,
                )
            )
        except SchemaError as exc:
            if exc.path is None and path is not None:
                raise SchemaError(str(exc), path) from None
            raise
    try:
        return DatasetManifest(tuple(entries))
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from None


def read_manifest(path) -> DatasetManifest:
    return manifest_from_json(jsonio.load(path), path)


def write_manifest(path, manifest: DatasetManifest) -> None:
    jsonio.dump(path, manifest.to_json())


def validate_artifacts(manifest: DatasetManifest, root) -> None:
    """Parse every query referenced by ``manifest`` and cross-check it against its entry."""
    from maf.dataset.query_io import load_query

    for entry in manifest.sequences:
        query = load_query(Path(root) / entry.query)
        ids = [c.candidate_id for c in entry.candidates]
        where = Path(root) / entry.query
        if query.candidate_ids != ids:
            raise SchemaError(f"candidates {query.candidate_ids} differ from manifest {ids}", where)
        if query.sequence_length != entry.t:
            raise SchemaError(f"query has t={query.sequence_length}, manifest says {entry.t}", where)
