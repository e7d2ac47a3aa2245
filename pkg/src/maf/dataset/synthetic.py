"""Write simulator queries to disk as a complete benchmark with a manifest."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from maf.dataset.manifest import (
    EGO4D_TF,
    IUSHAREVIEW,
    MANIFEST_FILE,
    SYNTHETIC,
    TF2023,
    CandidateEntry,
    DatasetManifest,
    SequenceEntry,
    write_manifest,
)
from maf.dataset.query_io import save_query
from maf.errors import PreconditionError
from maf.motion_match import WindowSpec
from maf.simulator import QueryKnobs, default_scene, make_query

MIXED_TAGS = (TF2023, IUSHAREVIEW, EGO4D_TF)


@dataclass(frozen=True)
class BenchmarkSpec:
    """Shape of a synthetic benchmark.

    Sequences are grouped ``per_video`` at a time; every video has its own cast
    of ``n_distractors + 1`` people, one of whom wears the camera in each of
    its sequences. With ``mixed_tags`` videos cycle through the real source
    tags so every split generator has something to work with.
    """

    n_queries: int = 1
    seed: int = 0
    n_distractors: int = 3
    sequence_length: int = 17
    per_video: int = 10
    mixed_tags: bool = False
    knobs: QueryKnobs = field(default_factory=QueryKnobs)
    window: WindowSpec = field(default_factory=WindowSpec)

    def __post_init__(self) -> None:
        if self.n_queries < 1 or self.per_video < 1:
            raise PreconditionError("n_queries and per_video must be >= 1")
        if self.sequence_length < 2:
            raise PreconditionError(f"sequence_length must be >= 2, got {self.sequence_length}")


def query_seed(seed: int, index: int) -> int:
    return int(np.random.default_rng([seed, index]).integers(2**31))


def _build_one(args: tuple[BenchmarkSpec, int, str]) -> SequenceEntry:
    spec, i, out = args
    video = i // spec.per_video
    video_id = f"video{video:03d}"
    sequence_id = f"seq{i:05d}"
    people = [f"{video_id}-p{k}" for k in range(spec.n_distractors + 1)]
    s = query_seed(spec.seed, i)
    query = make_query(
        default_scene(s, spec.sequence_length),
        spec.n_distractors,
        spec.knobs,
        seed=s,
        spec=spec.window,
        candidate_ids=people,
        sequence_id=sequence_id,
    )
    rel = f"queries/{sequence_id}"
    save_query(query, Path(out) / rel)
    wearer = query.candidates[query.ground_truth].candidate_id
    return SequenceEntry(
        sequence_id=sequence_id,
        source_tag=MIXED_TAGS[video % len(MIXED_TAGS)] if spec.mixed_tags else SYNTHETIC,
        video_id=video_id,
        wearer_id=wearer,
        order=i % spec.per_video,
        t=query.sequence_length,
        query=rel,
        candidates=tuple(CandidateEntry(c.candidate_id, c.candidate_id == wearer) for c in query.candidates),
    )


def build_benchmark(out_dir, spec: BenchmarkSpec = BenchmarkSpec(), jobs: int = 1) -> DatasetManifest:
    """Simulate ``spec.n_queries`` queries under ``out_dir`` and write ``manifest.json``.

    Each query draws from its own seed, so the tree is identical for any ``jobs``.
    """
    out = Path(out_dir)
    (out / "queries").mkdir(parents=True, exist_ok=True)
    tasks = [(spec, i, str(out)) for i in range(spec.n_queries)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_build_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        entries = [_build_one(t) for t in tasks]
    manifest = DatasetManifest(tuple(entries))
    write_manifest(out / MANIFEST_FILE, manifest)
    return manifest
