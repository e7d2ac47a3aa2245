from maf.dataset.evaluate import evaluate, evaluate_queries
from maf.dataset.manifest import (
    MANIFEST_FILE,
    SOURCE_TAGS,
    CandidateEntry,
    DatasetManifest,
    SequenceEntry,
    manifest_from_json,
    read_manifest,
    validate_artifacts,
    write_manifest,
)
from maf.dataset.query_io import load_query, save_query
from maf.dataset.splits import (
    SPLIT_NAMES,
    SplitAssignment,
    make_split,
    split_all,
    split_cross_dataset,
    split_seen,
    split_unseen,
)
from maf.dataset.synthetic import BenchmarkSpec, build_benchmark

__all__ = [
    "MANIFEST_FILE",
    "SOURCE_TAGS",
    "SPLIT_NAMES",
    "BenchmarkSpec",
    "CandidateEntry",
    "DatasetManifest",
    "SequenceEntry",
    "SplitAssignment",
    "build_benchmark",
    "evaluate",
    "evaluate_queries",
    "load_query",
    "make_split",
    "manifest_from_json",
    "read_manifest",
    "save_query",
    "split_all",
    "split_cross_dataset",
    "split_seen",
    "split_unseen",
    "validate_artifacts",
    "write_manifest",
]
