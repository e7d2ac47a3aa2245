"""Top-1 evaluation of the identification pipeline over a split's test side."""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable

from maf.core import QueryInstance
from maf.dataset.jsonio import SCHEMA_VERSION
from maf.dataset.manifest import DatasetManifest, SequenceEntry
from maf.dataset.query_io import load_query, query_exists
from maf.dataset.splits import SplitAssignment
from maf.errors import ArtifactMissing, EmptySide, MafError, PreconditionError
from maf.pipeline import PipelineConfig, identify

log = logging.getLogger(__name__)


def score_query(query: QueryInstance, truth_id: str, cfg: PipelineConfig) -> dict:
    result = identify(query, cfg)
    return {
        "predicted": result.candidate_id,
        "ground_truth": truth_id,
        "correct": result.candidate_id == truth_id,
        "n_candidates": len(query.candidates),
        "trace": result.trace_json(),
    }


def _run_entry(args: tuple[str, str, str, PipelineConfig]) -> tuple[str, dict]:
    sequence_id, query_dir, truth_id, cfg = args
    try:
        return sequence_id, score_query(load_query(query_dir), truth_id, cfg)
    except MafError as exc:
        log.warning("query %s failed: %s", sequence_id, exc)
        return sequence_id, {"ground_truth": truth_id, "error": f"{type(exc).__name__}: {exc}"}


def summarize(
    split_name: str,
    cfg: PipelineConfig,
    results: dict[str, dict],
    tags: dict[str, str],
) -> dict:
    """Reduce per-query records into the report document.

    The reduction only reads ``results`` in sorted key order, so it does not
    depend on how the records were produced.
    """
    per_source: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    n_correct = n_failed = 0
    cand_total = cand_count = 0
    for sid in sorted(results):
        rec = results[sid]
        ok = bool(rec.get("correct", False))
        n_correct += ok
        n_failed += "error" in rec
        bucket = per_source[tags.get(sid, "unknown")]
        bucket[0] += 1
        bucket[1] += ok
        if "n_candidates" in rec:
            cand_total += rec["n_candidates"]
            cand_count += 1
    n = len(results)
    return {
        "schema_version": SCHEMA_VERSION,
        "split": split_name,
        "config": cfg.to_json(),
        "n_queries": n,
        "n_correct": n_correct,
        "n_failed": n_failed,
        "accuracy": n_correct / n if n else 0.0,
        "mean_candidates": cand_total / cand_count if cand_count else 0.0,
        "per_source": {
            tag: {"n": c[0], "correct": c[1], "accuracy": c[1] / c[0]}
            for tag, c in sorted(per_source.items())
        },
        "queries": {sid: results[sid] for sid in sorted(results)},
    }


def evaluate(
    manifest: DatasetManifest,
    split: SplitAssignment,
    cfg: PipelineConfig = PipelineConfig(),
    root=".",
    jobs: int = 1,
) -> dict:
    """Run the pipeline on every test sequence of ``split`` and build the report.

    A missing query directory aborts the run; any other per-query failure is
    recorded in the report and counted as incorrect.
    """
    if not split.test:
        raise EmptySide(f"split {split.name!r} has no test sequences")
    entries = manifest.by_id()
    tasks = []
    for sid in split.test:
        entry: SequenceEntry = entries[sid]
        qdir = Path(root) / entry.query
        if not query_exists(qdir):
            raise ArtifactMissing("query index not found", qdir / "query.json")
        tasks.append((sid, str(qdir), entry.ground_truth_id, cfg))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(_run_entry, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        pairs = [_run_entry(t) for t in tasks]
    tags = {sid: entries[sid].source_tag for sid in split.test}
    return summarize(split.name, cfg, dict(pairs), tags)


def evaluate_queries(
    queries: Iterable[QueryInstance],
    cfg: PipelineConfig = PipelineConfig(),
    split_name: str = "in-memory",
    tag: str = "synthetic",
) -> dict:
    """In-memory counterpart of :func:`evaluate`; every query must carry its ground truth."""
    results = {}
    for i, q in enumerate(queries):
        sid = q.sequence_id or f"query{i:05d}"
        if q.ground_truth is None:
            raise PreconditionError(f"query {sid} has no ground truth")
        results[sid] = score_query(q, q.candidates[q.ground_truth].candidate_id, cfg)
    return summarize(split_name, cfg, results, {sid: tag for sid in results})
