"""On-disk layout of a single query.

::

    <query>/query.json            index: sequence id, t, relative artifact paths
    <query>/ego/flow_0000.flo     t-1 Middlebury flow fields
    <query>/ego/depth_0000.pfm    t-1 PFM depth maps
    <query>/candidates/<id>/masks.json, predictions.json, embeddings.json
    <query>/detections.json
"""

from __future__ import annotations

import os
from pathlib import Path

from maf.core import (
    Detection,
    Embedding,
    MaskSequence,
    MotionSignature,
    QueryInstance,
    read_depth,
    read_flow,
    write_depth,
    write_flow,
)
from maf.dataset import jsonio
from maf.dataset.jsonio import SCHEMA_VERSION, field
from maf.errors import ArtifactMissing, PreconditionError, SchemaError
from maf.motion_match import MotionPrediction, WindowPrediction

QUERY_FILE = "query.json"


def embedding_to_json(e: Embedding) -> dict:
    return {"dim": e.dim, "values": e.values.tolist()}


def embedding_from_json(doc, path) -> Embedding:
    dim = field(doc, "dim", int, path)
    values = field(doc, "values", list, path)
    if len(values) != dim:
        raise SchemaError(f"embedding declares dim {dim} but has {len(values)} values", path)
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise SchemaError("embedding values must be numbers", path)
    try:
        return Embedding(values)
    except PreconditionError as exc:
        raise SchemaError(str(exc), path) from None


def masks_to_json(seq: MaskSequence) -> dict:
    return {
        "candidate_id": seq.candidate_id,
        "width": seq.width,
        "height": seq.height,
        "frames": [
            {"frame_index": i, "counts": None if runs is None else list(runs)}
            for i, runs in enumerate(seq.frames)
        ],
    }


def masks_from_json(doc, path) -> MaskSequence:
    frames_doc = field(doc, "frames", list, path)
    frames = []
    for i, fr in enumerate(frames_doc):
        if field(fr, "frame_index", int, path) != i:
            raise SchemaError(f"mask frames must be listed in order; entry {i} is out of place", path)
        counts = field(fr, "counts", list, path, nullable=True)
        if counts is not None and not all(isinstance(c, int) and not isinstance(c, bool) for c in counts):
            raise SchemaError("mask counts must be integers", path)
        frames.append(None if counts is None else tuple(counts))
    try:
        return MaskSequence(
            field(doc, "candidate_id", str, path),
            field(doc, "width", int, path),
            field(doc, "height", int, path),
            tuple(frames),
        )
    except PreconditionError as exc:
        raise SchemaError(str(exc), path) from None


def prediction_to_json(pred: MotionPrediction) -> dict:
    return {
        "candidate_id": pred.candidate_id,
        "windows": [
            {
                "start": w.start,
                "length": w.length,
                "t_exo": w.signature.t_total,
                "r_exo": w.signature.r_total,
            }
            for w in pred.windows
        ],
    }


def prediction_from_json(doc, path) -> MotionPrediction:
    windows = []
    for w in field(doc, "windows", list, path):
        try:
            sig = MotionSignature(float(field(w, "t_exo", float, path)), float(field(w, "r_exo", float, path)))
        except PreconditionError as exc:
            raise SchemaError(str(exc), path) from None
        windows.append(WindowPrediction(field(w, "start", int, path), field(w, "length", int, path), sig))
    return MotionPrediction(field(doc, "candidate_id", str, path), tuple(windows))


def candidate_embeddings_to_json(candidate_id: str, frames: dict) -> dict:
    return {
        "candidate_id": candidate_id,
        "frames": [
            {"frame_index": k, "embedding": embedding_to_json(frames[k])} for k in sorted(frames)
        ],
    }


def candidate_embeddings_from_json(doc, path) -> tuple[str, dict[int, Embedding]]:
    frames = {}
    for fr in field(doc, "frames", list, path):
        k = field(fr, "frame_index", int, path)
        if k in frames:
            raise SchemaError(f"duplicate embedding for frame {k}", path)
        frames[k] = embedding_from_json(field(fr, "embedding", dict, path), path)
    return field(doc, "candidate_id", str, path), frames


def detections_to_json(dets) -> list:
    return [
        {
            "frame_index": d.frame_index,
            "alpha_mask": d.alpha_mask,
            "embedding": embedding_to_json(d.embedding),
        }
        for d in dets
    ]


def detections_from_json(doc, path) -> list[Detection]:
    if not isinstance(doc, list):
        raise SchemaError("detections file must hold a JSON array", path)
    dets = []
    for d in doc:
        try:
            dets.append(
                Detection(
                    field(d, "frame_index", int, path),
                    embedding_from_json(field(d, "embedding", dict, path), path),
                    float(field(d, "alpha_mask", float, path)),
                )
            )
        except PreconditionError as exc:
            raise SchemaError(str(exc), path) from None
    return dets


def _safe_name(candidate_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in candidate_id) or "_"


def save_query(query: QueryInstance, directory) -> Path:
    """Write ``query`` under ``directory`` (created if needed); returns the directory."""
    root = Path(directory)
    (root / "ego").mkdir(parents=True, exist_ok=True)
    flow_paths, depth_paths = [], []
    for i, (flow, depth) in enumerate(zip(query.ego_flow, query.ego_depth)):
        fp, dp = f"ego/flow_{i:04d}.flo", f"ego/depth_{i:04d}.pfm"
        write_flow(root / fp, flow)
        write_depth(root / dp, depth)
        flow_paths.append(fp)
        depth_paths.append(dp)

    cand_docs = []
    used = set()
    for n, cand in enumerate(query.candidates):
        name = _safe_name(cand.candidate_id)
        if name in used:
            name = f"{name}-{n}"
        used.add(name)
        base = f"candidates/{name}"
        (root / base).mkdir(parents=True, exist_ok=True)
        jsonio.dump(root / base / "masks.json", masks_to_json(cand))
        jsonio.dump(root / base / "predictions.json", prediction_to_json(query.candidate_motion_predictions[n]))
        jsonio.dump(
            root / base / "embeddings.json",
            candidate_embeddings_to_json(cand.candidate_id, query.candidate_embeddings[n]),
        )
        cand_docs.append(
            {
                "candidate_id": cand.candidate_id,
                "masks": f"{base}/masks.json",
                "predictions": f"{base}/predictions.json",
                "embeddings": f"{base}/embeddings.json",
            }
        )
    jsonio.dump(root / "detections.json", detections_to_json(query.ego_detections))
    gt = None if query.ground_truth is None else query.candidates[query.ground_truth].candidate_id
    jsonio.dump(
        root / QUERY_FILE,
        {
            "schema_version": SCHEMA_VERSION,
            "sequence_id": query.sequence_id,
            "t": query.sequence_length,
            "ego": {"flow": flow_paths, "depth": depth_paths},
            "candidates": cand_docs,
            "detections": "detections.json",
            "ground_truth": gt,
        },
    )
    return root


def _resolve(root: Path, rel, path) -> Path:
    if not isinstance(rel, str) or not rel:
        raise SchemaError(f"artifact path must be a non-empty string, got {rel!r}", path)
    return root / rel


def load_query(directory) -> QueryInstance:
    root = Path(directory)
    index_path = root / QUERY_FILE
    if not root.is_dir():
        raise ArtifactMissing("query directory not found", root)
    doc = jsonio.load(index_path)
    jsonio.check_version(doc, index_path)
    t = field(doc, "t", int, index_path)
    ego = field(doc, "ego", dict, index_path)
    flows = [read_flow(_resolve(root, p, index_path)) for p in field(ego, "flow", list, index_path)]
    depths = [read_depth(_resolve(root, p, index_path)) for p in field(ego, "depth", list, index_path)]

    candidates, preds, embeddings = [], [], []
    for c in field(doc, "candidates", list, index_path):
        cid = field(c, "candidate_id", str, index_path)
        mpath = _resolve(root, field(c, "masks", str, index_path), index_path)
        ppath = _resolve(root, field(c, "predictions", str, index_path), index_path)
        epath = _resolve(root, field(c, "embeddings", str, index_path), index_path)
        masks = masks_from_json(jsonio.load(mpath), mpath)
        pred = prediction_from_json(jsonio.load(ppath), ppath)
        emb_id, frames = candidate_embeddings_from_json(jsonio.load(epath), epath)
        for p, other in ((mpath, masks.candidate_id), (ppath, pred.candidate_id), (epath, emb_id)):
            if other != cid:
                raise SchemaError(f"candidate_id {other!r} does not match index entry {cid!r}", p)
        candidates.append(masks)
        preds.append(pred)
        embeddings.append(frames)

    dpath = _resolve(root, field(doc, "detections", str, index_path), index_path)
    detections = detections_from_json(jsonio.load(dpath), dpath)
    gt_id = field(doc, "ground_truth", str, index_path, nullable=True)
    ids = [c.candidate_id for c in candidates]
    if len(set(ids)) != len(ids):
        raise SchemaError("candidate ids must be unique", index_path)
    if gt_id is not None and gt_id not in ids:
        raise SchemaError(f"ground_truth {gt_id!r} is not a candidate", index_path)
    return QueryInstance(
        sequence_length=t,
        ego_flow=tuple(flows),
        ego_depth=tuple(depths),
        candidates=tuple(candidates),
        candidate_motion_predictions=tuple(preds),
        candidate_embeddings=tuple(embeddings),
        ego_detections=tuple(detections),
        ground_truth=None if gt_id is None else ids.index(gt_id),
        sequence_id=field(doc, "sequence_id", str, index_path),
    )


def query_exists(directory) -> bool:
    return os.path.isfile(os.path.join(directory, QUERY_FILE))
