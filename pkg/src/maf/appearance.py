"""Appearance sources: how close each ego-view detection is to every candidate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from maf.core import APPEARANCE, Detection, Embedding, ScoreSource
from maf.errors import DimensionMismatch, NoCandidateEmbeddings, PreconditionError


@dataclass(frozen=True)
class AppearanceConfig:
    lambda_trust: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lambda_trust) and self.lambda_trust > 0):
            raise PreconditionError(f"lambda_trust must be > 0, got {self.lambda_trust!r}")


def select_frames(t: int) -> tuple[int, int, int]:
    """First, middle and last frame indices of a ``t``-frame sequence."""
    if t < 1:
        raise PreconditionError(f"sequence length must be >= 1, got {t}")
    return 0, (t - 1) // 2, t - 1


def selected_frame_set(t: int) -> list[int]:
    return sorted(set(select_frames(t)))


def embedding_distance(a: Embedding, b: Embedding) -> float:
    if a.dim != b.dim:
        raise DimensionMismatch(f"embedding dimensions differ: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.values - b.values))


def appearance_score(det: Detection, candidate_frames: Sequence[Embedding]) -> float:
    """Mean L2 distance from the detection to each of the candidate's frame embeddings."""
    if not candidate_frames:
        raise NoCandidateEmbeddings("candidate has no frame embeddings")
    return sum(embedding_distance(det.embedding, e) for e in candidate_frames) / len(
        candidate_frames
    )


def build_sources(
    dets: Sequence[Detection],
    candidates: Sequence[Sequence[Embedding]],
    cfg: AppearanceConfig = AppearanceConfig(),
) -> list[ScoreSource]:
    """One appearance :class:`ScoreSource` per detection, in detection order.

    Repeated detections of the same person are kept as separate sources.
    """
    for n, frames in enumerate(candidates):
        if not frames:
            raise NoCandidateEmbeddings(f"candidate {n} has no frame embeddings")
    sources = []
    for k, det in enumerate(dets):
        scores = tuple(appearance_score(det, frames) for frames in candidates)
        sources.append(
            ScoreSource(APPEARANCE, scores, cfg.lambda_trust, det.alpha_mask, f"{APPEARANCE}:{k}")
        )
    return sources
