"""Immutable domain types shared across the pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

import numpy as np

from maf.errors import DimensionMismatch, PreconditionError, RunSumMismatch

if TYPE_CHECKING:
    from maf.motion_match import MotionPrediction

# Flow components with a magnitude above this are "unknown" (Middlebury convention).
UNKNOWN_FLOW_THRESHOLD = 1e9


def _frozen_array(values, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _float_raster(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D raster, got shape {arr.shape}")
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    return _frozen_array(arr)


def _bool_raster(values, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = _frozen_array(values, dtype=bool)
    if arr.shape != shape:
        raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
    return arr


def _check_dims(shape: tuple[int, ...]) -> None:
    if shape[0] < 1 or shape[1] < 1:
        raise PreconditionError(f"raster dimensions must be >= 1, got {shape[1]}x{shape[0]}")


@dataclass(frozen=True, eq=False)
class FlowField:
    """Dense optical flow between two consecutive frames.

    ``fx`` and ``fy`` are ``(height, width)`` arrays of pixel displacements per
    frame interval. Rasters read from disk keep their float32 payload so a
    rewrite is bit-identical; everything numeric downstream promotes to float64.
    """

    fx: np.ndarray
    fy: np.ndarray
    valid: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        fx = _float_raster(self.fx, "fx")
        fy = _float_raster(self.fy, "fy")
        if fx.shape != fy.shape:
            raise DimensionMismatch(f"fx {fx.shape} and fy {fy.shape} differ")
        _check_dims(fx.shape)
        if self.valid is None:
            valid = _frozen_array(flow_known(fx, fy))
        else:
            valid = _bool_raster(self.valid, fx.shape, "valid")
        if not (flow_known(fx, fy) | ~valid).all():
            raise PreconditionError("valid flow pixels must be finite with magnitude <= 1e9")
        object.__setattr__(self, "fx", fx)
        object.__setattr__(self, "fy", fy)
        object.__setattr__(self, "valid", valid)

    @property
    def width(self) -> int:
        return self.fx.shape[1]

    @property
    def height(self) -> int:
        return self.fx.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowField):
            return NotImplemented
        return (
            np.array_equal(self.fx, other.fx, equal_nan=True)
            and np.array_equal(self.fy, other.fy, equal_nan=True)
            and np.array_equal(self.valid, other.valid)
        )

    __hash__ = None  # type: ignore[assignment]


def flow_known(fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    """Per-pixel mask of flow vectors that are finite and below the unknown sentinel."""
    with np.errstate(invalid="ignore"):
        return (
            np.isfinite(fx)
            & np.isfinite(fy)
            & (np.abs(fx) <= UNKNOWN_FLOW_THRESHOLD)
            & (np.abs(fy) <= UNKNOWN_FLOW_THRESHOLD)
        )


def depth_known(z: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.isfinite(z) & (z > 0)


@dataclass(frozen=True, eq=False)
class DepthMap:
    """Per-pixel depth in arbitrary but sequence-consistent scene units."""

    z: np.ndarray
    valid: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        z = _float_raster(self.z, "z")
        _check_dims(z.shape)
        if self.valid is None:
            valid = _frozen_array(depth_known(z))
        else:
            valid = _bool_raster(self.valid, z.shape, "valid")
        if not (depth_known(z) | ~valid).all():
            raise PreconditionError("valid depth pixels must be finite and > 0")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "valid", valid)

    @property
    def width(self) -> int:
        return self.z.shape[1]

    @property
    def height(self) -> int:
        return self.z.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DepthMap):
            return NotImplemented
        return np.array_equal(self.z, other.z, equal_nan=True) and np.array_equal(
            self.valid, other.valid
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class MotionSignature:
    """Cumulative (translational, rotational) motion over a run of frame intervals."""

    t_total: float
    r_total: float

    def __post_init__(self) -> None:
        for name in ("t_total", "r_total"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise PreconditionError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class MaskSequence:
    """Per-frame run-length encoded masks for one third-person candidate.

    ``frames[i]`` is the column-major run list for frame ``i`` or ``None`` when
    the candidate is not visible in that frame.
    """

    candidate_id: str
    width: int
    height: int
    frames: tuple[tuple[int, ...] | None, ...]

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise PreconditionError(f"mask grid must be >= 1x1, got {self.width}x{self.height}")
        frames = tuple(None if f is None else tuple(int(c) for c in f) for f in self.frames)
        total = self.width * self.height
        for i, runs in enumerate(frames):
            if runs is None:
                continue
            if any(c < 0 for c in runs) or sum(runs) != total:
                raise RunSumMismatch(
                    f"candidate {self.candidate_id!r} frame {i}: runs sum to {sum(runs)}, "
                    f"expected {total}"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def mask(self, i: int) -> np.ndarray | None:
        from maf.core.rle import decode_rle

        runs = self.frames[i]
        return None if runs is None else decode_rle(runs, self.width, self.height)


@dataclass(frozen=True, eq=False)
class Embedding:
    values: np.ndarray

    def __post_init__(self) -> None:
        v = _frozen_array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise PreconditionError(f"embedding must be a non-empty vector, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise PreconditionError("embedding entries must be finite")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Detection:
    """A person found in one of the selected first-person frames."""

    frame_index: int
    embedding: Embedding
    alpha_mask: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha_mask <= 1.0:
            raise PreconditionError(f"alpha_mask must lie in [0, 1], got {self.alpha_mask!r}")


MOTION = "motion"
APPEARANCE = "appearance"


@dataclass(frozen=True)
class ScoreSource:
    """One row of per-candidate scores plus the trust attached to it.

    Lower scores mean "closer": for motion that is the likely wearer, for an
    appearance source it is the person seen in the first-person view.
    """

    kind: str
    scores: tuple[float, ...]
    lambda_trust: float = 1.0
    alpha_mask: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (MOTION, APPEARANCE):
            raise PreconditionError(f"unknown source kind {self.kind!r}")
        scores = tuple(float(s) for s in self.scores)
        for s in scores:
            if not (math.isfinite(s) and s >= 0):
                raise PreconditionError(f"scores must be finite and >= 0, got {s!r}")
        if not (math.isfinite(self.lambda_trust) and self.lambda_trust >= 0):
            raise PreconditionError(f"lambda_trust must be finite and >= 0, got {self.lambda_trust!r}")
        if not 0.0 <= self.alpha_mask <= 1.0:
            raise PreconditionError(f"alpha_mask must lie in [0, 1], got {self.alpha_mask!r}")
        object.__setattr__(self, "scores", scores)
        if not self.label:
            object.__setattr__(self, "label", self.kind)

    def __len__(self) -> int:
        return len(self.scores)

    def without(self, position: int) -> "ScoreSource":
        """Copy of this source with the score at ``position`` removed."""
        scores = self.scores[:position] + self.scores[position + 1 :]
        return ScoreSource(self.kind, scores, self.lambda_trust, self.alpha_mask, self.label)


@dataclass(frozen=True)
class QueryInstance:
    """Everything needed to answer one "who is wearing this camera?" query.

    ``candidate_motion_predictions[n]`` and ``candidate_embeddings[n]`` belong
    to ``candidates[n]``; embeddings are keyed by exo frame index and only
    present for frames where the candidate is visible.
    """

    sequence_length: int
    ego_flow: tuple[FlowField, ...]
    ego_depth: tuple[DepthMap, ...]
    candidates: tuple[MaskSequence, ...]
    candidate_motion_predictions: tuple["MotionPrediction", ...]
    candidate_embeddings: tuple[Mapping[int, Embedding], ...]
    ego_detections: tuple[Detection, ...] = ()
    ground_truth: int | None = None
    sequence_id: str = ""

    def __post_init__(self) -> None:
        t = self.sequence_length
        if t < 2:
            raise PreconditionError(f"sequence length must be >= 2, got {t}")
        n = len(self.candidates)
        if n < 1:
            raise PreconditionError("a query needs at least one candidate")
        for name in ("ego_flow", "ego_depth"):
            seq = tuple(getattr(self, name))
            if len(seq) != t - 1:
                raise PreconditionError(f"{name} has {len(seq)} entries, expected {t - 1}")
            object.__setattr__(self, name, seq)
        for name in ("candidate_motion_predictions", "candidate_embeddings"):
            seq = tuple(getattr(self, name))
            if len(seq) != n:
                raise PreconditionError(f"{name} has {len(seq)} entries for {n} candidates")
            object.__setattr__(self, name, seq)
        for cand in self.candidates:
            if len(cand) != t:
                raise PreconditionError(
                    f"candidate {cand.candidate_id!r} has {len(cand)} mask frames, expected {t}"
                )
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "ego_detections", tuple(self.ego_detections))
        if self.ground_truth is not None and not 0 <= self.ground_truth < n:
            raise PreconditionError(f"ground_truth {self.ground_truth} outside 0..{n - 1}")

    @property
    def candidate_ids(self) -> list[str]:
        return [c.candidate_id for c in self.candidates]

    def embeddings_for(self, n: int) -> list[Embedding]:
        frames = self.candidate_embeddings[n]
        return [frames[k] for k in sorted(frames)]


def as_embedding_lists(query: QueryInstance) -> list[list[Embedding]]:
    return [query.embeddings_for(n) for n in range(len(query.candidates))]


__all__ = [
    "APPEARANCE",
    "MOTION",
    "UNKNOWN_FLOW_THRESHOLD",
    "DepthMap",
    "Detection",
    "Embedding",
    "FlowField",
    "MaskSequence",
    "MotionSignature",
    "QueryInstance",
    "ScoreSource",
    "as_embedding_lists",
    "depth_known",
    "flow_known",
]
