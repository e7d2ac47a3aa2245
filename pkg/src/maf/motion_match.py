"""Sliding-window squared-error scoring of third-person motion predictions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from maf.core import MOTION, MotionSignature, ScoreSource
from maf.ego_motion import FrameMotion, cumulative_motion, window_motion
from maf.errors import PreconditionError, WindowCountMismatch

EPS = 1e-9


class NormalizationMode(str, Enum):
    RAW = "raw"
    EGO_SCALE = "ego-scale"


@dataclass(frozen=True)
class WindowSpec:
    length: int = 8
    stride: int = 4

    def __post_init__(self) -> None:
        if self.length < 1 or self.stride < 1:
            raise PreconditionError(
                f"window length and stride must be >= 1, got {self.length}/{self.stride}"
            )


@dataclass(frozen=True)
class WindowPrediction:
    start: int
    length: int
    signature: MotionSignature


@dataclass(frozen=True)
class MotionPrediction:
    """Predicted (translational, rotational) motion of one candidate, per window."""

    candidate_id: str
    windows: tuple[WindowPrediction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "windows", tuple(self.windows))

    @property
    def grid(self) -> list[tuple[int, int]]:
        return [(w.start, w.length) for w in self.windows]


def make_windows(interval_count: int, spec: WindowSpec) -> list[tuple[int, int]]:
    """Enumerate ``(start, length)`` windows over ``interval_count`` frame intervals.

    Regular windows start every ``spec.stride`` intervals; when they leave a tail
    uncovered a final window ending exactly at ``interval_count`` is appended.
    Windows longer than the sequence are clamped to it, and a stride longer
    than the window is reduced to the window length so no interval is skipped.

    >>> make_windows(10, WindowSpec(4, 4))
    [(0, 4), (4, 4), (6, 4)]
    """
    if interval_count < 1:
        raise PreconditionError(f"interval_count must be >= 1, got {interval_count}")
    length = min(spec.length, interval_count)
    stride = min(spec.stride, length)
    windows = []
    start = 0
    while start + length <= interval_count:
        windows.append((start, length))
        start += stride
    last_start, last_len = windows[-1]
    if last_start + last_len < interval_count:
        windows.append((interval_count - length, length))
    return windows


def _scales(ego: Sequence[FrameMotion], norm: NormalizationMode) -> tuple[float, float]:
    if NormalizationMode(norm) is NormalizationMode.RAW:
        return 1.0, 1.0
    full = cumulative_motion(ego)
    return max(full.t_total, EPS), max(full.r_total, EPS)


def check_grid(pred: MotionPrediction, windows: list[tuple[int, int]]) -> None:
    if pred.grid != windows:
        raise WindowCountMismatch(
            f"candidate {pred.candidate_id!r} has windows {pred.grid}, expected {windows}"
        )


def motion_score(
    ego: Sequence[FrameMotion],
    pred: MotionPrediction,
    spec: WindowSpec = WindowSpec(),
    norm: NormalizationMode = NormalizationMode.EGO_SCALE,
) -> float:
    """Mean over windows of the (optionally ego-normalised) squared T and R errors."""
    windows = make_windows(len(ego), spec)
    check_grid(pred, windows)
    s_t, s_r = _scales(ego, norm)
    total = 0.0
    for (start, length), wp in zip(windows, pred.windows):
        ref = window_motion(ego, start, length)
        dt = (wp.signature.t_total - ref.t_total) / s_t
        dr = (wp.signature.r_total - ref.r_total) / s_r
        total += dt * dt + dr * dr
    return total / len(windows)


def rank_candidates(
    ego: Sequence[FrameMotion],
    preds: Sequence[MotionPrediction],
    spec: WindowSpec = WindowSpec(),
    norm: NormalizationMode = NormalizationMode.EGO_SCALE,
) -> ScoreSource:
    if not preds:
        raise PreconditionError("no candidate predictions to rank")
    scores = [motion_score(ego, p, spec, norm) for p in preds]
    return ScoreSource(MOTION, tuple(scores), 1.0, 1.0, label=MOTION)


def predictions_from_signatures(
    candidate_id: str, windows: Sequence[tuple[int, int]], signatures: Sequence[MotionSignature]
) -> MotionPrediction:
    if len(windows) != len(signatures):
        raise WindowCountMismatch(f"{len(signatures)} signatures for {len(windows)} windows")
    return MotionPrediction(
        candidate_id,
        tuple(WindowPrediction(s, n, sig) for (s, n), sig in zip(windows, signatures)),
    )
