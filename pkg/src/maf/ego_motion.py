"""First-person motion signals from flow and depth rasters.

Per frame interval the translational signal is the median of depth times flow
magnitude and the rotational signal is the median flow magnitude; a sequence's
signature sums both over its intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from maf.core import DepthMap, FlowField, MotionSignature
from maf.errors import DimensionMismatch, EmptySequence, NoValidPixels, OutOfRange


@dataclass(frozen=True)
class FrameMotion:
    t: float
    r: float


def frame_motion(flow: FlowField, depth: DepthMap) -> FrameMotion:
    """Median depth-weighted and plain flow magnitude over jointly valid pixels.

    Even-sized supports use the mean of the two central order statistics.
    """
    if (flow.width, flow.height) != (depth.width, depth.height):
        raise DimensionMismatch(
            f"flow is {flow.width}x{flow.height} but depth is {depth.width}x{depth.height}"
        )
    support = flow.valid & depth.valid
    if not support.any():
        raise NoValidPixels("no pixel is valid in both flow and depth")
    fx = flow.fx[support].astype(np.float64)
    fy = flow.fy[support].astype(np.float64)
    z = depth.z[support].astype(np.float64)
    magnitude = np.sqrt(fx * fx + fy * fy)
    return FrameMotion(t=float(np.median(z * magnitude)), r=float(np.median(magnitude)))


def sequence_motion(flows: Sequence[FlowField], depths: Sequence[DepthMap]) -> list[FrameMotion]:
    if len(flows) != len(depths):
        raise DimensionMismatch(f"{len(flows)} flow fields but {len(depths)} depth maps")
    return [frame_motion(f, d) for f, d in zip(flows, depths)]


def cumulative_motion(frames: Sequence[FrameMotion]) -> MotionSignature:
    if len(frames) == 0:
        raise EmptySequence("cannot aggregate motion over zero frame intervals")
    t_total = 0.0
    r_total = 0.0
    for fm in frames:
        t_total += fm.t
        r_total += fm.r
    return MotionSignature(t_total, r_total)


def window_motion(frames: Sequence[FrameMotion], start: int, length: int) -> MotionSignature:
    if length < 1 or start < 0 or start + length > len(frames):
        raise OutOfRange(f"window [{start}, {start + length}) outside 0..{len(frames)}")
    return cumulative_motion(frames[start : start + length])
