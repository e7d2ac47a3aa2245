"""Confidence-based adaptive fusing of one motion source and M appearance sources.

Each round compares how decisively every source singles out one candidate.
If motion is at least as confident as every appearance source, its argmin is
the prediction. Otherwise the most confident appearance source names a person
visible in the first-person view; that candidate cannot be the wearer, so it is
dropped from every source and the appearance source is discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from maf.core import APPEARANCE, MOTION, ScoreSource
from maf.errors import PreconditionError, TooFewCandidates

PREDICT = "predict"
ELIMINATE = "eliminate"


def two_smallest(scores: Sequence[float]) -> tuple[float, float]:
    x1 = x2 = math.inf
    for s in scores:
        if s < x1:
            x1, x2 = s, x1
        elif s < x2:
            x2 = s
    return x1, x2


def confidence(src: ScoreSource) -> float:
    """Trust-weighted ratio of the second-smallest to the smallest score.

    A zero minimum with a positive runner-up is an unambiguous match and yields
    ``math.inf``; two zero minima are a plain tie (ratio 1). A source with zero
    trust weight has zero confidence.
    """
    if len(src.scores) < 2:
        raise TooFewCandidates(f"confidence needs >= 2 scores, {src.label} has {len(src.scores)}")
    weight = src.lambda_trust * src.alpha_mask
    if weight == 0:
        return 0.0
    x1, x2 = two_smallest(src.scores)
    if x1 == 0:
        return math.inf if x2 > 0 else weight
    return weight * x2 / x1


def argmin(scores: Sequence[float]) -> int:
    """Position of the smallest score; ties go to the earliest position."""
    best = 0
    for i in range(1, len(scores)):
        if scores[i] < scores[best]:
            best = i
    return best


@dataclass(frozen=True)
class DecisionRecord:
    step: int
    source: str
    confidences: dict[str, float]
    action: str
    candidate: int

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "source": self.source,
            "confidences": {k: _json_float(v) for k, v in self.confidences.items()},
            "action": self.action,
            "candidate": self.candidate,
        }


def _json_float(v: float) -> float | str:
    return "inf" if v == math.inf else v


@dataclass(frozen=True)
class FusionState:
    """Live candidates (original indices, ascending) and the sources scoring them."""

    live_candidates: tuple[int, ...]
    motion: ScoreSource
    appearance: tuple[ScoreSource, ...] = ()
    trace: tuple[DecisionRecord, ...] = field(default=())

    def __post_init__(self) -> None:
        live = tuple(self.live_candidates)
        if not live:
            raise PreconditionError("fusion needs at least one live candidate")
        if list(live) != sorted(set(live)):
            raise PreconditionError("live candidates must be distinct and ascending")
        for src in (self.motion, *self.appearance):
            if len(src.scores) != len(live):
                raise PreconditionError(
                    f"source {src.label} has {len(src.scores)} scores for {len(live)} candidates"
                )
        object.__setattr__(self, "live_candidates", live)
        object.__setattr__(self, "appearance", tuple(self.appearance))
        object.__setattr__(self, "trace", tuple(self.trace))

    @classmethod
    def initial(cls, motion: ScoreSource, appearance: Sequence[ScoreSource] = ()) -> FusionState:
        return cls(tuple(range(len(motion.scores))), motion, tuple(appearance))


def fuse(state: FusionState) -> tuple[int, list[DecisionRecord]]:
    """Run the fusion loop; returns the predicted original index and the trace.

    Motion wins ties against appearance confidence, equal appearance
    confidences resolve to the earlier source, and equal scores resolve to the
    lower candidate index. Terminates after at most M eliminations.
    """
    live = list(state.live_candidates)
    motion = state.motion
    appearance = [(f"{APPEARANCE}:{k}", src) for k, src in enumerate(state.appearance)]
    trace = list(state.trace)
    step = len(trace)

    while True:
        if len(live) == 1:
            trace.append(DecisionRecord(step, "live-set", {}, PREDICT, live[0]))
            return live[0], trace
        conf_motion = confidence(motion)
        confs = {MOTION: conf_motion}
        if not appearance:
            pick = live[argmin(motion.scores)]
            trace.append(DecisionRecord(step, MOTION, confs, PREDICT, pick))
            return pick, trace

        best, best_conf = 0, -math.inf
        for k, (name, src) in enumerate(appearance):
            c = confidence(src)
            confs[name] = c
            if c > best_conf:
                best, best_conf = k, c
        if conf_motion >= best_conf:
            pick = live[argmin(motion.scores)]
            trace.append(DecisionRecord(step, MOTION, confs, PREDICT, pick))
            return pick, trace

        name, chosen = appearance.pop(best)
        pos = argmin(chosen.scores)
        # the single-candidate rule above guarantees len(live) >= 2 here, so an
        # elimination can never empty the live set
        trace.append(DecisionRecord(step, name, confs, ELIMINATE, live[pos]))
        del live[pos]
        motion = motion.without(pos)
        appearance = [(n, src.without(pos)) for n, src in appearance]
        step += 1


def fuse_sources(
    motion: ScoreSource, appearance: Sequence[ScoreSource] = ()
) -> tuple[int, list[DecisionRecord]]:
    return fuse(FusionState.initial(motion, appearance))
