"""End-to-end identification of the camera wearer for one query."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from maf.appearance import AppearanceConfig, build_sources
from maf.cbaf import DecisionRecord, FusionState, fuse
from maf.core import QueryInstance, ScoreSource
from maf.core.domain import as_embedding_lists
from maf.ego_motion import sequence_motion
from maf.motion_match import NormalizationMode, WindowSpec, rank_candidates


@dataclass(frozen=True)
class PipelineConfig:
    window: WindowSpec = field(default_factory=WindowSpec)
    norm: NormalizationMode = NormalizationMode.EGO_SCALE
    lambda_trust: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "norm", NormalizationMode(self.norm))
        AppearanceConfig(self.lambda_trust)

    def to_json(self) -> dict:
        d = asdict(self)
        d["norm"] = self.norm.value
        return d


@dataclass(frozen=True)
class Identification:
    predicted: int
    candidate_id: str
    motion: ScoreSource
    appearance: tuple[ScoreSource, ...]
    trace: tuple[DecisionRecord, ...]

    def trace_json(self) -> list[dict]:
        return [r.to_json() for r in self.trace]


def identify(query: QueryInstance, cfg: PipelineConfig = PipelineConfig()) -> Identification:
    ego = sequence_motion(query.ego_flow, query.ego_depth)
    motion = rank_candidates(ego, query.candidate_motion_predictions, cfg.window, cfg.norm)
    appearance = build_sources(
        query.ego_detections, as_embedding_lists(query), AppearanceConfig(cfg.lambda_trust)
    )
    predicted, trace = fuse(FusionState.initial(motion, appearance))
    return Identification(
        predicted,
        query.candidates[predicted].candidate_id,
        motion,
        tuple(appearance),
        tuple(trace),
    )
