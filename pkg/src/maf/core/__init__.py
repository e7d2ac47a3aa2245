from maf.core.domain import (
    APPEARANCE,
    MOTION,
    DepthMap,
    Detection,
    Embedding,
    FlowField,
    MaskSequence,
    MotionSignature,
    QueryInstance,
    ScoreSource,
)
from maf.core.formats import (
    encode_depth,
    encode_flow,
    parse_depth,
    parse_flow,
    read_depth,
    read_flow,
    write_depth,
    write_flow,
)
from maf.core.rle import decode_rle, encode_rle

__all__ = [
    "APPEARANCE",
    "MOTION",
    "DepthMap",
    "Detection",
    "Embedding",
    "FlowField",
    "MaskSequence",
    "MotionSignature",
    "QueryInstance",
    "ScoreSource",
    "decode_rle",
    "encode_depth",
    "encode_flow",
    "encode_rle",
    "parse_depth",
    "parse_flow",
    "read_depth",
    "read_flow",
    "write_depth",
    "write_flow",
]
