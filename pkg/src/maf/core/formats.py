"""Readers and writers for Middlebury ``.flo`` flow and grayscale PFM depth."""

from __future__ import annotations

import os
import struct

import numpy as np

from maf.core.domain import DepthMap, FlowField, depth_known, flow_known
from maf.errors import (
    ArtifactMissing,
    BadHeader,
    BadMagic,
    NonPositiveDims,
    TrailingData,
    TruncatedFile,
)

FLO_MAGIC = 202021.25
FLO_MAGIC_BYTES = struct.pack("<f", FLO_MAGIC)
UNKNOWN_FLOW = 1e10


def _read_bytes(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except FileNotFoundError:
        raise ArtifactMissing("file not found", path) from None
    except IsADirectoryError:
        raise ArtifactMissing("expected a file, found a directory", path) from None


def parse_flow(data: bytes, path=None) -> FlowField:
    if len(data) < 4:
        raise TruncatedFile("missing .flo magic", path)
    if data[:4] != FLO_MAGIC_BYTES:
        (magic,) = struct.unpack("<f", data[:4])
        raise BadMagic(f"bad .flo magic {magic!r}, expected {FLO_MAGIC}", path)
    if len(data) < 12:
        raise TruncatedFile("missing .flo dimensions", path)
    w, h = struct.unpack("<ii", data[4:12])
    if w <= 0 or h <= 0:
        raise NonPositiveDims(f"non-positive dimensions {w}x{h}", path)
    expected = 12 + 8 * w * h
    if len(data) < expected:
        raise TruncatedFile(f"payload has {len(data) - 12} bytes, expected {expected - 12}", path)
    if len(data) > expected:
        raise TrailingData(f"{len(data) - expected} unexpected bytes after payload", path)
    payload = np.frombuffer(data, dtype="<f4", count=2 * w * h, offset=12).reshape(h, w, 2)
    fx = payload[:, :, 0].astype(np.float32)
    fy = payload[:, :, 1].astype(np.float32)
    return FlowField(fx, fy, flow_known(fx, fy))


def read_flow(path) -> FlowField:
    """Read a Middlebury ``.flo`` file.

    Pixels whose components are non-finite or exceed 1e9 in magnitude are
    marked invalid; their raw values are kept so the file rewrites unchanged.
    """
    return parse_flow(_read_bytes(path), path)


def encode_flow(flow: FlowField) -> bytes:
    fx = np.asarray(flow.fx, dtype=np.float32).copy()
    fy = np.asarray(flow.fy, dtype=np.float32).copy()
    # invalid pixels that would otherwise read back as valid get the sentinel
    relabel = ~flow.valid & flow_known(fx, fy)
    fx[relabel] = UNKNOWN_FLOW
    fy[relabel] = UNKNOWN_FLOW
    payload = np.stack([fx, fy], axis=-1).astype("<f4")
    return FLO_MAGIC_BYTES + struct.pack("<ii", flow.width, flow.height) + payload.tobytes()


def write_flow(path, flow: FlowField) -> None:
    _write_atomic(path, encode_flow(flow))


def _next_line(data: bytes, pos: int, path) -> tuple[str, int]:
    end = data.find(b"\n", pos)
    if end < 0:
        raise BadHeader("unterminated PFM header line", path)
    try:
        return data[pos:end].decode("ascii").strip(), end + 1
    except UnicodeDecodeError:
        raise BadHeader("non-ASCII PFM header", path) from None


def parse_depth(data: bytes, path=None) -> DepthMap:
    tag, pos = _next_line(data, 0, path)
    if tag != "Pf":
        if tag == "PF":
            raise BadHeader("colour PFM where a single-channel depth map was expected", path)
        raise BadHeader(f"expected 'Pf' header, got {tag[:16]!r}", path)
    dims, pos = _next_line(data, pos, path)
    parts = dims.split()
    try:
        if len(parts) != 2:
            raise ValueError
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise BadHeader(f"malformed PFM dimensions {dims[:32]!r}", path) from None
    if w <= 0 or h <= 0:
        raise BadHeader(f"non-positive PFM dimensions {w}x{h}", path)
    scale_text, pos = _next_line(data, pos, path)
    try:
        scale = float(scale_text)
    except ValueError:
        raise BadHeader(f"malformed PFM scale {scale_text[:32]!r}", path) from None
    if scale == 0 or not np.isfinite(scale):
        raise BadHeader(f"PFM scale must be finite and non-zero, got {scale_text!r}", path)
    endian = "<" if scale < 0 else ">"
    expected = pos + 4 * w * h
    if len(data) < expected:
        raise TruncatedFile(f"PFM raster has {len(data) - pos} bytes, expected {4 * w * h}", path)
    if len(data) > expected:
        raise TrailingData(f"{len(data) - expected} unexpected bytes after raster", path)
    raster = np.frombuffer(data, dtype=endian + "f4", count=w * h, offset=pos).reshape(h, w)
    # PFM rows run bottom-to-top
    z = np.flipud(raster).astype(np.float32)
    return DepthMap(z, depth_known(z))


def read_depth(path) -> DepthMap:
    """Read a grayscale PFM depth map; non-positive or non-finite samples are invalid."""
    return parse_depth(_read_bytes(path), path)


def encode_depth(depth: DepthMap) -> bytes:
    z = np.asarray(depth.z, dtype=np.float32).copy()
    z[~depth.valid & depth_known(z)] = 0.0
    header = b"Pf\n%d %d\n-1.0\n" % (depth.width, depth.height)
    return header + np.flipud(z).astype("<f4").tobytes()


def write_depth(path, depth: DepthMap) -> None:
    _write_atomic(path, encode_depth(depth))


def _write_atomic(path, data: bytes) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
