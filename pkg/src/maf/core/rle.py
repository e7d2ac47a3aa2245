"""COCO-style uncompressed run-length encoding of binary masks.

Runs are counted over the mask in column-major order and alternate
background/foreground, always starting with a (possibly empty) background run.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from maf.errors import RunSumMismatch


def decode_rle(runs: Sequence[int], width: int, height: int) -> np.ndarray:
    """Decode ``runs`` into a ``(height, width)`` boolean mask."""
    counts = np.asarray(runs, dtype=np.int64)
    if counts.ndim != 1 or (counts < 0).any():
        raise RunSumMismatch("runs must be a flat list of non-negative counts")
    if int(counts.sum()) != width * height:
        raise RunSumMismatch(f"runs sum to {int(counts.sum())}, expected {width * height}")
    values = np.arange(counts.size) % 2 == 1
    flat = np.repeat(values, counts)
    return flat.reshape((height, width), order="F")


def encode_rle(mask: np.ndarray) -> list[int]:
    flat = np.asarray(mask, dtype=bool).ravel(order="F")
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return runs
