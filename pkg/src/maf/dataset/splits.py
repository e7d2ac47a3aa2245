"""Train/test split generators.

``seen``
    Temporal split inside each video: the first 80% of its sequences train.
``unseen``
    Whole videos go to one side so no camera wearer appears on both.
``cross_dataset``
    Train on TF2023 and IUShareView, test on Ego4D-TF.
``all``
    Everything is test data; useful for evaluating synthetic benchmarks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from maf.dataset.manifest import EGO4D_TF, IUSHAREVIEW, TF2023, DatasetManifest, SequenceEntry
from maf.errors import EmptySide, InfeasiblePartition, PreconditionError, UnorderedVideo

TRAIN_FRACTION_NUM, TRAIN_FRACTION_DEN = 4, 5


@dataclass(frozen=True)
class SplitAssignment:
    name: str
    train: tuple[str, ...]
    test: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "train", tuple(self.train))
        object.__setattr__(self, "test", tuple(self.test))
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise PreconditionError(f"split {self.name!r} puts {sorted(overlap)} on both sides")

    def to_json(self) -> dict:
        return {"split": self.name, "train": list(self.train), "test": list(self.test)}


def _train_count(n: int) -> int:
    # ceil(0.8 n) in exact integer arithmetic
    return (TRAIN_FRACTION_NUM * n + TRAIN_FRACTION_DEN - 1) // TRAIN_FRACTION_DEN


def _videos(entries) -> dict[str, list[SequenceEntry]]:
    videos: dict[str, list[SequenceEntry]] = defaultdict(list)
    for s in entries:
        videos[s.video_id].append(s)
    return videos


def split_seen(manifest: DatasetManifest) -> SplitAssignment:
    train, test = [], []
    eligible = [s for s in manifest.sequences if s.source_tag != EGO4D_TF]
    for video_id, seqs in _videos(eligible).items():
        orders = [s.order for s in seqs]
        if any(o is None for o in orders) or len(set(orders)) != len(orders):
            raise UnorderedVideo(f"video {video_id!r} lacks a strict temporal order over its sequences")
        seqs = sorted(seqs, key=lambda s: s.order)
        k = _train_count(len(seqs))
        train.extend(s.sequence_id for s in seqs[:k])
        test.extend(s.sequence_id for s in seqs[k:])
    return SplitAssignment("seen", train, test)


def _wearer_components(videos: dict[str, list[SequenceEntry]]) -> list[list[str]]:
    parent = {v: v for v in videos}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    owner: dict[str, str] = {}
    for video_id, seqs in videos.items():
        for s in seqs:
            other = owner.setdefault(s.wearer_id, video_id)
            a, b = find(other), find(video_id)
            if a != b:
                parent[b] = a
    groups: dict[str, list[str]] = defaultdict(list)
    for v in videos:
        groups[find(v)].append(v)
    return [sorted(g) for g in groups.values()]


def split_unseen(manifest: DatasetManifest, seed: int = 0) -> SplitAssignment:
    """Video-level split with disjoint camera-wearer sets on the two sides.

    Videos sharing any wearer are merged into one component; components are
    assigned greedily (largest first, seeded order among equal sizes) so the
    test side lands as close as possible to 20% of the sequences.
    """
    eligible = [s for s in manifest.sequences if s.source_tag != EGO4D_TF]
    videos = _videos(eligible)
    components = sorted(_wearer_components(videos))
    if len(components) < 2:
        raise InfeasiblePartition(
            "all videos are linked by shared camera wearers; no wearer-disjoint split exists"
        )
    sizes = [sum(len(videos[v]) for v in comp) for comp in components]
    tiebreak = np.random.default_rng(seed).permutation(len(components))
    ranked = sorted(range(len(components)), key=lambda i: (-sizes[i], tiebreak[i]))
    target = sum(sizes) * (TRAIN_FRACTION_DEN - TRAIN_FRACTION_NUM) / TRAIN_FRACTION_DEN

    test_ids: list[int] = []
    n_test = 0
    for i in ranked:
        if abs(n_test + sizes[i] - target) < abs(n_test - target):
            test_ids.append(i)
            n_test += sizes[i]
    # both sides must be populated
    if not test_ids:
        test_ids.append(ranked[-1])
    elif len(test_ids) == len(components):
        test_ids.remove(ranked[0])

    test_videos = {v for i in test_ids for v in components[i]}
    train, test = [], []
    for video_id, seqs in videos.items():
        side = test if video_id in test_videos else train
        side.extend(s.sequence_id for s in sorted(seqs, key=_order_key))
    return SplitAssignment("unseen", train, test)


def _order_key(s: SequenceEntry):
    return (s.order is None, s.order if s.order is not None else 0, s.sequence_id)


def split_cross_dataset(manifest: DatasetManifest) -> SplitAssignment:
    train = [s.sequence_id for s in manifest.sequences if s.source_tag in (TF2023, IUSHAREVIEW)]
    test = [s.sequence_id for s in manifest.sequences if s.source_tag == EGO4D_TF]
    if not train or not test:
        side = "train" if not train else "test"
        raise EmptySide(f"cross-dataset split has an empty {side} side")
    return SplitAssignment("cross_dataset", train, test)


def split_all(manifest: DatasetManifest) -> SplitAssignment:
    return SplitAssignment("all", (), [s.sequence_id for s in manifest.sequences])


SPLIT_NAMES = ("seen", "unseen", "cross_dataset", "all")


def make_split(manifest: DatasetManifest, name: str, seed: int = 0) -> SplitAssignment:
    if name == "seen":
        return split_seen(manifest)
    if name == "unseen":
        return split_unseen(manifest, seed)
    if name == "cross_dataset":
        return split_cross_dataset(manifest)
    if name == "all":
        return split_all(manifest)
    raise PreconditionError(f"unknown split {name!r}; valid names: {', '.join(SPLIT_NAMES)}")
