"""Synthetic pinhole-camera scenes with known ego motion.

Flow is rendered with the instantaneous (first-order) motion-field equations,
so every quantity downstream has a closed-form ground truth. Randomness is
drawn from generators keyed on ``(seed, purpose, index)`` which keeps parallel
and serial runs bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from maf.appearance import selected_frame_set
from maf.core import (
    DepthMap,
    Detection,
    Embedding,
    FlowField,
    MaskSequence,
    MotionSignature,
    QueryInstance,
    encode_rle,
)
from maf.ego_motion import cumulative_motion, sequence_motion, window_motion
from maf.errors import PreconditionError
from maf.motion_match import (
    MotionPrediction,
    WindowPrediction,
    WindowSpec,
    make_windows,
)

MAX_ROTATION_RATE = 0.2

# generator stream tags
_DEPTH, _TRAJ, _LAYOUT, _EMBED, _DETECT, _NOISE, _DISTRACT = range(7)


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in key])


@dataclass(frozen=True)
class CameraIntrinsics:
    f: float = 40.0
    cx: float = 15.5
    cy: float = 11.5
    width: int = 32
    height: int = 24

    def __post_init__(self) -> None:
        if not self.f > 0:
            raise PreconditionError(f"focal length must be > 0, got {self.f}")
        if self.width < 1 or self.height < 1:
            raise PreconditionError("resolution must be at least 1x1")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise PreconditionError(
                f"principal point ({self.cx}, {self.cy}) outside {self.width}x{self.height}"
            )


@dataclass(frozen=True)
class MotionStep:
    """Camera translation (scene units/frame) and rotation rates (rad/frame)."""

    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        t = tuple(float(v) for v in self.translation)
        w = tuple(float(v) for v in self.rotation)
        if len(t) != 3 or len(w) != 3:
            raise PreconditionError("translation and rotation need three components each")
        if not all(math.isfinite(v) for v in t + w):
            raise PreconditionError("motion components must be finite")
        if math.sqrt(sum(v * v for v in w)) > MAX_ROTATION_RATE:
            raise PreconditionError(
                f"rotation rate {w} exceeds the small-angle limit {MAX_ROTATION_RATE} rad/frame"
            )
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "rotation", w)

    def scaled(self, k: float) -> MotionStep:
        return MotionStep(
            tuple(k * v for v in self.translation), tuple(k * v for v in self.rotation)
        )


@dataclass(frozen=True)
class ConstantDepth:
    z: float = 4.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.z) and self.z > 0):
            raise PreconditionError(f"plane depth must be > 0, got {self.z}")

    def raster(self, shape: tuple[int, int], seed: int, step: int) -> np.ndarray:
        return np.full(shape, self.z, dtype=np.float64)

    def scaled(self, k: float) -> ConstantDepth:
        return ConstantDepth(self.z * k)


@dataclass(frozen=True)
class RandomDepth:
    """Independent per-pixel depths, uniform in ``[z_min, z_max]``, redrawn every step."""

    z_min: float = 1.0
    z_max: float = 10.0

    def __post_init__(self) -> None:
        if not (0 < self.z_min <= self.z_max and math.isfinite(self.z_max)):
            raise PreconditionError(f"need 0 < z_min <= z_max, got {self.z_min}, {self.z_max}")

    def raster(self, shape: tuple[int, int], seed: int, step: int) -> np.ndarray:
        return _rng(seed, _DEPTH, step).uniform(self.z_min, self.z_max, size=shape)

    def scaled(self, k: float) -> RandomDepth:
        return RandomDepth(self.z_min * k, self.z_max * k)


@dataclass(frozen=True)
class SceneSpec:
    trajectory: tuple[MotionStep, ...]
    intrinsics: CameraIntrinsics = field(default_factory=CameraIntrinsics)
    depth: ConstantDepth | RandomDepth = field(default_factory=RandomDepth)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "trajectory", tuple(self.trajectory))
        if not self.trajectory:
            raise PreconditionError("a scene needs at least one motion step")

    @property
    def sequence_length(self) -> int:
        return len(self.trajectory) + 1

    def with_depth_scale(self, k: float) -> SceneSpec:
        return replace(self, depth=self.depth.scaled(k))


def motion_field(
    intrinsics: CameraIntrinsics, step: MotionStep, z: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous image motion for camera motion ``step`` over depth raster ``z``."""
    f = intrinsics.f
    ys, xs = np.mgrid[0 : intrinsics.height, 0 : intrinsics.width].astype(np.float64)
    x = xs - intrinsics.cx
    y = ys - intrinsics.cy
    tx, ty, tz = step.translation
    wx, wy, wz = step.rotation
    fx = (x * tz - f * tx) / z + (x * y * wx / f - (f + x * x / f) * wy + y * wz)
    fy = (y * tz - f * ty) / z + ((f + y * y / f) * wx - x * y * wy - x * wz)
    return fx, fy


def render_flow(scene: SceneSpec, step_index: int) -> tuple[FlowField, DepthMap]:
    if not 0 <= step_index < len(scene.trajectory):
        raise PreconditionError(f"step {step_index} outside trajectory of {len(scene.trajectory)}")
    cam = scene.intrinsics
    z = scene.depth.raster((cam.height, cam.width), scene.seed, step_index)
    fx, fy = motion_field(cam, scene.trajectory[step_index], z)
    return FlowField(fx, fy), DepthMap(z)


def render_sequence(scene: SceneSpec) -> tuple[list[FlowField], list[DepthMap]]:
    pairs = [render_flow(scene, i) for i in range(len(scene.trajectory))]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def random_trajectory(
    n_steps: int,
    seed: int,
    translation_sigma: float = 0.05,
    rotation_sigma: float = 0.01,
) -> tuple[MotionStep, ...]:
    """A drifting random walk: one per-trajectory velocity plus per-step jitter."""
    rng = _rng(seed, _TRAJ)
    drift_t = rng.normal(0.0, translation_sigma, size=3)
    drift_w = rng.normal(0.0, rotation_sigma, size=3)
    steps = []
    for _ in range(n_steps):
        t = drift_t + rng.normal(0.0, translation_sigma, size=3)
        w = np.clip(drift_w + rng.normal(0.0, rotation_sigma, size=3), -0.04, 0.04)
        steps.append(MotionStep(tuple(t.tolist()), tuple(w.tolist())))
    return tuple(steps)


@dataclass(frozen=True)
class DistractorSpec:
    """How a distractor's (hidden) trajectory relates to the wearer's.

    With ``independent`` the base trajectory is freshly drawn from ``seed``;
    otherwise it is the wearer's own. Scale, time shift and a swap of the
    x/y rotation axes are then applied in that order.
    """

    seed: int
    independent: bool = True
    scale: float = 1.0
    time_shift: int = 0
    swap_rotation: bool = False

    @classmethod
    def clone(cls, seed: int) -> DistractorSpec:
        return cls(seed, independent=False)


def distractor_trajectory(
    wearer: Sequence[MotionStep], spec: DistractorSpec
) -> tuple[MotionStep, ...]:
    base = list(random_trajectory(len(wearer), spec.seed) if spec.independent else wearer)
    if spec.scale != 1.0:
        base = [s.scaled(spec.scale) for s in base]
    if spec.time_shift:
        k = spec.time_shift % len(base)
        base = base[-k:] + base[:-k] if k else base
    if spec.swap_rotation:
        base = [MotionStep(s.translation, (s.rotation[1], s.rotation[0], s.rotation[2])) for s in base]
    return tuple(base)


def distractor_scene(scene: SceneSpec, spec: DistractorSpec) -> SceneSpec:
    # derived distractors move through the wearer's own scene; independent ones get their own
    seed = spec.seed if spec.independent else scene.seed
    return replace(scene, trajectory=distractor_trajectory(scene.trajectory, spec), seed=seed)


def window_signatures(scene: SceneSpec, spec: WindowSpec) -> list[tuple[int, int, MotionSignature]]:
    flows, depths = render_sequence(scene)
    frames = sequence_motion(flows, depths)
    return [(s, n, window_motion(frames, s, n)) for s, n in make_windows(len(frames), spec)]


def _prediction(candidate_id: str, windows) -> MotionPrediction:
    return MotionPrediction(candidate_id, tuple(WindowPrediction(s, n, sig) for s, n, sig in windows))


def oracle_predictions(
    scene: SceneSpec,
    spec: WindowSpec = WindowSpec(),
    distractors: Sequence[DistractorSpec] = (),
    candidate_ids: Sequence[str] | None = None,
) -> list[MotionPrediction]:
    """Exact motion predictions: the wearer first, then one per distractor.

    The wearer's windows come from the very rasters the ego view is built from,
    so it scores exactly zero; each distractor is rendered from its own scene.
    """
    ids = list(candidate_ids) if candidate_ids is not None else (
        ["wearer"] + [f"distractor-{k}" for k in range(len(distractors))]
    )
    if len(ids) != 1 + len(distractors):
        raise PreconditionError(f"{len(ids)} candidate ids for {1 + len(distractors)} people")
    preds = [_prediction(ids[0], window_signatures(scene, spec))]
    for cid, d in zip(ids[1:], distractors):
        preds.append(_prediction(cid, window_signatures(distractor_scene(scene, d), spec)))
    return preds


def perturb_prediction(
    pred: MotionPrediction, sigma: float, reference: MotionSignature, rng: np.random.Generator
) -> MotionPrediction:
    """Add Gaussian noise with standard deviation ``sigma`` times the reference signature.

    Negative results are clipped to zero since motion magnitudes cannot be negative.
    """
    windows = []
    for w in pred.windows:
        z_t, z_r = rng.standard_normal(2)
        t = max(0.0, w.signature.t_total + sigma * reference.t_total * z_t)
        r = max(0.0, w.signature.r_total + sigma * reference.r_total * z_r)
        windows.append(WindowPrediction(w.start, w.length, MotionSignature(t, r)))
    return MotionPrediction(pred.candidate_id, tuple(windows))


@dataclass(frozen=True)
class QueryKnobs:
    """Difficulty controls for :func:`make_query`.

    ``clones`` distractors replay the wearer's trajectory exactly, so motion
    alone cannot separate them; ``detect_clones`` guarantees each clone shows
    up in the ego view at least once so appearance elimination can.
    """

    clones: int = 0
    detect_clones: bool = True
    perturb: bool = False
    scale: float = 1.0
    time_shift: int = 0
    swap_rotation: bool = False
    detection_rate: float = 0.5
    alpha_range: tuple[float, float] = (0.6, 1.0)
    embedding_dim: int = 16
    embedding_noise: float = 0.0
    prediction_noise: float = 0.0
    occlusion_rate: float = 0.0
    mask_width: int = 64
    mask_height: int = 48

    def __post_init__(self) -> None:
        if self.clones < 0:
            raise PreconditionError("clones must be >= 0")
        if not 0 <= self.detection_rate <= 1 or not 0 <= self.occlusion_rate < 1:
            raise PreconditionError("detection_rate must lie in [0, 1] and occlusion_rate in [0, 1)")
        lo, hi = self.alpha_range
        if not 0 <= lo <= hi <= 1:
            raise PreconditionError(f"alpha_range must satisfy 0 <= lo <= hi <= 1, got {self.alpha_range}")
        if self.embedding_dim < 1 or self.embedding_noise < 0 or self.prediction_noise < 0:
            raise PreconditionError("embedding_dim must be >= 1 and noise scales >= 0")


def default_scene(seed: int, sequence_length: int = 17, depth=None) -> SceneSpec:
    if sequence_length < 2:
        raise PreconditionError(f"sequence length must be >= 2, got {sequence_length}")
    return SceneSpec(
        trajectory=random_trajectory(sequence_length - 1, seed),
        depth=RandomDepth() if depth is None else depth,
        seed=seed,
    )


def _box_masks(slot: int, t: int, knobs: QueryKnobs, visible: np.ndarray) -> list:
    w, h = knobs.mask_width, knobs.mask_height
    box_w, box_h = max(1, w // 8), max(1, h // 2)
    frames = []
    for i in range(t):
        if not visible[i]:
            frames.append(None)
            continue
        x0 = (slot * (box_w + 2) + i) % max(1, w - box_w + 1)
        y0 = (h - box_h) // 2
        mask = np.zeros((h, w), dtype=bool)
        mask[y0 : y0 + box_h, x0 : x0 + box_w] = True
        frames.append(tuple(encode_rle(mask)))
    return frames


def make_query(
    scene: SceneSpec,
    n_distractors: int = 3,
    knobs: QueryKnobs = QueryKnobs(),
    seed: int = 0,
    spec: WindowSpec = WindowSpec(),
    candidate_ids: Sequence[str] | None = None,
    sequence_id: str = "",
) -> QueryInstance:
    """Assemble a complete query with known ground truth.

    People are the wearer plus ``n_distractors``; their order among the
    candidates is a seeded shuffle. Non-wearers may be detected in the selected
    ego frames; the wearer never is.
    """
    if n_distractors < 0:
        raise PreconditionError(f"n_distractors must be >= 0, got {n_distractors}")
    if knobs.clones > n_distractors:
        raise PreconditionError(f"{knobs.clones} clones requested but only {n_distractors} distractors")
    n = n_distractors + 1
    t = scene.sequence_length
    if candidate_ids is not None and len(candidate_ids) != n:
        raise PreconditionError(f"{len(candidate_ids)} candidate ids for {n} candidates")

    distractors = []
    for k in range(n_distractors):
        d_seed = int(_rng(seed, _DISTRACT, k).integers(2**31))
        if k < knobs.clones:
            distractors.append(DistractorSpec.clone(d_seed))
        else:
            distractors.append(
                DistractorSpec(
                    d_seed,
                    independent=not knobs.perturb,
                    scale=knobs.scale,
                    time_shift=knobs.time_shift,
                    swap_rotation=knobs.swap_rotation,
                )
            )

    # person p sits at candidate slot order[p]; person 0 is the wearer
    layout = _rng(seed, _LAYOUT)
    order = layout.permutation(n)
    ids = list(candidate_ids) if candidate_ids is not None else [f"c{i}" for i in range(n)]
    person_ids = [ids[order[p]] for p in range(n)]

    flows, depths = render_sequence(scene)
    person_preds = oracle_predictions(scene, spec, distractors, person_ids)

    embed = _rng(seed, _EMBED)
    centers = embed.standard_normal((n, knobs.embedding_dim))
    person_embeddings = []
    person_masks = []
    for p in range(n):
        visible = embed.random(t) >= knobs.occlusion_rate
        if not visible.any():
            visible[0] = True
        frames = {}
        for i in np.flatnonzero(visible):
            jitter = knobs.embedding_noise * embed.standard_normal(knobs.embedding_dim)
            frames[int(i)] = Embedding(centers[p] + jitter)
        person_embeddings.append(frames)
        person_masks.append(
            MaskSequence(person_ids[p], knobs.mask_width, knobs.mask_height,
                         _box_masks(int(order[p]), t, knobs, visible))
        )

    detect = _rng(seed, _DETECT)
    lo, hi = knobs.alpha_range
    detections = []
    seen = set()
    for frame in selected_frame_set(t):
        for p in range(1, n):
            if detect.random() < knobs.detection_rate:
                jitter = knobs.embedding_noise * detect.standard_normal(knobs.embedding_dim)
                detections.append(Detection(frame, Embedding(centers[p] + jitter), float(detect.uniform(lo, hi))))
                seen.add(p)
    if knobs.detect_clones:
        for p in range(1, 1 + knobs.clones):
            if p not in seen:
                jitter = knobs.embedding_noise * detect.standard_normal(knobs.embedding_dim)
                detections.append(Detection(0, Embedding(centers[p] + jitter), float(detect.uniform(lo, hi))))

    slot_to_person = np.argsort(order)
    query = QueryInstance(
        sequence_length=t,
        ego_flow=tuple(flows),
        ego_depth=tuple(depths),
        candidates=tuple(person_masks[p] for p in slot_to_person),
        candidate_motion_predictions=tuple(person_preds[p] for p in slot_to_person),
        candidate_embeddings=tuple(person_embeddings[p] for p in slot_to_person),
        ego_detections=tuple(detections),
        ground_truth=int(order[0]),
        sequence_id=sequence_id,
    )
    if knobs.prediction_noise > 0:
        query = with_prediction_noise(query, knobs.prediction_noise, seed)
    return query


def with_prediction_noise(query: QueryInstance, sigma: float, seed: int) -> QueryInstance:
    """Copy of ``query`` whose motion predictions carry relative Gaussian noise.

    The noise draws depend only on ``seed``, so sweeping ``sigma`` over one
    query scales a single fixed noise realisation.
    """
    ego_full = cumulative_motion(sequence_motion(query.ego_flow, query.ego_depth))
    rng = _rng(seed, _NOISE)
    preds = tuple(
        perturb_prediction(p, sigma, ego_full, rng) for p in query.candidate_motion_predictions
    )
    return replace(query, candidate_motion_predictions=preds)
