import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maf.core import DepthMap, FlowField, MotionSignature
from maf.ego_motion import (
    FrameMotion,
    cumulative_motion,
    frame_motion,
    sequence_motion,
    window_motion,
)
from maf.errors import DimensionMismatch, EmptySequence, NoValidPixels, OutOfRange
from oracles import naive_frame_motion


def uniform(shape, fx, fy, z):
    return FlowField(np.full(shape, fx), np.full(shape, fy)), DepthMap(np.full(shape, z))


def test_zero_flow():
    rng = np.random.default_rng(0)
    fm = frame_motion(FlowField(np.zeros((4, 5)), np.zeros((4, 5))), DepthMap(rng.uniform(1, 9, (4, 5))))
    assert (fm.t, fm.r) == (0.0, 0.0)


def test_uniform_flow_unit_depth():
    fm = frame_motion(*uniform((3, 3), 3.0, 4.0, 1.0))
    assert (fm.t, fm.r) == (5.0, 5.0)


def test_even_count_median_2x2():
    # magnitudes 1, 2, 3, 4 via (0, m) vectors; depth 2 everywhere
    flow = FlowField(np.zeros((2, 2)), np.array([[1.0, 2.0], [3.0, 4.0]]))
    fm = frame_motion(flow, DepthMap(np.full((2, 2), 2.0)))
    t_ref, r_ref = naive_frame_motion(flow.fx, flow.fy, np.full((2, 2), 2.0), flow.valid, flow.valid)
    assert (t_ref, r_ref) == (5.0, 2.5)
    assert (fm.t, fm.r) == (5.0, 2.5)


def test_invalid_pixels_excluded_from_both_medians():
    fy = np.array([[1.0, 2.0, 100.0]])
    flow = FlowField(np.zeros((1, 3)), fy)
    depth = DepthMap(np.array([[1.0, 1.0, 1.0]]), np.array([[True, True, False]]))
    fm = frame_motion(flow, depth)
    assert (fm.t, fm.r) == (1.5, 1.5)
    flow = FlowField(np.zeros((1, 3)), fy, np.array([[False, True, True]]))
    fm = frame_motion(flow, DepthMap(np.ones((1, 3))))
    assert fm.r == 51.0


def test_dimension_mismatch():
    flow, _ = uniform((2, 2), 1, 1, 1)
    with pytest.raises(DimensionMismatch):
        frame_motion(flow, DepthMap(np.ones((2, 3))))


def test_no_valid_pixels():
    flow = FlowField(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2), bool))
    with pytest.raises(NoValidPixels):
        frame_motion(flow, DepthMap(np.ones((2, 2))))


def test_matches_naive_oracle_random():
    rng = np.random.default_rng(3)
    for _ in range(50):
        h, w = rng.integers(1, 20, size=2)
        fx, fy = rng.normal(0, 5, (h, w)), rng.normal(0, 5, (h, w))
        z = rng.uniform(0.1, 30, (h, w))
        vf = rng.random((h, w)) > 0.1
        vd = rng.random((h, w)) > 0.1
        vf[0, 0] = vd[0, 0] = True
        fm = frame_motion(FlowField(fx, fy, vf), DepthMap(z, vd))
        t_ref, r_ref = naive_frame_motion(fx, fy, z, vf, vd)
        assert fm.t == pytest.approx(t_ref, rel=1e-12)
        assert fm.r == pytest.approx(r_ref, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.floats(0.01, 100))
def test_scaling_laws(seed, k):
    rng = np.random.default_rng(seed)
    fx, fy = rng.normal(size=(6, 7)), rng.normal(size=(6, 7))
    z = rng.uniform(1, 5, (6, 7))
    base = frame_motion(FlowField(fx, fy), DepthMap(z))
    deeper = frame_motion(FlowField(fx, fy), DepthMap(k * z))
    assert deeper.t == pytest.approx(k * base.t, rel=1e-12)
    assert deeper.r == base.r
    faster = frame_motion(FlowField(k * fx, k * fy), DepthMap(z))
    assert faster.t == pytest.approx(k * base.t, rel=1e-12)
    assert faster.r == pytest.approx(k * base.r, rel=1e-12)


def test_pixel_permutation_invariance():
    rng = np.random.default_rng(4)
    fx, fy, z = rng.normal(size=(5, 5)), rng.normal(size=(5, 5)), rng.uniform(1, 3, (5, 5))
    perm = rng.permutation(25)
    a = frame_motion(FlowField(fx, fy), DepthMap(z))
    b = frame_motion(
        FlowField(fx.ravel()[perm].reshape(5, 5), fy.ravel()[perm].reshape(5, 5)),
        DepthMap(z.ravel()[perm].reshape(5, 5)),
    )
    assert a == b


def test_cumulative_examples():
    assert cumulative_motion([FrameMotion(5.0, 5.0)]) == MotionSignature(5.0, 5.0)
    assert cumulative_motion([FrameMotion(1, 2), FrameMotion(3, 4), FrameMotion(5, 6)]) == MotionSignature(9, 12)


def test_cumulative_empty():
    with pytest.raises(EmptySequence):
        cumulative_motion([])


def test_cumulative_matches_fold_oracle():
    rng = np.random.default_rng(5)
    frames = [FrameMotion(*rng.uniform(0, 10, 2)) for _ in range(50)]
    t_acc = r_acc = 0.0
    for fm in frames:
        t_acc = t_acc + fm.t
        r_acc = r_acc + fm.r
    sig = cumulative_motion(frames)
    assert sig.t_total == pytest.approx(t_acc, rel=1e-15)
    assert sig.r_total == pytest.approx(r_acc, rel=1e-15)


def test_window_full_and_halves():
    rng = np.random.default_rng(6)
    frames = [FrameMotion(*rng.uniform(0, 10, 2)) for _ in range(12)]
    full = cumulative_motion(frames)
    assert window_motion(frames, 0, 12) == full
    a, b = window_motion(frames, 0, 6), window_motion(frames, 6, 6)
    assert a.t_total + b.t_total == pytest.approx(full.t_total, rel=1e-14)
    assert a.r_total + b.r_total == pytest.approx(full.r_total, rel=1e-14)


def test_window_random_matches_slice_oracle():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 30))
        frames = [FrameMotion(*rng.uniform(0, 10, 2)) for _ in range(n)]
        start = int(rng.integers(0, n))
        length = int(rng.integers(1, n - start + 1))
        sub = frames[start : start + length]
        sig = window_motion(frames, start, length)
        assert sig.t_total == pytest.approx(sum(f.t for f in sub), rel=1e-14)
        assert sig.r_total == pytest.approx(sum(f.r for f in sub), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=1, max_size=20), st.data())
def test_partition_additivity(pairs, data):
    frames = [FrameMotion(t, r) for t, r in pairs]
    cuts = sorted(set(data.draw(st.lists(st.integers(1, len(frames)), max_size=5)) + [len(frames)]))
    total_t = total_r = 0.0
    start = 0
    for c in cuts:
        w = window_motion(frames, start, c - start)
        total_t += w.t_total
        total_r += w.r_total
        start = c
    full = cumulative_motion(frames)
    assert total_t == pytest.approx(full.t_total, rel=1e-12, abs=1e-12)
    assert total_r == pytest.approx(full.r_total, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("start,length", [(0, 0), (-1, 2), (3, 2), (0, 5)])
def test_window_out_of_range(start, length):
    frames = [FrameMotion(1, 1)] * 4
    with pytest.raises(OutOfRange):
        window_motion(frames, start, length)


def test_sequence_motion_length_check():
    flow, depth = uniform((2, 2), 1, 0, 1)
    with pytest.raises(DimensionMismatch):
        sequence_motion([flow, flow], [depth])
