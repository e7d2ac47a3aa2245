import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maf.cbaf import ELIMINATE, PREDICT, FusionState, argmin, confidence, fuse, fuse_sources
from maf.core import ScoreSource
from maf.errors import PreconditionError, TooFewCandidates
from oracles import fuse_reference, reference_confidence


def motion(*scores):
    return ScoreSource("motion", scores)


def app(scores, lam=1.0, alpha=1.0):
    return ScoreSource("appearance", scores, lam, alpha)


def test_confidence_examples():
    assert confidence(motion(1.0, 1.0, 2.0)) == 1.0
    assert confidence(app((0.5, 2.0, 1.0), 0.8, 0.9)) == pytest.approx(1.44, rel=1e-15)
    assert confidence(motion(0.0, 3.0)) == math.inf
    assert confidence(app((0.0, 0.0, 1.0), 0.5, 0.5)) == 0.25
    assert confidence(app((1.0, 2.0), 0.0, 1.0)) == 0.0
    with pytest.raises(TooFewCandidates):
        confidence(motion(1.0))


def test_argmin_ties_go_low():
    assert argmin([2.0, 1.0, 1.0]) == 1
    assert argmin([0.0, 0.0]) == 0


def test_hand_trace_motion_wins():
    pred, trace = fuse_sources(motion(0.1, 5.0), [app((1.0, 1.1))])
    assert pred == 0
    (rec,) = trace
    assert rec.action == PREDICT and rec.source == "motion"
    assert rec.confidences["motion"] == pytest.approx(50.0)
    assert rec.confidences["appearance:0"] == pytest.approx(1.1)


def test_hand_trace_eliminate_then_motion():
    pred, trace = fuse_sources(motion(0.9, 1.0, 3.0), [app((0.2, 1.5, 1.6))])
    assert pred == 1
    assert [(r.action, r.candidate) for r in trace] == [(ELIMINATE, 0), (PREDICT, 1)]
    assert trace[0].confidences["motion"] == pytest.approx(1.0 / 0.9)
    assert trace[0].confidences["appearance:0"] == pytest.approx(7.5)
    assert list(trace[1].confidences) == ["motion"]


def test_single_candidate():
    pred, trace = fuse_sources(motion(3.0), [app((1.0,)), app((2.0,))])
    assert pred == 0
    assert trace[0].source == "live-set"


def test_eliminations_down_to_survivor():
    # two confident appearance sources remove candidates 0 and 2; motion would pick 0
    pred, trace = fuse_sources(motion(0.0, 0.0, 0.0), [app((0.0, 9.0, 9.0)), app((9.0, 9.0, 0.0))])
    assert pred == 1
    assert [r.action for r in trace] == [ELIMINATE, ELIMINATE, PREDICT]
    assert trace[-1].source == "live-set"


def test_appearance_source_ties_prefer_lower_index():
    pred, trace = fuse_sources(motion(1.0, 1.0, 1.0), [app((9.0, 1.0, 9.0)), app((1.0, 9.0, 9.0))])
    assert trace[0].source == "appearance:0" and trace[0].candidate == 1


def test_trace_json_handles_infinity():
    _, trace = fuse_sources(motion(1.0, 1.0), [app((0.0, 1.0))])
    assert trace[0].to_json()["confidences"]["appearance:0"] == "inf"


def test_state_validation():
    with pytest.raises(PreconditionError):
        FusionState((0, 1), motion(1.0, 2.0, 3.0))
    with pytest.raises(PreconditionError):
        FusionState((1, 0), motion(1.0, 2.0))
    with pytest.raises(PreconditionError):
        FusionState.initial(motion(1.0, 2.0), [app((1.0,))])


def test_partial_state_keeps_original_indices():
    pred, _ = fuse(FusionState((2, 5, 7), motion(3.0, 1.0, 2.0)))
    assert pred == 5


def random_instance(rng, n_max=6, m_max=5):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    grid = rng.random() < 0.3

    def scores():
        if grid:
            return [float(v) for v in rng.choice([0.0, 0.5, 1.0, 2.0], n)]
        return [float(v) for v in rng.uniform(0, 5, n)]

    mot = scores()
    apps = [(scores(), float(rng.choice([0.0, 0.5, 1.0, 2.0])), float(rng.choice([0.0, 0.3, 1.0]))) for _ in range(m)]
    return mot, apps


def run_fuse(mot, apps):
    return fuse_sources(motion(*mot), [app(tuple(s), lam, al) for s, lam, al in apps])


def test_reference_agreement_small_batch():
    rng = np.random.default_rng(0)
    for _ in range(500):
        mot, apps = random_instance(rng)
        assert run_fuse(mot, apps)[0] == fuse_reference(mot, apps)


def test_reference_confidence_agrees():
    rng = np.random.default_rng(1)
    for _ in range(500):
        mot, apps = random_instance(rng)
        if len(mot) < 2:
            continue
        for s, lam, al in apps:
            assert confidence(app(tuple(s), lam, al)) == reference_confidence(s, lam, al)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100))
def test_single_source_scale_invariance(seed, c):
    rng = np.random.default_rng(seed)
    mot, apps = random_instance(rng)
    pred, trace = run_fuse(mot, apps)
    which = int(rng.integers(0, len(apps) + 1))
    if which == len(apps):
        mot = [c * s for s in mot]
    else:
        s, lam, al = apps[which]
        apps[which] = ([c * v for v in s], lam, al)
    pred2, trace2 = run_fuse(mot, apps)
    assert pred2 == pred
    assert [(r.action, r.candidate, r.source) for r in trace2] == [(r.action, r.candidate, r.source) for r in trace]


def test_zero_trust_falls_back_to_motion():
    rng = np.random.default_rng(2)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        mot = [float(v) for v in rng.permutation(n) + 1]
        apps = [(list(rng.uniform(0, 5, n)), 0.0, float(rng.random())) for _ in range(int(rng.integers(1, 4)))]
        assert run_fuse(mot, apps)[0] == int(np.argmin(mot))


def test_prediction_never_eliminated_and_terminates():
    rng = np.random.default_rng(3)
    for _ in range(500):
        mot, apps = random_instance(rng)
        pred, trace = run_fuse(mot, apps)
        eliminated = {r.candidate for r in trace if r.action == ELIMINATE}
        assert pred not in eliminated
        assert len(eliminated) == len(trace) - 1 <= len(apps)
        assert trace[-1].action == PREDICT and trace[-1].candidate == pred


def test_duplicate_source_keeps_first_decision():
    rng = np.random.default_rng(4)
    for _ in range(500):
        mot, apps = random_instance(rng)
        if not apps:
            continue
        k = int(rng.integers(0, len(apps)))
        _, trace = run_fuse(mot, apps)
        _, trace2 = run_fuse(mot, apps + [apps[k]])
        assert (trace2[0].action, trace2[0].candidate) == (trace[0].action, trace[0].candidate)


def test_duplicate_source_can_change_final_prediction():
    # once its twin has removed candidate 0, the copy still singles out
    # candidate 1 strongly enough to beat motion on the reduced set
    mot = [1.0, 1.01, 5.0]
    a = ((0.1, 1.0, 10.0), 1.0, 1.0)
    assert fuse_reference(mot, [a]) == 1
    assert run_fuse(mot, [a])[0] == 1
    assert fuse_reference(mot, [a, a]) == 2
    assert run_fuse(mot, [a, a])[0] == 2
