"""Renormalization kernel, decoding policies, and session stepping."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolgate.engine import (
    DecodeSession,
    Greedy,
    Temperature,
    TopK,
    accepts,
    make_policy,
    mask_distribution,
    run_to_completion,
    step,
)
from toolgate.errors import SessionFinished, StepLimitExceeded, ZeroMassSupport
from toolgate.fsm.tokenfsm import mask_contains, pack_mask
from toolgate.oracle import Verdict, validate_session_text
from toolgate.stubs import RandomLogit, ScriptedStub
from toolgate.vocab import detokenize, tokenize_greedy


def dist(*ps):
    return np.asarray(ps, dtype=np.float64)


def all_mask(n):
    return pack_mask(list(range(n)), n)


def test_mask_distribution_worked_example():
    p = dist(0.5, 0.3, 0.2)
    out = mask_distribution(p, pack_mask([0, 2], 3))
    np.testing.assert_allclose(out, [5 / 7, 0.0, 2 / 7], atol=1e-12)


def test_mask_distribution_uniform_pair():
    p = np.full(8, 1 / 8)
    out = mask_distribution(p, pack_mask([1, 6], 8))
    np.testing.assert_allclose(out, [0, .5, 0, 0, 0, 0, .5, 0], atol=1e-12)


def test_mask_all_ones_is_identity():
    p = dist(0.25, 0.25, 0.5)
    out = mask_distribution(p, all_mask(3))
    np.testing.assert_array_equal(out, p)


def test_zero_mass_support_raises():
    p = dist(1.0, 0.0, 0.0)
    with pytest.raises(ZeroMassSupport):
        mask_distribution(p, pack_mask([1, 2], 3))


def test_out_buffer_is_used():
    p = dist(0.5, 0.5)
    buf = np.empty(2)
    out = mask_distribution(p, pack_mask([0], 2), out=buf)
    assert out is buf


@given(st.integers(0, 2**32 - 1), st.integers(2, 64))
@settings(max_examples=60, deadline=None)
def test_renormalization_properties(seed, n):
    rng = np.random.default_rng(seed)
    p = rng.random(n) + 1e-3
    p /= p.sum()
    bits = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
    mask = pack_mask([int(b) for b in bits], n)
    out = mask_distribution(p, mask)
    assert abs(out.sum() - 1.0) < 1e-9
    off = [i for i in range(n) if i not in set(bits)]
    assert not np.any(out[off])
    # pairwise ratios among surviving tokens are preserved
    for a in bits[:4]:
        for b in bits[:4]:
            assert abs(out[a] * p[b] - out[b] * p[a]) < 1e-9


def test_greedy_restricted_argmax():
    # the unrestricted argmax (token 1) is forbidden; after renormalization
    # greedy must land on the best token inside the mask
    p = dist(0.05, 0.9, 0.03, 0.02)
    mask = pack_mask([0, 2, 3], 4)
    q = mask_distribution(p, mask)
    assert Greedy().pick(q, mask) == 0


def test_greedy_name():
    assert Greedy().name == "greedy"


def test_temperature_one_reproducible():
    p = np.full(16, 1 / 16)
    m = all_mask(16)
    a = Temperature(1.0, seed=9)
    b = Temperature(1.0, seed=9)
    picks_a = [a.pick(p, m) for _ in range(50)]
    picks_b = [b.pick(p, m) for _ in range(50)]
    assert picks_a == picks_b
    assert len(set(picks_a)) > 1


def test_temperature_sharpens():
    p = dist(0.2, 0.8)
    m = all_mask(2)
    cold = Temperature(0.05, seed=1)
    picks = [cold.pick(p.copy(), m) for _ in range(200)]
    assert picks.count(1) >= 198  # nearly deterministic at low temperature


def test_temperature_rejects_nonpositive():
    with pytest.raises(ValueError):
        Temperature(0.0, seed=0)


def test_topk_restricts_to_k_best():
    p = dist(0.4, 0.3, 0.2, 0.1)
    m = all_mask(4)
    pol = TopK(2, seed=4)
    picks = {pol.pick(p.copy(), m) for _ in range(300)}
    assert picks == {0, 1}


def test_topk_honours_mask_before_ranking():
    # best two PERMITTED tokens, not best two overall
    p = dist(0.4, 0.3, 0.2, 0.1)
    mask = pack_mask([2, 3], 4)
    q = mask_distribution(p, mask)
    pol = TopK(1, seed=4)
    picks = {pol.pick(q, mask) for _ in range(50)}
    assert picks == {2}


def test_make_policy_parsing():
    assert make_policy("greedy", 0).name == "greedy"
    assert make_policy("temp:0.7", 0).name == "temp:0.7"
    assert make_policy("topk:40", 0).name == "topk:40"
    with pytest.raises(ValueError):
        make_policy("beam:3", 0)


def test_make_policy_seed_domain_separation():
    # same root seed replays the same stream; different roots diverge
    p = np.full(32, 1 / 32)
    m = all_mask(32)
    seq1 = [make_policy("temp:1.0", 77).pick(p, m) for _ in range(1)]
    one = make_policy("temp:1.0", 77)
    two = make_policy("temp:1.0", 77)
    other = make_policy("temp:1.0", 78)
    seq1 = [one.pick(p, m) for _ in range(40)]
    seq2 = [two.pick(p, m) for _ in range(40)]
    seq3 = [other.pick(p, m) for _ in range(40)]
    assert seq1 == seq2
    assert seq1 != seq3


# --- sessions ---

@pytest.fixture
def scripted_flight(flight_session, vocab512):
    text = (b"Thought: go\nAction: flight_search\n"
            b'Action Input: {"from": "LAX", "to": "JFK", "adult": 1}\n')
    ids = tokenize_greedy(vocab512, text) + [vocab512.eos_id]

    def make():
        stub = ScriptedStub(ids, vocab512.size, vocab512.eos_id)
        return DecodeSession(flight_session.fsm, step_limit=512), stub, ids

    return make


def test_step_after_finish_raises(scripted_flight):
    sess, stub, _ = scripted_flight()
    run_to_completion(sess, stub, Greedy())
    with pytest.raises(SessionFinished):
        step(sess, stub, Greedy())


def test_scripted_replay_exact(scripted_flight, flight_session, vocab512):
    sess, stub, ids = scripted_flight()
    out = run_to_completion(sess, stub, Greedy())
    assert out == ids
    assert sess.finished and sess.step_count == len(ids)
    text = detokenize(vocab512, out[:-1])
    report = validate_session_text(flight_session.inventory,
                                   flight_session.scaffold.segments, text)
    assert report.verdict is Verdict.VALID


def test_step_limit_exceeded(flight_session, vocab512):
    stub = RandomLogit(11, vocab512.size)
    sess = DecodeSession(flight_session.fsm, step_limit=3)
    pol = Temperature(1.0, seed=2)
    with pytest.raises(StepLimitExceeded) as exc:
        run_to_completion(sess, stub, pol)
    assert exc.value.limit == 3
    assert len(exc.value.partial_tokens) == 3
    assert exc.value.partial_tokens == sess.tokens


def test_zero_mass_fallback_counted(flight_session, vocab512):
    # all mass on eos at the very first step: eos is not permitted at the
    # start, so the engine falls back to uniform over the mask and counts it
    class EosObsessed:
        session_exclusive = False

        def next_distribution(self, prefix):
            p = np.zeros(vocab512.size)
            p[vocab512.eos_id] = 1.0
            return p

    sess = DecodeSession(flight_session.fsm, step_limit=512)
    token = step(sess, EosObsessed(), Greedy())
    assert sess.zero_mass_fallbacks == 1
    assert sess.tokens == [token]
    assert mask_contains(flight_session.fsm.masks[flight_session.fsm.start], token)


def test_bad_distribution_rejected(flight_session, vocab512):
    class Broken:
        session_exclusive = False

        def __init__(self, p):
            self.p = p

        def next_distribution(self, prefix):
            return self.p

    sess = DecodeSession(flight_session.fsm)
    with pytest.raises(ValueError):
        step(sess, Broken(np.full(vocab512.size, 0.5)), Greedy())  # sums to 256
    with pytest.raises(ValueError):
        step(sess, Broken(np.zeros(7)), Greedy())  # wrong shape


def test_run_to_completion_random_logit_valid(flight_session, vocab512):
    stub = RandomLogit(3, vocab512.size)
    pol = make_policy("temp:1.0", 3)
    sess = DecodeSession(flight_session.fsm, step_limit=4096)
    out = run_to_completion(sess, stub, pol)
    text = detokenize(vocab512, out[:-1])
    report = validate_session_text(flight_session.inventory,
                                   flight_session.scaffold.segments, text)
    assert report.verdict is Verdict.VALID, text


def test_accepts_golden_walk(flight_session, vocab512):
    text = (b"Thought: x\nAction: flight_search\n"
            b'Action Input: {"from": "A", "to": "B", "adult": 0}\n')
    ids = tokenize_greedy(vocab512, text) + [vocab512.eos_id]
    assert accepts(flight_session.fsm, ids)
    assert not accepts(flight_session.fsm, ids[:-1])  # missing eos
    swapped = ids[:]
    swapped[0] = (swapped[0] + 1) % vocab512.size
    assert not accepts(flight_session.fsm, swapped)
