import random

import pytest
from hypothesis import given, settings, strategies as st

from robustmpc.adversary import Strategy
from robustmpc.commit import (IdealCommitment, bcx_commit, bcx_copy, bcx_prove_equal, bcx_prove_linear,
                              bcx_unveil, coin_toss, gbcx_copy, gbcx_create, gbcx_prove_relations,
                              gbcx_unveil_private, gbcx_unveil_public, gbcx_xor, linear_announcement,
                              linear_failures)
from robustmpc.errors import CheaterIdentified, InconsistentUnveil, InvalidState, ProofRejected

from conftest import make_session

M = 8


def accepting_challenges(xs, c, guess=None):
    d = linear_announcement(xs, c, guess)
    return [ch for ch in range(2 ** xs[0].m) if linear_failures(xs, c, d, ch) == 0]


# -- BCX --------------------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 1), st.integers(0, 2 ** 32))
def test_honest_bcx_unveils_its_bit(b, seed):
    x = bcx_commit(0, 1, b, M, random.Random(seed))
    assert all(l ^ r == b for l, r in x.pairs)
    assert bcx_unveil(x) == b


def test_unveil_detects_bad_pairs_and_wrong_claims():
    rng = random.Random(1)
    with pytest.raises(InconsistentUnveil):
        bcx_unveil(bcx_commit(0, 1, 1, M, rng, bad_pairs=1))
    with pytest.raises(InconsistentUnveil):
        bcx_unveil(bcx_commit(0, 1, 1, M, rng), claimed=0)


def test_opened_bcx_cannot_be_reused():
    x = bcx_commit(0, 1, 0, M, random.Random(0))
    bcx_unveil(x)
    with pytest.raises(InvalidState):
        bcx_unveil(x)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=4), st.integers(0, 2 ** 32))
def test_true_linear_relation_accepts_every_challenge(bits, seed):
    rng = random.Random(seed)
    xs = [bcx_commit(0, 1, b, M, rng) for b in bits]
    assert len(accepting_challenges(xs, sum(bits) % 2)) == 2 ** M


@pytest.mark.parametrize("guess", [None, 0, 0b10110001, 0xFF])
def test_false_equality_accepts_exactly_one_challenge(guess):
    rng = random.Random(5)
    x, y = bcx_commit(0, 1, 0, M, rng), bcx_commit(0, 1, 1, M, rng)
    acc = accepting_challenges([x, y], 0, guess)
    assert acc == [0 if guess is None else guess]


def test_one_bad_pair_survives_half_the_challenges():
    rng = random.Random(2)
    x = bcx_commit(0, 1, 1, M, rng, bad_pairs=1)
    y = bcx_commit(0, 1, 1, M, rng)
    assert len(accepting_challenges([x, y], 0)) == 2 ** (M - 1)


def test_prove_equal_consumes_inputs():
    rng = random.Random(0)
    x, y = bcx_commit(0, 1, 1, M, rng), bcx_commit(0, 1, 1, M, rng)
    assert bcx_prove_equal(x, y, rng)
    with pytest.raises(InvalidState):
        bcx_prove_linear([x], 1, rng)


def test_copy_gives_two_fresh_commitments_of_the_same_bit():
    rng = random.Random(7)
    for b in (0, 1):
        a, c = bcx_copy(bcx_commit(0, 1, b, M, rng), rng, rng, rng)
        assert bcx_unveil(a) == b and bcx_unveil(c) == b


def test_copy_with_substituted_bit_is_rejected():
    rng = random.Random(7)
    rejected = 0
    for _ in range(20):
        try:
            bcx_copy(bcx_commit(0, 1, 0, M, rng), rng, rng, rng, value=1)
        except ProofRejected:
            rejected += 1
    assert rejected == 20


def test_ideal_commitment_opens_once():
    c = IdealCommitment("c", 0, None, 1)
    assert c.open(1)
    with pytest.raises(InvalidState):
        c.open(1)


# -- GBCX -------------------------------------------------------------------------

def test_gbcx_honest_roundtrip():
    s = make_session(4, seed=3)
    g = gbcx_create(s, 1, 1)
    assert g.bound_to == {0, 2, 3}
    ok, v = gbcx_unveil_private(s, g, 0)
    assert ok and v == 1
    assert gbcx_unveil_public(s, g) == 1
    assert not s.edges


def test_gbcx_equivocation_is_caught():
    s = make_session(5, seed=1, strategy=Strategy({2}, "equivocate"))
    with pytest.raises(CheaterIdentified) as info:
        gbcx_create(s, 2, 1)
    assert info.value.players == {2}


def test_gbcx_wrong_public_unveil_is_caught():
    s = make_session(4, seed=1, strategy=Strategy({1}, "wrong_unveil", (("at", "unveil"),)))
    g = gbcx_create(s, 1, 0)
    with pytest.raises(CheaterIdentified) as info:
        gbcx_unveil_public(s, g)
    assert info.value.players == {1}


def test_gbcx_copy_and_xor_keep_values():
    s = make_session(4, seed=2)
    g = gbcx_create(s, 0, 1)
    h = gbcx_create(s, 0, 1)
    a, b = gbcx_copy(s, g)
    x = gbcx_xor(s, [a, h])
    assert gbcx_unveil_public(s, x) == 0
    assert gbcx_unveil_public(s, b) == 1


def test_relations_keep_items_usable():
    s = make_session(4, seed=4)
    g = gbcx_create(s, 2, 1)
    h = gbcx_create(s, 2, 0)
    gbcx_prove_relations(s, [([g, h], 1)], keep=True)
    assert gbcx_unveil_public(s, g) == 1 and gbcx_unveil_public(s, h) == 0


def test_false_relation_is_rejected_and_identified():
    s = make_session(4, seed=4)
    g = gbcx_create(s, 2, 1)
    with pytest.raises(CheaterIdentified):
        gbcx_prove_relations(s, [([g], 0)], keep=False)


def test_coin_toss_is_deterministic_per_seed():
    a = coin_toss(make_session(4, seed=9), 16)
    b = coin_toss(make_session(4, seed=9), 16)
    assert a == b


def test_coin_toss_identifies_wrong_opening():
    s = make_session(4, seed=9, strategy=Strategy({3}, "wrong_unveil", (("at", "*"),)))
    with pytest.raises(CheaterIdentified) as info:
        coin_toss(s, 8)
    assert info.value.players == {3}
