import itertools

import pytest

from robustmpc.adversary import Strategy
from robustmpc.dbc import dbc_constant, dbc_copy, dbc_create, dbc_not, dbc_unveil, dbc_xor
from robustmpc.errors import CheaterIdentified

from conftest import make_session


@pytest.mark.parametrize("b", [0, 1])
def test_create_and_unveil(b):
    s = make_session(4, seed=b)
    d = dbc_create(s, 2, b)
    assert sorted(d.shares) == [0, 1, 2, 3]
    assert d.value == b
    assert dbc_unveil(s, d) == b


def test_owner_learns_every_other_share():
    s = make_session(4, seed=1)
    d = dbc_create(s, 0, 1)
    known = s.ledger.closure([0])
    assert all(g.secret in known for p, g in d.shares.items())
    # nobody else reconstructs the bit
    for coalition in itertools.combinations([1, 2, 3], 3):
        assert d.secret not in s.ledger.closure(coalition)


@pytest.mark.parametrize("b", [0, 1])
def test_not_and_copy(b):
    s = make_session(4, seed=5)
    d = dbc_create(s, 1, b)
    e = dbc_copy(s, d)
    assert dbc_unveil(s, dbc_not(s, d)) == 1 - b
    assert dbc_unveil(s, e) == b


def test_xor_and_constant():
    s = make_session(4, seed=6)
    one = dbc_constant(s, 1)
    d = dbc_create(s, 3, 1)
    assert dbc_unveil(s, dbc_xor(s, d, one)) == 0


def test_cheating_not_prover_is_identified():
    s = make_session(4, seed=2)
    d = dbc_create(s, 1, 1)
    with pytest.raises(CheaterIdentified) as info:
        dbc_not(s, d, cheat_equal=True)
    assert info.value.players == {0}


def test_absent_share_committer_is_identified():
    s = make_session(4, seed=2, strategy=Strategy({3}, "abort_at", (("phase", "init"),)))
    with pytest.raises(CheaterIdentified) as info:
        dbc_create(s, 0, 1)
    assert info.value.players == {3}


def test_wrong_private_opening_falls_back_to_public():
    s = make_session(5, seed=4, strategy=Strategy({2}, "wrong_unveil", (("at", "dbc.private"),)))
    d = dbc_create(s, 0, 1)
    assert (0, 2) in s.edges
    assert dbc_unveil(s, d) == 1
