import itertools

import pytest

from robustmpc.commit import bcx_commit, gbcx_create, gbcx_unveil_public
from robustmpc.dbc import dbc_create, dbc_unveil
from robustmpc.gates import dbc_and, gpand, pand

from conftest import make_session


@pytest.mark.parametrize("a,b,ap", list(itertools.product((0, 1), repeat=3)))
def test_pand_identity(a, b, ap):
    s = make_session(3, seed=a + 2 * b + 4 * ap)
    a_bcx = bcx_commit(0, 1, a, 8, s.rng)
    b_bcx = bcx_commit(1, 0, b, 8, s.rng)
    res = pand(s, 0, 1, a_bcx, b_bcx, a_prime=ap)
    assert res.alice_share.value == ap
    assert res.alice_share.value ^ res.bob_share.value == a & b


@pytest.mark.parametrize("a,b", list(itertools.product((0, 1), repeat=2)))
def test_gpand_shares(a, b):
    s = make_session(4, seed=a + 2 * b)
    ag, bg = gbcx_create(s, 0, a), gbcx_create(s, 1, b)
    res = gpand(s, 0, 1, ag, bg)
    assert gbcx_unveil_public(s, res.alice_share) ^ gbcx_unveil_public(s, res.bob_share) == a & b


@pytest.mark.parametrize("a,b", list(itertools.product((0, 1), repeat=2)))
def test_dbc_and_uses_n_squared_gpands(a, b):
    s = make_session(4, seed=a + 2 * b)
    x, y = dbc_create(s, 0, a), dbc_create(s, 1, b)
    before = s.counters["gpand"]
    z = dbc_and(s, x, y)
    assert s.counters["gpand"] - before == 16
    assert dbc_unveil(s, z) == a & b
    # inputs stay usable
    assert dbc_unveil(s, x) == a
