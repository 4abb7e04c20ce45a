import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robustmpc.code import DEFAULT_CODE, LinearCode, code_decode, code_encode
from robustmpc.errors import DecodeFailure


def test_default_is_15_11_3():
    c = DEFAULT_CODE
    assert (c.m, c.k, c.d) == (15, 11, 3)
    assert c.sigma_m == 1 and c.t == 1


def test_minimum_distance_by_enumeration():
    c = DEFAULT_CODE
    weights = [sum(w) for w in c.codewords() if any(w)]
    assert min(weights) == 3
    assert len(list(c.codewords())) == 2 ** c.k


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=11, max_size=11), st.integers(-1, 14))
def test_single_errors_are_corrected(msg, pos):
    c = DEFAULT_CODE
    word = list(code_encode(c, msg))
    assert c.is_codeword(word)
    if pos >= 0:
        word[pos] ^= 1
    assert code_decode(c, word) == c.encode(msg)


def test_parity_supports_vanish_on_codewords():
    rng = random.Random(3)
    for _ in range(20):
        w = DEFAULT_CODE.random_codeword(rng)
        for sup in DEFAULT_CODE.parity_supports():
            assert sum(w[i] for i in sup) % 2 == 0


def test_parse_spec_builtin_and_errors():
    c = LinearCode.parse_spec("15,11,3,1/15,0.1")
    assert c.k == 11
    with pytest.raises(ValueError):
        LinearCode.parse_spec("15,11,4,1/15,0.1")     # distance overstated
    with pytest.raises(ValueError):
        LinearCode.parse_spec("15,11,3,1/15,0.3")     # d must exceed eps*m
    with pytest.raises(ValueError):
        LinearCode.parse_spec("16,11,3,1/16,0.1")     # no built-in code


def test_explicit_generator_rows_in_hex():
    c = DEFAULT_CODE
    rows = [format(sum(int(b) << i for i, b in enumerate(row)), "x") for row in c.generator]
    d = LinearCode.parse_spec("15,11,3,1/15,0.1", rows)
    assert list(d.codewords())[:5] == list(c.codewords())[:5]


def test_rate_condition_enforced():
    with pytest.raises(ValueError, match="must exceed"):
        LinearCode.hamming(3, sigma=Fraction(2, 7))


def test_decode_rejects_wrong_length():
    with pytest.raises(ValueError):
        DEFAULT_CODE.decode([0] * 14)


def test_decode_failure_beyond_capacity():
    # [10,8,2] code: detects single errors but corrects none
    parity = [(1, 0), (0, 1), (1, 1), (1, 0), (0, 1), (1, 1), (1, 0), (0, 1)]
    rows = [[1 if j == i else 0 for j in range(8)] + list(parity[i]) for i in range(8)]
    c = LinearCode.from_generator(10, 8, 2, Fraction(1, 10), 0.1, rows)
    assert c.t == 0
    word = list(c.encode([1, 0, 0, 0, 0, 0, 0, 0]))
    word[0] ^= 1
    with pytest.raises(DecodeFailure):
        c.decode(word)
