from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cantor_quant.words import (
    EMPTY,
    compositions,
    concat,
    contraction_ratio,
    drop_last,
    format_word,
    parse_word,
    prob_weight,
    tail_mass,
    tail_representative,
    word,
)

from oracles import geometric_tail_mass

words = st.lists(st.integers(1, 9), max_size=6).map(tuple)
nonempty_words = st.lists(st.integers(1, 9), min_size=1, max_size=6).map(tuple)


def test_concat():
    assert concat((1, 2), (3,)) == (1, 2, 3)
    assert concat(EMPTY, (5,)) == (5,)
    assert concat((2,), (1, 1)) == (2, 1, 1)


def test_drop_last():
    assert drop_last((1, 1)) == (1,)
    assert drop_last((7,)) == EMPTY
    assert drop_last((2, 3, 1)) == (2, 3)
    with pytest.raises(ValueError):
        drop_last(EMPTY)


def test_tail_representative():
    assert tail_representative((1,), 1) == (2,)
    assert tail_representative((1, 1), 1) == (1, 2)
    assert tail_representative((2, 3), 4) == (2, 7)
    with pytest.raises(ValueError):
        tail_representative(EMPTY, 1)
    with pytest.raises(ValueError):
        tail_representative((1,), 0)


def test_weights_and_ratios():
    assert prob_weight((1, 1)) == Fraction(1, 4)
    assert prob_weight(EMPTY) == 1
    assert prob_weight((2, 3)) == Fraction(1, 32)
    assert contraction_ratio((1,)) == Fraction(1, 3)
    assert contraction_ratio((1, 2)) == Fraction(1, 27)
    assert contraction_ratio(EMPTY) == 1


def test_tail_mass_values():
    assert tail_mass((1,)) == Fraction(1, 2)
    assert tail_mass((1, 1)) == Fraction(1, 4)
    assert tail_mass((2,)) == Fraction(1, 4)
    with pytest.raises(ValueError):
        tail_mass(EMPTY)


@pytest.mark.parametrize("w", [(1,), (2,), (3,), (1, 1), (2, 3), (1, 4, 2)])
def test_tail_mass_matches_geometric_sum(w):
    # truncated after 200 terms, so the remainder is below p_w * 2**-200
    assert abs(geometric_tail_mass(w) - tail_mass(w)) <= prob_weight(w) / 2 ** 200


def test_word_validation():
    assert word([1, 2]) == (1, 2)
    for bad in ([0], [-1], [1.5], [True]):
        with pytest.raises(ValueError):
            word(bad)


def test_compositions():
    assert list(compositions(0)) == [EMPTY]
    assert list(compositions(3)) == [(1, 1, 1), (1, 2), (2, 1), (3,)]
    for total in range(1, 11):
        comps = list(compositions(total))
        assert len(comps) == 2 ** (total - 1)
        assert comps == sorted(comps)
        assert all(prob_weight(c) == Fraction(1, 2 ** total) for c in comps)


def test_serialization():
    assert format_word((1, 2, 1)) == "[1,2,1]"
    assert format_word(EMPTY) == "[]"
    assert parse_word("[1,2,1]") == (1, 2, 1)
    assert parse_word(" [ ] ") == EMPTY
    for bad in ("1,2", "[a]", "[0]", "[1,,2]"):
        with pytest.raises(ValueError):
            parse_word(bad)


@given(words, words)
def test_multiplicative(w, t):
    assert prob_weight(concat(w, t)) == prob_weight(w) * prob_weight(t)
    assert contraction_ratio(concat(w, t)) == contraction_ratio(w) * contraction_ratio(t)


@given(nonempty_words, st.integers(1, 12))
def test_tail_representative_scaling(w, j):
    u = tail_representative(w, j)
    assert prob_weight(u) == prob_weight(w) / 2 ** j
    assert contraction_ratio(u) == contraction_ratio(w) / 3 ** j


@given(nonempty_words, st.integers(1, 15))
def test_tail_mass_telescopes(w, J):
    head = sum((prob_weight(tail_representative(w, j)) for j in range(1, J + 1)), Fraction(0))
    assert tail_mass(w) == head + tail_mass(tail_representative(w, J))


@given(words, words)
def test_equal_weight_means_equal_ratio(w, t):
    if prob_weight(w) == prob_weight(t):
        assert contraction_ratio(w) == contraction_ratio(t)


@given(words)
def test_round_trip(w):
    assert parse_word(format_word(w)) == w
