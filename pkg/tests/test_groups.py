import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncriesz.groups import (
    EMPTY_WORD,
    GroupError,
    build_cyclic,
    build_free_ball,
    build_from_table,
    expected_ball_size,
    prefix_geq,
    reduce_word,
    word_inv,
    word_length,
    word_mul,
)

KLEIN_TABLE = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def test_cyclic_trivial():
    g = build_cyclic(1)
    assert g.order == 1
    assert g.identity == 0


def test_cyclic_inverse_table():
    g = build_cyclic(4)
    assert list(g.inverse) == [0, 3, 2, 1]


def test_cyclic_table_entry():
    g = build_cyclic(6)
    assert g.mul(2, 5) == 1


def test_cyclic_zero_rejected():
    with pytest.raises(GroupError):
        build_cyclic(0)


def test_klein_table_accepted():
    g = build_from_table(KLEIN_TABLE)
    assert all(g.inv(a) == a for a in g.elements())


def test_bad_row_rejected():
    with pytest.raises(GroupError):
        build_from_table([[0, 1], [1, 1]])


def test_z3_table():
    g = build_from_table([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert g.inv(1) == 2


def test_assoc_failure_rejected():
    # row/column permutations but not associative (a quasigroup)
    table = [[0, 1, 2, 3, 4],
             [1, 0, 3, 4, 2],
             [2, 4, 0, 1, 3],
             [3, 2, 4, 0, 1],
             [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError):
        build_from_table(table)


@pytest.mark.parametrize("n,gens,expected", [
    (4, [1, 3], [0, 1, 2, 1]),
    (5, [1, 4], [0, 1, 2, 2, 1]),
])
def test_word_length_bfs(n, gens, expected):
    g = build_cyclic(n)
    psi = word_length(g, gens)
    assert list(psi.values) == expected


def test_word_length_all_generators():
    g = build_cyclic(7)
    psi = word_length(g, range(1, 7))
    assert list(psi.values) == [0] + [1] * 6


def test_word_length_non_generating():
    g = build_cyclic(4)
    with pytest.raises(GroupError):
        word_length(g, [2])


def test_word_length_triangle_inequality():
    g = build_cyclic(9)
    psi = word_length(g, [1, 8])
    for a in g.elements():
        for b in g.elements():
            assert psi(g.mul(a, b)) <= psi(a) + psi(b) + 1e-12


def test_inverse_antihomomorphism():
    g = build_from_table(KLEIN_TABLE)
    for a in g.elements():
        for b in g.elements():
            assert g.inv(g.mul(a, b)) == g.mul(g.inv(b), g.inv(a))


def test_ball_counts():
    assert build_free_ball(2, 1).size == 5
    assert build_free_ball(2, 2).size == 17
    assert expected_ball_size(2, 3) == 53


def test_ball_budget():
    with pytest.raises(GroupError):
        build_free_ball(3, 12, word_budget=1000)


def test_ball_words_reduced():
    ball = build_free_ball(2, 3)
    for w in ball.words:
        assert reduce_word(w) == w


def test_parent_deletes_last_letter():
    ball = build_free_ball(2, 2)
    assert ball.parent((1, 2)) == (1,)
    assert ball.parent(EMPTY_WORD) == EMPTY_WORD


def test_prefix_order_basics():
    assert prefix_geq((1, 2), (1,))
    assert not prefix_geq((1,), (2,))
    assert prefix_geq((1, -2, 1), EMPTY_WORD)


def test_prefix_count_equals_length():
    ball = build_free_ball(2, 3)
    for g in ball.words:
        count = sum(1 for h in ball.words
                    if h != EMPTY_WORD and prefix_geq(g, h))
        assert count == len(g)


def test_prefix_partial_order():
    ball = build_free_ball(2, 2)
    ws = ball.words
    for g in ws:
        assert prefix_geq(g, g)
        for h in ws:
            if prefix_geq(g, h) and prefix_geq(h, g):
                assert g == h
            for k in ws:
                if prefix_geq(g, h) and prefix_geq(h, k):
                    assert prefix_geq(g, k)


letters = st.integers(min_value=-3, max_value=3).filter(lambda x: x != 0)


@given(st.lists(letters, max_size=12), st.lists(letters, max_size=12))
@settings(max_examples=200, deadline=None)
def test_reduction_is_a_monoid_quotient(a, b):
    ga, gb = reduce_word(a), reduce_word(b)
    assert word_mul(ga, gb) == reduce_word(tuple(a) + tuple(b))
    assert word_mul(ga, word_inv(ga)) == EMPTY_WORD


@given(st.lists(letters, min_size=1, max_size=10))
@settings(max_examples=100, deadline=None)
def test_parent_drops_length_by_one(a):
    g = reduce_word(a)
    if g != EMPTY_WORD:
        assert len(g[:-1]) == len(g) - 1
