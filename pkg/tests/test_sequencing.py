from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from valetplan.accessibility import BOTTOM, TOP, AccessCondition, LayoutConditions
from valetplan.oracles import brute_force_sequences, is_prefix_feasible
from valetplan.sequencing import (BottomCondition, LengthMismatch, SequencePair, apply_order,
                                  cyclic_orders, enumerate_exit_sequences, filter_pairs,
                                  park_sequences_from_exit, validate_order)


def C(*clauses):
    return AccessCondition(frozenset(frozenset(c) for c in clauses))


LAYOUT2 = LayoutConditions((TOP, C({0}, {2, 3, 4}), C({0}, {3, 4}), C({0}, {4}), TOP))


@st.composite
def conditions(draw):
    n = draw(st.integers(1, 6))
    conds = []
    for p in range(n):
        others = [s for s in range(n) if s != p]
        clauses = draw(st.lists(st.sets(st.sampled_from(others)) if others else st.just(set()),
                                min_size=1, max_size=3))
        conds.append(C(*clauses))
    return LayoutConditions(tuple(conds))


@settings(max_examples=200, deadline=None)
@given(conditions())
def test_dfs_equals_permutation_filter(conds):
    assert enumerate_exit_sequences(conds) == brute_force_sequences(conds)


def test_layout2_counts_and_order():
    seqs = enumerate_exit_sequences(LAYOUT2)
    assert len(seqs) == 34
    assert seqs == sorted(seqs)
    assert seqs[0] == (0, 1, 2, 3, 4)
    assert (0, 4, 2, 3, 1) in seqs
    # stall 3 needs stall 0 or stall 4 gone first
    assert (3, 0, 1, 2, 4) not in seqs


def test_all_top_gives_every_permutation():
    conds = LayoutConditions((TOP,) * 4)
    assert enumerate_exit_sequences(conds) == list(permutations(range(4)))


def test_cycle_gives_nothing():
    conds = LayoutConditions((C({1}), C({0})))
    assert enumerate_exit_sequences(conds) == []


def test_bottom_condition_raises():
    with pytest.raises(BottomCondition):
        enumerate_exit_sequences(LayoutConditions((TOP, BOTTOM)))


def test_prefix_feasibility():
    assert is_prefix_feasible((0, 4, 3), LAYOUT2)
    assert is_prefix_feasible((4, 3), LAYOUT2)
    assert not is_prefix_feasible((3,), LAYOUT2)
    assert not is_prefix_feasible((1, 0), LAYOUT2)


def test_park_sequences_are_reversals():
    assert park_sequences_from_exit([(0, 4, 2, 3, 1)]) == [(1, 3, 2, 4, 0)]


def test_apply_order():
    assert apply_order((4, 0, 1, 2, 3), (4, 2, 3, 1, 0)) == (0, 4, 2, 3, 1)
    assert apply_order((0, 1, 2), (2, 0, 1)) == (2, 0, 1)
    with pytest.raises(LengthMismatch):
        apply_order((0, 1), (0, 1, 2))


def test_validate_order():
    assert validate_order([2, 0, 1]) == (2, 0, 1)
    for bad in ([0, 0, 1], [1, 2, 3], [0, 2]):
        with pytest.raises(ValueError):
            validate_order(bad)


def test_cyclic_orders():
    assert cyclic_orders(5) == [(0, 1, 2, 3, 4), (1, 2, 3, 4, 0), (2, 3, 4, 0, 1),
                                (3, 4, 0, 1, 2), (4, 0, 1, 2, 3)]
    assert cyclic_orders(1) == [(0,)]


def product_filter(park, exit_, pi):
    """The definition itself: every (u, v) in park x exit with v = pi(u)."""
    exits = set(exit_)
    return [SequencePair(u, v) for u in park for v in exit_ if v in exits and apply_order(pi, u) == v]


@pytest.mark.parametrize("pi", cyclic_orders(5))
def test_filter_pairs_matches_product(pi):
    exit_ = enumerate_exit_sequences(LAYOUT2)
    park = park_sequences_from_exit(exit_)
    assert filter_pairs(park, exit_, pi) == product_filter(park, exit_, pi)


def test_worked_example_pair():
    exit_ = enumerate_exit_sequences(LAYOUT2)
    pairs = filter_pairs(park_sequences_from_exit(exit_), exit_, (4, 0, 1, 2, 3))
    assert SequencePair((4, 2, 3, 1, 0), (0, 4, 2, 3, 1)) in pairs
    assert len(pairs) == 26


def test_filter_pairs_first_and_errors():
    exit_ = enumerate_exit_sequences(LAYOUT2)
    park = park_sequences_from_exit(exit_)
    first = filter_pairs(park, exit_, (0, 1, 2, 3, 4), first=True)
    assert len(first) == 1
    assert first[0] == filter_pairs(park, exit_, (0, 1, 2, 3, 4))[0]
    with pytest.raises(LengthMismatch):
        filter_pairs(park, [(0, 1)], (0, 1, 2, 3, 4))


def test_pair_json_round_trip():
    pair = SequencePair((4, 2, 3, 1, 0), (0, 4, 2, 3, 1))
    assert SequencePair.from_json(pair.to_json()) == pair
