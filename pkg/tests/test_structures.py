import itertools

import pytest
from hypothesis import given, settings, strategies as st

from robustmpc.structures import (AdversaryStructure, ConflictGraph, ConflictStructure, InconsistentStructure,
                                  InstanceTooLarge, admissible_covers, coverage_pair_condition,
                                  identify_cheaters, in_conflict_with, is_consistent, is_cover,
                                  robustness_precondition, updated_structure, vertex_covers)

from conftest import subsets


def brute_cheaters(graph, structure):
    """Intersection of all covers lying in the structure, from the raw definitions."""
    covers = [s for s in subsets(range(graph.n))
              if all(i in s or j in s for i, j in graph.edges)
              and any(s <= t for t in structure.maximal_sets)]
    if not covers:
        return None
    return frozenset.intersection(*covers)


@st.composite
def conflict_structures(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    sets = draw(st.lists(st.frozensets(st.integers(0, n - 1), max_size=n), min_size=1, max_size=4))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True))
    return ConflictGraph(n, frozenset(edges)), AdversaryStructure(n, sets)


def test_membership_is_monotone():
    a = AdversaryStructure(5, [{0, 1}, {2}])
    assert {0} in a and {0, 1} in a and set() in a
    assert {0, 2} not in a
    assert a.maximal_sets == (frozenset({0, 1}), frozenset({2}))


def test_non_maximal_sets_are_dropped():
    a = AdversaryStructure(4, [{0}, {0, 1}, {1}])
    assert a.maximal_sets == (frozenset({0, 1}),)


def test_structure_parse_roundtrip_and_errors():
    a = AdversaryStructure.parse("# comment\nP=4\n0,1\n\n2\n")
    assert AdversaryStructure.parse(a.dumps()) == a
    with pytest.raises(ValueError, match="line 1"):
        AdversaryStructure.parse("0,1\n")
    with pytest.raises(ValueError, match="line 2"):
        AdversaryStructure.parse("P=3\nx\n")
    with pytest.raises(ValueError):
        AdversaryStructure.parse("P=3\n0,5\n")


def test_graph_parse_roundtrip_and_errors():
    g = ConflictGraph.parse("P=4\n0,1\n2-3\n")
    assert g.sorted_edges() == [(0, 1), (2, 3)]
    assert ConflictGraph.parse(g.dumps()) == g
    with pytest.raises(ValueError, match="line 2"):
        ConflictGraph.parse("P=4\n0,1,2\n")
    with pytest.raises(ValueError):
        ConflictGraph(3, frozenset({(1, 1)}))


def test_precondition_examples():
    # two players: always refused
    assert not robustness_precondition(2, AdversaryStructure(2, [()]))
    # n=3 with the empty structure is fine
    assert robustness_precondition(3, AdversaryStructure(3, [()]))
    # singletons on 4 players: {0} and {1} leave two players uncovered
    assert robustness_precondition(4, AdversaryStructure.singletons(4))
    # singletons on 3 players: {0},{1} cover P minus player 2
    assert not robustness_precondition(3, AdversaryStructure.singletons(3))
    assert not robustness_precondition(4, AdversaryStructure(4, [{0, 1}, {2}]))


def test_coverage_pair_condition():
    assert coverage_pair_condition(4, AdversaryStructure(4, [{0, 1}, {2}]))
    assert not coverage_pair_condition(4, AdversaryStructure(4, [{0, 1}, {2, 3}]))


def test_star_graph_identifies_center():
    g = ConflictGraph(4, frozenset({(0, 1), (0, 2), (0, 3)}))
    cs = ConflictStructure(g, AdversaryStructure.singletons(4))
    assert identify_cheaters(cs) == {0}


def test_single_edge_identifies_nobody():
    g = ConflictGraph(4, frozenset({(0, 1)}))
    cs = ConflictStructure(g, AdversaryStructure.singletons(4))
    assert is_consistent(cs)
    assert identify_cheaters(cs) == frozenset()
    assert updated_structure(cs) == [frozenset({0}), frozenset({1})]


def test_empty_graph():
    cs = ConflictStructure(ConflictGraph(4), AdversaryStructure.singletons(4))
    assert is_consistent(cs) and identify_cheaters(cs) == frozenset()


def test_inconsistent_raises():
    g = ConflictGraph(4, frozenset({(0, 1), (2, 3)}))
    cs = ConflictStructure(g, AdversaryStructure.singletons(4))
    assert not is_consistent(cs)
    with pytest.raises(InconsistentStructure):
        identify_cheaters(cs)


def test_too_large_is_refused():
    g = ConflictGraph(17, frozenset({(0, 1)}))
    with pytest.raises(InstanceTooLarge):
        vertex_covers(g)


@settings(max_examples=150, deadline=None)
@given(conflict_structures())
def test_identify_cheaters_matches_brute_force(cs):
    graph, structure = cs
    want = brute_cheaters(graph, structure)
    c = ConflictStructure(graph, structure)
    assert is_consistent(c) == (want is not None)
    if want is not None:
        assert identify_cheaters(c) == want


@settings(max_examples=100, deadline=None)
@given(conflict_structures())
def test_covers_are_minimal_and_complete(cs):
    graph, _ = cs
    covers = vertex_covers(graph)
    for c in covers:
        assert is_cover(graph, c)
        assert not any(is_cover(graph, c - {x}) for x in c)
    # every cover contains a minimal one
    for s in subsets(range(graph.n)):
        if is_cover(graph, s):
            assert any(c <= s for c in covers)


@settings(max_examples=100, deadline=None)
@given(conflict_structures())
def test_admissible_covers_are_covers_in_structure(cs):
    graph, structure = cs
    for c in admissible_covers(ConflictStructure(graph, structure)):
        assert is_cover(graph, c) and c in structure


@settings(max_examples=100, deadline=None)
@given(conflict_structures(), st.data())
def test_more_conflicts_never_shrink_identification(cs, data):
    graph, structure = cs
    c1 = ConflictStructure(graph, structure)
    if not is_consistent(c1) or graph.n < 2:
        return
    i, j = data.draw(st.sampled_from(list(itertools.combinations(range(graph.n), 2))))
    c2 = ConflictStructure(graph.with_edge(i, j), structure)
    if is_consistent(c2):
        assert identify_cheaters(c1) <= identify_cheaters(c2)


@settings(max_examples=100, deadline=None)
@given(conflict_structures())
def test_player_in_conflict_with_noncollusion_is_identified(cs):
    graph, structure = cs
    c = ConflictStructure(graph, structure)
    if not is_consistent(c):
        return
    m = identify_cheaters(c)
    for p in range(graph.n):
        if in_conflict_with(graph, p) not in structure:
            assert p in m
