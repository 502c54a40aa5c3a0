import pytest

from valetplan.adjacency import (AdjacencyGraph, UnknownEntrance, build_adjacency,
                                 restrict_to_entrance)
from valetplan.geometry import EntranceSegment, LotSpec
from valetplan.layout import canonicalize_unique, make_layout, solve_max_packing

LOT = LotSpec.with_left_entrance(15, 12)
LAYOUTS = canonicalize_unique(solve_max_packing(LOT, 3.0, 9.5))


def edges(g):
    return {tuple(sorted(map(str, e))) for e in g.edge_list()}


def E(*pairs):
    return {tuple(sorted(map(str, p))) for p in pairs}


def test_layout1_edges():
    g = build_adjacency(LAYOUTS[0], LOT)
    assert edges(g) == E((0, 1), (0, 2), (0, "e0"), (1, 2), (1, 3), (2, 3), (2, "e0"),
                         (3, 4), (3, "e0"), (4, "e0"))


def test_layout2_edges():
    # stall 3 faces the entrance across stall 0, which covers its whole face: no edge
    g = build_adjacency(LAYOUTS[1], LOT)
    assert edges(g) == E((0, 1), (0, 2), (0, 3), (0, "e0"), (1, 2), (2, 3), (3, 4), (4, "e0"))


def test_layout3_is_a_chain():
    g = build_adjacency(LAYOUTS[2], LOT)
    assert edges(g) == E((0, 1), (1, 2), (2, 3), (3, 4), (0, "e0"))


def test_gap_and_overlap_thresholds():
    lot = LotSpec.with_left_entrance(30, 20)
    near = make_layout([(0, 0, "W"), (3.4, 0, "W")], 3.0, 9.5)
    far = make_layout([(0, 0, "W"), (3.6, 0, "W")], 3.0, 9.5)
    assert build_adjacency(near, lot).has_edge(0, 1)
    assert not build_adjacency(far, lot).has_edge(0, 1)
    # shared face of 0.5 m is below the 1 m overlap threshold
    sliver = make_layout([(0, 0, "W"), (3, 9.0, "W")], 3.0, 9.5)
    assert not build_adjacency(sliver, lot).has_edge(0, 1)
    assert build_adjacency(sliver, lot, mu_adj=0.5).has_edge(0, 1)


def test_entrance_outside_span_gets_no_edge():
    lot = LotSpec(12, 15, (EntranceSegment("left", (6, 12)),))
    lay = make_layout([(0, 0, "L"), (0, 8, "L")], 3.0, 9.5)
    g = build_adjacency(lay, lot)
    assert not g.has_edge(0, "e0")
    assert g.has_edge(1, "e0")


def test_restrict_and_without():
    lot = LotSpec(12, 15, (EntranceSegment("left", (0, 12)), EntranceSegment("right", (0, 12))))
    g = build_adjacency(LAYOUTS[0], lot)
    assert g.entrances == ["e0", "e1"]
    r = restrict_to_entrance(g, "e1")
    assert r.entrances == ["e1"]
    assert all("e0" not in e for e in r.edges)
    with pytest.raises(UnknownEntrance):
        restrict_to_entrance(g, "e7")
    assert 2 not in g.without([2]).nodes


def test_graph_json_round_trip():
    g = build_adjacency(LAYOUTS[1], LOT)
    assert AdjacencyGraph.from_json(g.to_json()) == g
    assert g.to_json()["nodes"] == [0, 1, 2, 3, 4, "e0"]


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        AdjacencyGraph((0, 1), frozenset([frozenset((0, 2))]))
    with pytest.raises(ValueError):
        AdjacencyGraph((0,), frozenset([frozenset((0,))]))
