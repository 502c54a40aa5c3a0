import xml.etree.ElementTree as ET

import pytest

from valetplan.render import STYLE, layout_svg, pair_frames, pair_svg, precedence_svg, write_svg
from valetplan.sequencing import SequencePair

NS = "{http://www.w3.org/2000/svg}"
PAIR = SequencePair((4, 2, 3, 1, 0), (0, 4, 2, 3, 1))


def parse(svg):
    root = ET.fromstring(svg.encode())
    assert root.tag == NS + "svg" and root.get("version") == "1.1"
    return root


def test_layout_svg(cfg15, layout2):
    svg = layout_svg(layout2.layout, cfg15.lot, layout2.graph, "15x12 layout 2")
    root = parse(svg)
    assert svg.count(STYLE["stall"]) == 5
    labels = [t.text for t in root.iter(NS + "text")]
    assert labels == ["0", "1", "2", "3", "4"]
    assert svg.count(STYLE["edge"]) == len(layout2.graph.edges)
    assert root.find(NS + "title").text == "15x12 layout 2"


def test_layout_svg_is_deterministic(cfg15, layout2):
    assert layout_svg(layout2.layout, cfg15.lot) == layout_svg(layout2.layout, cfg15.lot)


def test_precedence_svg(layout2):
    svg = precedence_svg(layout2.conditions)
    root = parse(svg)
    texts = [t.text for t in root.iter(NS + "text")]
    assert texts.count("AND") == 2
    assert sorted(t for t in texts if t.startswith("y")) == ["y0", "y1", "y2", "y3", "y4"]
    assert len(list(root.iter(NS + "circle"))) == 5


@pytest.fixture(scope="module")
def frames(cfg15, layout2):
    return pair_frames(layout2.layout, cfg15, PAIR)


def test_pair_frames(frames):
    assert len(frames) == 10
    assert [f.phase for f in frames] == ["park"] * 5 + ["exit"] * 5
    assert [f.stall for f in frames] == [4, 2, 3, 1, 0, 0, 4, 2, 3, 1]
    assert frames[0].occupied == () and frames[4].occupied == (1, 2, 3, 4)
    assert frames[5].occupied == (1, 2, 3, 4) and frames[9].occupied == ()
    assert all(f.path is not None for f in frames)
    # a parking maneuver ends where the vehicle sits in its stall
    first = frames[0].path.waypoints
    assert first[0].pose == frames[0].path.reversed().waypoints[-1].pose


def test_pair_svg(cfg15, layout2, tmp_path):
    svg = pair_svg(layout2.layout, cfg15, PAIR, "pair")
    root = parse(svg)
    groups = [g for g in root.iter(NS + "g") if g.get("class") == "frame"]
    assert len(groups) == 10
    assert [g.get("data-phase") for g in groups] == ["park"] * 5 + ["exit"] * 5
    assert "no path" not in svg
    out = write_svg(tmp_path / "pair.svg", svg)
    assert out.read_text() == svg
