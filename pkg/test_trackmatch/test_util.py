"""Test module for `util.py`."""

import json

import pytest
from dcm_common import Logger, LoggingContext as Context

from trackmatch import util
from trackmatch.models import (
    RoadPoint,
    PathSegment,
    RoutePath,
    Sample,
    Track,
    MatchResult,
    GroundTruth,
    TruePosition,
    MatchMethod,
)


def test_load_network_from_file(fixtures):
    """Test function `load_network_from_file`."""
    net = util.load_network_from_file(fixtures / "straight_road.yaml")
    assert len(net.nodes) == 2
    assert len(net.edges) == 1
    edge = net.edge(0)
    assert (edge.from_, edge.to) == (0, 1)
    assert edge.length == pytest.approx(1000.0)
    assert edge.speed_limit == 10.0
    assert not edge.oneway
    assert net.index.capacity == 16


def test_load_network_from_file_index_settings(fixtures):
    """
    Test function `load_network_from_file` with snap tolerance and
    quad-tree settings.
    """
    net = util.load_network_from_file(
        fixtures / "straight_road.yaml",
        snap_tolerance=0.5,
        index_capacity=2,
        index_max_depth=3,
    )
    assert net.snap_tolerance == 0.5
    assert net.index.capacity == 2
    assert net.index.max_depth == 3


def test_load_network_from_string_isolated_node():
    """
    Test function `load_network_from_string` for a document with an
    isolated node.
    """
    log = Logger(default_origin="Test")
    net = util.load_network_from_string(
        json.dumps(
            {
                "nodes": [
                    {"id": 0, "x": 0, "y": 0},
                    {"id": 1, "x": 100, "y": 0},
                    {"id": 2, "x": 500, "y": 500},
                ],
                "edges": [{"id": 0, "from": 0, "to": 1, "speed_limit": 10}],
            }
        ),
        log=log,
    )
    print(log.fancy())
    assert len(net.nodes) == 2
    assert Context.WARNING in log


@pytest.mark.parametrize(
    "text",
    [
        "nodes: [",
        "- a\n- b\n",
        json.dumps({"nodes": [{"id": 0, "x": 0, "y": 0}]}),
    ],
    ids=["bad-yaml", "not-an-object", "missing-edges"],
)
def test_load_network_from_string_invalid(text):
    """Test function `load_network_from_string` for invalid documents."""
    with pytest.raises(ValueError) as exc_info:
        util.load_network_from_string(text)
    print(exc_info.value)


def test_write_network(fixtures, tmp_path):
    """Test function `write_network`."""
    net = util.load_network_from_file(fixtures / "straight_road.yaml")
    util.write_network(net, tmp_path / "network.json")
    loaded = util.load_network_from_file(tmp_path / "network.json")
    assert len(loaded.nodes) == len(net.nodes)
    assert len(loaded.edges) == len(net.edges)
    assert loaded.edge(0).geometry.xy.tolist() == (
        net.edge(0).geometry.xy.tolist()
    )


def test_load_track_from_file(fixtures):
    """Test function `load_track_from_file`."""
    track = util.load_track_from_file(fixtures / "straight_track.csv")
    assert len(track) == 5
    assert track.samples[0] == Sample(1.0, 100.0, 0.0)
    assert track.samples[-1] == Sample(5.0, 900.0, 0.0)


def test_load_track_from_string_without_header():
    """Test function `load_track_from_string` without header."""
    track = util.load_track_from_string("0.5,1,2\n1.5,3,4\n\n")
    assert track.samples == [Sample(0.5, 1.0, 2.0), Sample(1.5, 3.0, 4.0)]


@pytest.mark.parametrize(
    "text",
    ["", "t,x,y\n", "1,2\n", "1,a,2\n", "2,0,0\n1,0,0\n"],
    ids=["empty", "header-only", "short-row", "bad-value", "unordered"],
)
def test_load_track_from_string_invalid(text):
    """Test function `load_track_from_string` for invalid input."""
    with pytest.raises(ValueError) as exc_info:
        util.load_track_from_string(text)
    print(exc_info.value)


def test_write_track(tmp_path):
    """Test functions `dump_track` and `write_track`."""
    track = Track([Sample(0.1, 1 / 3, -2.5), Sample(1.0, 1e-9, 1e9)])
    assert util.dump_track(track).splitlines()[0] == "t,x,y"
    util.write_track(track, tmp_path / "track.csv")
    assert util.load_track_from_file(tmp_path / "track.csv") == track


def test_load_trackset_from_string():
    """Test function `load_trackset_from_string`."""
    trackset = util.load_trackset_from_string(
        "# first\n1,0,0\n2,10,0\n# second\nt,x,y\n1.5,5,0\n"
    )
    assert len(trackset.tracks) == 2
    assert len(trackset) == 3
    assert trackset.tracks[1].samples == [Sample(1.5, 5.0, 0.0)]


def test_load_trackset_directory(tmp_path):
    """Test function `load_trackset` for a directory."""
    (tmp_path / "b.csv").write_text("1,10,0\n2,30,0\n", encoding="utf-8")
    (tmp_path / "a.csv").write_text("t,x,y\n1,0,0\n", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("-", encoding="utf-8")
    trackset = util.load_trackset(tmp_path)
    assert [len(track) for track in trackset.tracks] == [1, 2]


def test_load_trackset_file(tmp_path):
    """Test function `load_trackset` for a multi-section file."""
    (tmp_path / "tracks.csv").write_text(
        "1,0,0\n#\n1,10,0\n#\n1,20,0\n", encoding="utf-8"
    )
    assert len(util.load_trackset(tmp_path / "tracks.csv").tracks) == 3


@pytest.mark.parametrize(
    "name",
    ["missing.csv", "empty-directory"],
)
def test_load_trackset_invalid(tmp_path, name):
    """Test function `load_trackset` for missing input."""
    (tmp_path / "empty-directory").mkdir()
    with pytest.raises(ValueError) as exc_info:
        util.load_trackset(tmp_path / name)
    print(exc_info.value)


@pytest.fixture(name="route")
def _route():
    return RoutePath.from_segments(
        [PathSegment(0, 10.0, 100.0), PathSegment(1, 0.0, 40.0, False)]
    )


def test_load_route_path_match_result(tmp_path, route):
    """Test function `load_route_path` for a match result."""
    util.write_match_result(
        MatchResult([RoadPoint(0, 10.0), RoadPoint(1, 0.0)], route),
        tmp_path / "match.json",
    )
    assert util.load_route_path(tmp_path / "match.json") == route
    assert util.load_match_result(tmp_path / "match.json").path == route


def test_load_route_path_ground_truth(tmp_path, route):
    """Test function `load_route_path` for a ground truth."""
    truth = GroundTruth(
        route, [10.0, 12.0], [TruePosition(1.0, 20.0, 0.0, 10.0)]
    )
    util.write_ground_truth(truth, tmp_path / "truth.json")
    assert util.load_route_path(tmp_path / "truth.json") == route
    assert util.load_ground_truth(tmp_path / "truth.json") == truth


def test_load_route_path_plain(tmp_path, route):
    """Test function `load_route_path` for a plain path document."""
    (tmp_path / "path.json").write_text(
        json.dumps(route.json), encoding="utf-8"
    )
    assert util.load_route_path(tmp_path / "path.json") == route


@pytest.mark.parametrize(
    "text",
    ["[]", json.dumps({"path": {"totalLength": 1.0}})],
    ids=["not-an-object", "missing-segments"],
)
def test_load_route_path_invalid(tmp_path, text):
    """Test function `load_route_path` for invalid documents."""
    (tmp_path / "path.json").write_text(text, encoding="utf-8")
    with pytest.raises(ValueError) as exc_info:
        util.load_route_path(tmp_path / "path.json")
    print(exc_info.value)


def test_load_match_result_invalid(tmp_path):
    """Test function `load_match_result` for a non-object document."""
    (tmp_path / "match.json").write_text("1", encoding="utf-8")
    with pytest.raises(ValueError) as exc_info:
        util.load_match_result(tmp_path / "match.json")
    print(exc_info.value)


def test_load_sweep_spec_from_file(tmp_path):
    """Test function `load_sweep_spec_from_file`."""
    (tmp_path / "sweep.yaml").write_text(
        """sigmas: [0, 10]
taus: [5]
lambdas: [0.1, auto]
methods: [single, iterative]
trackCounts: [2]
routes: 3
instances: 2
seed: 11
""",
        encoding="utf-8",
    )
    spec = util.load_sweep_spec_from_file(tmp_path / "sweep.yaml")
    assert spec.sigmas == [0, 10]
    assert spec.lambdas == [0.1, "auto"]
    assert spec.methods == [MatchMethod.SINGLE, MatchMethod.ITERATIVE]
    assert spec.track_counts == [2]
    assert (spec.routes, spec.instances, spec.seed) == (3, 2, 11)


@pytest.mark.parametrize(
    "text",
    [
        "sigmas: [1]\ntaus: [1]\nlambdas: [1]\nmethods: [fast]\n",
        "sigmas: [1]\ntaus: [1]\nlambdas: [1]\n",
        "sigmas: []\ntaus: [1]\nlambdas: [1]\nmethods: [single]\n",
    ],
    ids=["unknown-method", "missing-methods", "empty-grid"],
)
def test_load_sweep_spec_from_string_invalid(text):
    """Test function `load_sweep_spec_from_string` for invalid specs."""
    with pytest.raises(ValueError) as exc_info:
        util.load_sweep_spec_from_string(text)
    print(exc_info.value)
