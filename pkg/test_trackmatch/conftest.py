from pathlib import Path

import pytest

from trackmatch.models import Sample, Track
from trackmatch.components.geometry import Point, Polyline
from trackmatch.components.road_network import (
    Node,
    Edge,
    RoadNetwork,
    generate_grid_network,
)


@pytest.fixture(scope="session", name="fixtures")
def _fixtures():
    return Path("test_trackmatch/fixtures/")


@pytest.fixture(scope="session", name="grid_4x4")
def _grid_4x4():
    """Returns a two-way 4x4-grid network with 100 m spacing."""
    return generate_grid_network(4, 4, 100.0)


@pytest.fixture(scope="session", name="grid_5x5")
def _grid_5x5():
    """Returns a two-way 5x5-grid network with 100 m spacing."""
    return generate_grid_network(5, 5, 100.0)


@pytest.fixture(scope="session", name="grid_10x10")
def _grid_10x10():
    """Returns a two-way 10x10-grid network with 200 m spacing."""
    return generate_grid_network(10, 10, 200.0)


@pytest.fixture(scope="session", name="grid_20x20")
def _grid_20x20():
    """Returns a two-way 20x20-grid network with 500 m spacing."""
    return generate_grid_network(20, 20, 500.0)


@pytest.fixture(scope="session", name="straight_road")
def _straight_road():
    """Returns a network of a single 1000 m road along the x-axis."""
    return RoadNetwork(
        [Node(0, Point(0.0, 0.0)), Node(1, Point(1000.0, 0.0))],
        [Edge(0, 0, 1, Polyline([(0.0, 0.0), (1000.0, 0.0)]), 10.0)],
    )


@pytest.fixture(scope="session", name="lone_edge")
def _lone_edge():
    """Returns a network of a single 90 m road along the x-axis."""
    return RoadNetwork(
        [Node(0, Point(0.0, 0.0)), Node(1, Point(90.0, 0.0))],
        [Edge(0, 0, 1, Polyline([(0.0, 0.0), (90.0, 0.0)]), 10.0)],
    )


@pytest.fixture(scope="session", name="oneway_square")
def _oneway_square():
    """
    Returns a square of four 100 m roads where only the first one
    (node 0 to node 1) is one-way.
    """
    locations = [(0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)]
    nodes = [Node(i, Point(*xy)) for i, xy in enumerate(locations)]
    edges = [
        Edge(
            i,
            i,
            (i + 1) % 4,
            Polyline([locations[i], locations[(i + 1) % 4]]),
            10.0,
            oneway=i == 0,
        )
        for i in range(4)
    ]
    return RoadNetwork(nodes, edges)


@pytest.fixture(name="make_track")
def _make_track():
    """
    Returns a factory for `Track`s from `(x, y)`-pairs with timestamps
    `1, 2, ...` (shifted by `t0`).
    """
    def make_track(xy, t0: float = 0.0) -> Track:
        return Track(
            [
                Sample(t0 + i + 1.0, float(x), float(y))
                for i, (x, y) in enumerate(xy)
            ]
        )

    return make_track
