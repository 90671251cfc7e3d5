"""Test module for the road-network component."""

import math

import pytest
import numpy as np
import networkx as nx
from dcm_common import LoggingContext as Context, Logger

from trackmatch.models import (
    CoordinateSystem,
    NetworkNode,
    NetworkEdge,
    NetworkDocument,
    RoadPoint,
    PathSegment,
    RoutePath,
)
from trackmatch.components.common import UnreachableError
from trackmatch.components.geometry import (
    Point,
    Polyline,
    distance,
    project_to_segment,
)
from trackmatch.components.road_network import (
    Node,
    Edge,
    RoadNetwork,
    driving_distance,
    shortest_route,
    one_to_many_distances,
    edges_within_radius,
    traversal_measure,
    path_polyline,
    network_from_document,
    network_to_document,
    generate_grid_network,
)


def _oracle_distances(net: RoadNetwork):
    """
    Returns a driving-distance function built from an independent
    all-pairs computation over the node graph.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(net.nodes)))
    for edge in net.edges:
        for u, v in [(edge.from_, edge.to)] + (
            [] if edge.oneway else [(edge.to, edge.from_)]
        ):
            if not graph.has_edge(u, v) or graph[u][v]["w"] > edge.length:
                graph.add_edge(u, v, w=edge.length)
    nodes = dict(nx.all_pairs_dijkstra_path_length(graph, weight="w"))

    def oracle(a: RoadPoint, b: RoadPoint) -> float:
        ea, eb = net.edge(a.edge_id), net.edge(b.edge_id)
        best = math.inf
        if a.edge_id == b.edge_id and (b.offset >= a.offset or not ea.oneway):
            best = abs(b.offset - a.offset)
        leave = [(ea.to, ea.length - a.offset)]
        if not ea.oneway:
            leave.append((ea.from_, a.offset))
        arrive = [(eb.from_, b.offset)]
        if not eb.oneway:
            arrive.append((eb.to, eb.length - b.offset))
        for x, cx in leave:
            for y, cy in arrive:
                if y in nodes[x]:
                    best = min(best, cx + nodes[x][y] + cy)
        return best

    return oracle


def _random_points(net: RoadNetwork, rng, count: int) -> list[RoadPoint]:
    points = []
    for _ in range(count):
        edge = net.edge(int(rng.integers(len(net.edges))))
        points.append(
            RoadPoint(edge.id_, float(rng.uniform(0, edge.length)))
        )
    return points


def test_generate_grid_network_2x2():
    """Test function `generate_grid_network` for a 2x2-grid."""
    net = generate_grid_network(2, 2, 1.0)
    assert len(net.nodes) == 4
    assert len(net.edges) == 4
    assert [tuple(node.location) for node in net.nodes] == [
        (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)
    ]
    assert all(not edge.oneway for edge in net.edges)
    assert all(8.0 <= edge.speed_limit <= 16.0 for edge in net.edges)


@pytest.mark.parametrize(
    ("rows", "cols", "edges"),
    [(10, 10, 180), (20, 20, 760), (3, 7, 32)],
)
def test_generate_grid_network_edge_count(rows, cols, edges):
    """Test number of edges of function `generate_grid_network`."""
    net = generate_grid_network(rows, cols, 100.0)
    assert len(net.nodes) == rows * cols
    assert len(net.edges) == edges


def test_generate_grid_network_deterministic():
    """Test reproducibility of function `generate_grid_network`."""
    a = generate_grid_network(6, 6, 100.0, 20.0, 0.2, seed=3)
    b = generate_grid_network(6, 6, 100.0, 20.0, 0.2, seed=3)
    c = generate_grid_network(6, 6, 100.0, 20.0, 0.2, seed=4)
    assert network_to_document(a).json == network_to_document(b).json
    assert network_to_document(a).json != network_to_document(c).json


def test_generate_grid_network_removal_keeps_connectivity():
    """Test edge removal of function `generate_grid_network`."""
    net = generate_grid_network(20, 20, 100.0, removal_prob=0.1, seed=0)
    graph = nx.Graph((edge.from_, edge.to) for edge in net.edges)
    graph.add_nodes_from(range(len(net.nodes)))
    assert nx.is_connected(graph)
    assert 620 < len(net.edges) < 740


def test_generate_grid_network_perturbation():
    """Test node perturbation of function `generate_grid_network`."""
    net = generate_grid_network(5, 5, 100.0, perturbation=10.0, seed=1)
    for node in net.nodes:
        r, c = divmod(node.id_, 5)
        assert abs(node.location.x - c * 100.0) <= 10.0
        assert abs(node.location.y - r * 100.0) <= 10.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rows": 1, "cols": 5, "spacing": 100.0},
        {"rows": 5, "cols": 5, "spacing": 0.0},
        {"rows": 5, "cols": 5, "spacing": 100.0, "perturbation": 50.0},
        {"rows": 5, "cols": 5, "spacing": 100.0, "removal_prob": 1.0},
        {"rows": 5, "cols": 5, "spacing": 100.0, "speed_range": (5.0, 1.0)},
    ],
    ids=["rows", "spacing", "perturbation", "removal", "speed-range"],
)
def test_generate_grid_network_invalid(kwargs):
    """Test rejection of bad arguments by `generate_grid_network`."""
    with pytest.raises(ValueError) as exc_info:
        generate_grid_network(**kwargs)
    print(exc_info.value)


def test_road_network_invalid_geometry():
    """Test rejection of an edge that does not end at its node."""
    with pytest.raises(ValueError) as exc_info:
        RoadNetwork(
            [Node(0, Point(0, 0)), Node(1, Point(10, 0))],
            [Edge(0, 0, 1, Polyline([(0, 0), (10, 1)]), 10.0)],
        )
    print(exc_info.value)


def test_road_network_graph(straight_road: RoadNetwork, oneway_square):
    """Test the directed graph of `RoadNetwork`."""
    assert straight_road.graph.has_edge(0, 1)
    assert straight_road.graph.has_edge(1, 0)
    assert oneway_square.graph.has_edge(0, 1)
    assert not oneway_square.graph.has_edge(1, 0)
    assert oneway_square.outgoing(1) == [(1, True)]
    assert sorted(oneway_square.outgoing(0)) == [(0, True), (3, False)]


def test_road_point_snapping(straight_road: RoadNetwork):
    """Test method `RoadNetwork.road_point`."""
    assert straight_road.road_point(0, 1e-9).offset == 0.0
    assert straight_road.road_point(0, 1000.0 - 1e-9).offset == 1000.0
    assert straight_road.road_point(0, 250.0) == RoadPoint(0, 250.0)
    with pytest.raises(ValueError):
        straight_road.road_point(0, 1000.5)
    with pytest.raises(ValueError):
        straight_road.road_point(1, 0.0)


def test_driving_distance_same_point(grid_5x5: RoadNetwork):
    """Test function `driving_distance` for identical points."""
    point = RoadPoint(3, 42.0)
    assert driving_distance(grid_5x5, point, point) == 0.0


def test_driving_distance_same_edge(grid_5x5: RoadNetwork):
    """Test function `driving_distance` along a two-way edge."""
    assert driving_distance(
        grid_5x5, RoadPoint(0, 10.0), RoadPoint(0, 40.0)
    ) == pytest.approx(30.0)
    assert driving_distance(
        grid_5x5, RoadPoint(0, 40.0), RoadPoint(0, 10.0)
    ) == pytest.approx(30.0)


def test_driving_distance_grid(grid_5x5: RoadNetwork):
    """Test function `driving_distance` across the grid."""
    # horizontal edge 0 (node 0 to 1) to horizontal edge 19 (node 23 to 24)
    assert driving_distance(
        grid_5x5, RoadPoint(0, 50.0), RoadPoint(19, 50.0)
    ) == pytest.approx(50.0 + 600.0 + 50.0)


def test_driving_distance_oneway(oneway_square):
    """Test function `driving_distance` against a one-way edge."""
    assert driving_distance(
        oneway_square, RoadPoint(0, 10.0), RoadPoint(0, 40.0)
    ) == pytest.approx(30.0)
    assert driving_distance(
        oneway_square, RoadPoint(0, 40.0), RoadPoint(0, 10.0)
    ) == pytest.approx(60.0 + 300.0 + 10.0)


def test_driving_distance_unreachable():
    """Test function `driving_distance` for an unreachable point."""
    net = RoadNetwork(
        [Node(0, Point(0, 0)), Node(1, Point(100, 0))],
        [Edge(0, 0, 1, Polyline([(0, 0), (100, 0)]), 10.0, oneway=True)],
    )
    with pytest.raises(UnreachableError) as exc_info:
        driving_distance(net, RoadPoint(0, 50.0), RoadPoint(0, 20.0))
    print(exc_info.value)
    assert one_to_many_distances(
        net, RoadPoint(0, 50.0), [RoadPoint(0, 20.0), RoadPoint(0, 80.0)]
    ) == [math.inf, pytest.approx(30.0)]


def test_driving_distance_brute_force():
    """Test function `driving_distance` against an all-pairs oracle."""
    net = generate_grid_network(
        5, 5, 100.0, perturbation=20.0, removal_prob=0.2, seed=5
    )
    oracle = _oracle_distances(net)
    rng = np.random.default_rng(0)
    points = _random_points(net, rng, 40)
    for a, b in zip(points, reversed(points)):
        assert driving_distance(net, a, b) == pytest.approx(oracle(a, b))


def test_driving_distance_oneway_brute_force(oneway_square):
    """
    Test function `driving_distance` against an all-pairs oracle on a
    network with a one-way edge.
    """
    oracle = _oracle_distances(oneway_square)
    rng = np.random.default_rng(1)
    points = _random_points(oneway_square, rng, 30)
    for a in points[:10]:
        for b in points[10:]:
            assert driving_distance(oneway_square, a, b) == pytest.approx(
                oracle(a, b)
            )


def test_shortest_route(grid_5x5: RoadNetwork):
    """Test function `shortest_route`."""
    rng = np.random.default_rng(2)
    points = _random_points(grid_5x5, rng, 20)
    for a, b in zip(points, points[1:]):
        route = shortest_route(grid_5x5, a, b)
        assert route.total_length == pytest.approx(
            driving_distance(grid_5x5, a, b)
        )
        start, end = route.start, route.end
        assert distance(
            grid_5x5.location(start), grid_5x5.location(a)
        ) == pytest.approx(0.0, abs=1e-6)
        assert distance(
            grid_5x5.location(end), grid_5x5.location(b)
        ) == pytest.approx(0.0, abs=1e-6)
        # consecutive segments are connected
        for s1, s2 in zip(route.segments, route.segments[1:]):
            assert distance(
                grid_5x5.location(RoadPoint(s1.edge_id, s1.exit)),
                grid_5x5.location(RoadPoint(s2.edge_id, s2.entry)),
            ) == pytest.approx(0.0, abs=1e-6)


def test_shortest_route_same_point(grid_5x5: RoadNetwork):
    """Test function `shortest_route` for identical points."""
    route = shortest_route(grid_5x5, RoadPoint(4, 30.0), RoadPoint(4, 30.0))
    assert route.is_point
    assert route.start == RoadPoint(4, 30.0)


def test_one_to_many_distances(grid_5x5: RoadNetwork):
    """Test function `one_to_many_distances`."""
    rng = np.random.default_rng(3)
    source, *targets = _random_points(grid_5x5, rng, 15)
    cache = {}
    distances = one_to_many_distances(grid_5x5, source, targets, cache)
    assert distances == pytest.approx(
        [driving_distance(grid_5x5, source, target) for target in targets]
    )
    assert cache
    assert one_to_many_distances(grid_5x5, source, targets, cache) == (
        distances
    )
    assert one_to_many_distances(grid_5x5, source, [source]) == [0.0]
    assert one_to_many_distances(grid_5x5, source, []) == []


def test_edges_within_radius(grid_5x5: RoadNetwork):
    """Test function `edges_within_radius`."""
    assert edges_within_radius(grid_5x5, Point(50.0, 0.0), 1.0) == {0}
    assert edges_within_radius(grid_5x5, Point(50.0, -500.0), 100.0) == set()
    assert edges_within_radius(grid_5x5, Point(0.0, 0.0), 1.0) == {0, 20}
    with pytest.raises(ValueError):
        edges_within_radius(grid_5x5, Point(0.0, 0.0), 0.0)


def test_edges_within_radius_brute_force():
    """Test function `edges_within_radius` against a linear scan."""
    net = generate_grid_network(6, 6, 100.0, perturbation=30.0, seed=7)
    rng = np.random.default_rng(4)
    for _ in range(100):
        p = Point(*rng.uniform(-100, 600, size=2))
        r = float(rng.uniform(1.0, 120.0))
        expected = {
            edge.id_
            for edge in net.edges
            if any(
                project_to_segment(p, *edge.geometry.segment(i))[2] <= r
                for i in range(edge.geometry.segment_count)
            )
        }
        assert edges_within_radius(net, p, r) == expected


def test_traversal_measure():
    """Test function `traversal_measure`."""
    path = RoutePath.from_segments(
        [
            PathSegment(3, 0.0, 50.0, True),
            PathSegment(3, 0.0, 50.0, False),
            PathSegment(1, 20.0, 40.0, True),
            PathSegment(1, 30.0, 60.0, True),
            PathSegment(1, 80.0, 90.0, True),
            PathSegment(2, 5.0, 5.0, True),
        ]
    )
    assert traversal_measure(path) == {
        1: [(20.0, 60.0), (80.0, 90.0)],
        3: [(0.0, 50.0)],
    }


def test_path_polyline(grid_5x5: RoadNetwork):
    """Test function `path_polyline`."""
    route = shortest_route(grid_5x5, RoadPoint(0, 50.0), RoadPoint(19, 50.0))
    geometry = path_polyline(grid_5x5, route)
    assert isinstance(geometry, Polyline)
    assert geometry.length == pytest.approx(route.total_length)
    assert tuple(geometry.vertices[0]) == pytest.approx((50.0, 0.0))
    assert tuple(geometry.vertices[-1]) == pytest.approx((350.0, 400.0))
    point = shortest_route(grid_5x5, RoadPoint(0, 50.0), RoadPoint(0, 50.0))
    assert path_polyline(grid_5x5, point) == Point(50.0, 0.0)


def test_network_from_document_component():
    """
    Test function `network_from_document` for a document with an
    isolated node.
    """
    log = Logger(default_origin="Test")
    net = network_from_document(
        NetworkDocument(
            nodes=[
                NetworkNode(5, 0.0, 0.0),
                NetworkNode(7, 100.0, 0.0),
                NetworkNode(9, 500.0, 500.0),
            ],
            edges=[NetworkEdge(11, 5, 7, 10.0)],
        ),
        log=log,
    )
    assert len(net.nodes) == 2
    assert len(net.edges) == 1
    assert net.edge(0).from_ == 0 and net.edge(0).to == 1
    assert net.graph.has_edge(0, 1) and net.graph.has_edge(1, 0)
    assert Context.WARNING in log
    print(log.fancy())


def test_network_from_document_geometry():
    """Test function `network_from_document` with an edge geometry."""
    net = network_from_document(
        NetworkDocument(
            nodes=[NetworkNode(0, 0.0, 0.0), NetworkNode(1, 100.0, 0.0)],
            edges=[
                NetworkEdge(
                    0, 0, 1, 10.0, True,
                    [[0.0, 0.0], [50.0, 50.0], [100.0, 0.0]],
                )
            ],
        )
    )
    assert net.edge(0).oneway
    assert net.edge(0).length == pytest.approx(2 * math.hypot(50, 50))


def test_network_from_document_wgs84():
    """Test function `network_from_document` for geographic input."""
    net = network_from_document(
        NetworkDocument(
            nodes=[NetworkNode(0, 7.0, 51.0), NetworkNode(1, 7.0, 51.001)],
            edges=[NetworkEdge(0, 0, 1, 10.0)],
            crs=CoordinateSystem.WGS84,
        )
    )
    assert net.edge(0).length == pytest.approx(111.195, abs=1e-2)


@pytest.mark.parametrize(
    "document",
    [
        NetworkDocument(nodes=[NetworkNode(0, 0.0, 0.0)], edges=[]),
        NetworkDocument(
            nodes=[NetworkNode(0, 0.0, 0.0), NetworkNode(0, 1.0, 0.0)],
            edges=[NetworkEdge(0, 0, 0, 10.0)],
        ),
        NetworkDocument(
            nodes=[NetworkNode(0, 0.0, 0.0), NetworkNode(1, 1.0, 0.0)],
            edges=[NetworkEdge(0, 0, 2, 10.0)],
        ),
        NetworkDocument(
            nodes=[NetworkNode(0, 0.0, 0.0), NetworkNode(1, 1.0, 0.0)],
            edges=[NetworkEdge(0, 0, 1, 0.0)],
        ),
    ],
    ids=["no-edges", "duplicate-node", "unknown-node", "speed-limit"],
)
def test_network_from_document_invalid(document):
    """Test rejection of bad documents by `network_from_document`."""
    with pytest.raises(ValueError) as exc_info:
        network_from_document(document)
    print(exc_info.value)


def test_network_to_document(grid_4x4: RoadNetwork):
    """Test function `network_to_document`."""
    document = network_to_document(grid_4x4)
    assert len(document.nodes) == 16
    assert len(document.edges) == 24
    copy = network_from_document(NetworkDocument.from_json(document.json))
    assert network_to_document(copy).json == document.json
