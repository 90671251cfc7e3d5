"""
This module defines the `RoadNetwork` component: the road graph,
driving-distance and route queries between road points, radius queries
and a synthetic grid-network generator.
"""

from typing import Optional
from dataclasses import dataclass
import math

import numpy as np
import networkx as nx
from dcm_common import Logger, LoggingContext as Context

from trackmatch.models import (
    CoordinateSystem,
    NetworkNode,
    NetworkEdge,
    NetworkDocument,
    RoadPoint,
    PathSegment,
    RoutePath,
)
from .common import UnreachableError
from .geometry import (
    Point,
    Polyline,
    QuadTree,
    distance,
    equirectangular,
)


_TAG = "Road Network"
ENDPOINT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Node:
    """Road-network node."""

    id_: int
    location: Point


@dataclass(frozen=True)
class Edge:
    """
    Road-network edge. A two-way edge (`oneway=False`) can be traversed
    in both directions.
    """

    id_: int
    from_: int
    to: int
    geometry: Polyline
    speed_limit: float
    oneway: bool = False

    @property
    def length(self) -> float:
        """Returns the edge length in meters."""
        return self.geometry.length


class RoadNetwork:
    """
    Immutable directed road graph.

    Keyword arguments:
    nodes -- nodes with ids `0, ..., len(nodes) - 1` (in that order)
    edges -- edges with ids `0, ..., len(edges) - 1` (in that order)
    snap_tolerance -- offsets closer than this to an edge end are
                      snapped onto the node
                      (default 1e-6)
    index_capacity -- quad-tree node capacity
                      (default 16)
    index_max_depth -- quad-tree maximum depth
                       (default 20)
    """

    def __init__(
        self,
        nodes: list[Node],
        edges: list[Edge],
        snap_tolerance: float = 1e-6,
        index_capacity: int = 16,
        index_max_depth: int = 20,
    ) -> None:
        if not nodes or not edges:
            raise ValueError("Road network must contain nodes and edges.")
        for i, node in enumerate(nodes):
            if node.id_ != i:
                raise ValueError(
                    f"Node ids must be dense (expected {i}, got {node.id_})."
                )
        for i, edge in enumerate(edges):
            if edge.id_ != i:
                raise ValueError(
                    f"Edge ids must be dense (expected {i}, got {edge.id_})."
                )
            self._validate_edge(edge, nodes)

        self._nodes = tuple(nodes)
        self._edges = tuple(edges)
        self.snap_tolerance = snap_tolerance

        self._adjacency: list[list[tuple[int, bool]]] = [[] for _ in nodes]
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(range(len(nodes)))
        for edge in edges:
            self._adjacency[edge.from_].append((edge.id_, True))
            self.graph.add_edge(
                edge.from_, edge.to, key=edge.id_, length=edge.length
            )
            if not edge.oneway:
                self._adjacency[edge.to].append((edge.id_, False))
                self.graph.add_edge(
                    edge.to, edge.from_, key=edge.id_, length=edge.length
                )

        self.index = QuadTree.from_segments(
            (
                (*edge.geometry.segment(i), (edge.id_, i))
                for edge in edges
                for i in range(edge.geometry.segment_count)
            ),
            index_capacity,
            index_max_depth,
        )

    @staticmethod
    def _validate_edge(edge: Edge, nodes: list[Node]) -> None:
        for node_id in (edge.from_, edge.to):
            if not 0 <= node_id < len(nodes):
                raise ValueError(
                    f"Edge {edge.id_} references unknown node {node_id}."
                )
        if edge.speed_limit <= 0:
            raise ValueError(
                f"Edge {edge.id_} has non-positive speed limit "
                + f"{edge.speed_limit}."
            )
        vertices = edge.geometry.vertices
        if (
            distance(vertices[0], nodes[edge.from_].location)
            > ENDPOINT_TOLERANCE
            or distance(vertices[-1], nodes[edge.to].location)
            > ENDPOINT_TOLERANCE
        ):
            raise ValueError(
                f"Geometry of edge {edge.id_} does not start and end at its "
                + "nodes."
            )

    @property
    def nodes(self) -> tuple[Node, ...]:
        """Returns all nodes."""
        return self._nodes

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Returns all edges."""
        return self._edges

    def node(self, node_id: int) -> Node:
        """Returns node `node_id`."""
        return self._nodes[node_id]

    def edge(self, edge_id: int) -> Edge:
        """Returns edge `edge_id`."""
        return self._edges[edge_id]

    def outgoing(self, node_id: int) -> list[tuple[int, bool]]:
        """
        Returns `(edge id, forward)`-pairs of all edges that can be
        entered at `node_id`.
        """
        return list(self._adjacency[node_id])

    def road_point(self, edge_id: int, offset: float) -> RoadPoint:
        """
        Returns a validated `RoadPoint`; offsets within the snap
        tolerance of an edge end are snapped onto that end.
        """
        if not 0 <= edge_id < len(self._edges):
            raise ValueError(f"Unknown edge {edge_id}.")
        length = self._edges[edge_id].length
        if not -self.snap_tolerance <= offset <= length + self.snap_tolerance:
            raise ValueError(
                f"Offset {offset} outside of edge {edge_id} "
                + f"[0, {length}]."
            )
        if offset <= self.snap_tolerance:
            offset = 0.0
        elif offset >= length - self.snap_tolerance:
            offset = length
        return RoadPoint(edge_id, float(offset))

    def location(self, point: RoadPoint) -> Point:
        """Returns the planar location of `point`."""
        return self._edges[point.edge_id].geometry.point_at(point.offset)

    def exits(self, point: RoadPoint) -> list[tuple[int, float]]:
        """
        Returns `(node id, cost)`-pairs of nodes that can be reached
        directly from `point` along its edge.
        """
        point = self.road_point(point.edge_id, point.offset)
        edge = self._edges[point.edge_id]
        result = [(edge.to, edge.length - point.offset)]
        if not edge.oneway or point.offset == 0:
            result.append((edge.from_, point.offset))
        return result

    def entries(self, point: RoadPoint) -> list[tuple[int, float]]:
        """
        Returns `(node id, cost)`-pairs of nodes from which `point` can
        be reached directly along its edge.
        """
        point = self.road_point(point.edge_id, point.offset)
        edge = self._edges[point.edge_id]
        result = [(edge.from_, point.offset)]
        if not edge.oneway or point.offset == edge.length:
            result.append((edge.to, edge.length - point.offset))
        return result

    def direct_distance(self, a: RoadPoint, b: RoadPoint) -> float:
        """
        Returns the distance from `a` to `b` along their common edge
        (`math.inf` if they are on different edges or the direction is
        not allowed).
        """
        if a.edge_id != b.edge_id:
            return math.inf
        a = self.road_point(a.edge_id, a.offset)
        b = self.road_point(b.edge_id, b.offset)
        if b.offset >= a.offset:
            return b.offset - a.offset
        if not self._edges[a.edge_id].oneway:
            return a.offset - b.offset
        return math.inf

    def node_distance(self, u: int, v: int) -> tuple[float, list[int]]:
        """
        Returns length and node sequence of a shortest path from node
        `u` to node `v` (bidirectional Dijkstra).
        """
        if u == v:
            return 0.0, [u]
        try:
            return nx.bidirectional_dijkstra(self.graph, u, v, weight="length")
        except nx.NetworkXNoPath as exc_info:
            raise UnreachableError(
                f"Node {v} is not reachable from node {u}."
            ) from exc_info

    def node_distances_from(self, u: int) -> dict[int, float]:
        """Returns shortest-path lengths from node `u` to all nodes."""
        return nx.single_source_dijkstra_path_length(
            self.graph, u, weight="length"
        )

    def connecting_edge(self, u: int, v: int) -> tuple[int, bool]:
        """
        Returns `(edge id, forward)` of the shortest edge leading from
        node `u` to node `v`.
        """
        edge_id = min(
            self.graph[u][v],
            key=lambda key: (self.graph[u][v][key]["length"], key),
        )
        edge = self._edges[edge_id]
        return edge_id, edge.from_ == u and edge.to == v


def _validated(net: RoadNetwork, point: RoadPoint) -> RoadPoint:
    return net.road_point(point.edge_id, point.offset)


def _best_connection(
    net: RoadNetwork, a: RoadPoint, b: RoadPoint
) -> tuple[float, Optional[tuple[int, int, list[int]]]]:
    """
    Returns the driving distance from `a` to `b` and either `None`
    (direct connection along the common edge) or the
    `(exit node, entry node, node path)` of the best connection.
    """
    best = net.direct_distance(a, b)
    best_connection = None
    for x, exit_cost in net.exits(a):
        for y, entry_cost in net.entries(b):
            if exit_cost + entry_cost >= best:
                continue
            try:
                length, nodes = net.node_distance(x, y)
            except UnreachableError:
                continue
            total = exit_cost + length + entry_cost
            if total < best:
                best = total
                best_connection = (x, y, nodes)
    if math.isinf(best):
        raise UnreachableError(
            f"Road point {b.json} is not reachable from {a.json}."
        )
    return best, best_connection


def driving_distance(net: RoadNetwork, a: RoadPoint, b: RoadPoint) -> float:
    """
    Returns the length of a shortest drivable path from `a` to `b`.

    Raises `UnreachableError` if no such path exists.
    """
    a, b = _validated(net, a), _validated(net, b)
    return _best_connection(net, a, b)[0]


def shortest_route(net: RoadNetwork, a: RoadPoint, b: RoadPoint) -> RoutePath:
    """
    Returns a shortest drivable path from `a` to `b` as `RoutePath`.

    Raises `UnreachableError` if no such path exists.
    """
    a, b = _validated(net, a), _validated(net, b)
    _, connection = _best_connection(net, a, b)

    if connection is None:
        segments = [
            PathSegment(
                a.edge_id,
                min(a.offset, b.offset),
                max(a.offset, b.offset),
                b.offset >= a.offset,
            )
        ]
    else:
        x, y, nodes = connection
        segments = []
        edge_a = net.edge(a.edge_id)
        if x == edge_a.to and x != edge_a.from_:
            segments.append(
                PathSegment(a.edge_id, a.offset, edge_a.length, True)
            )
        elif x == edge_a.from_ and x != edge_a.to:
            segments.append(PathSegment(a.edge_id, 0.0, a.offset, False))
        else:
            # loop edge: leave in the cheaper allowed direction
            if edge_a.oneway or edge_a.length - a.offset <= a.offset:
                segments.append(
                    PathSegment(a.edge_id, a.offset, edge_a.length, True)
                )
            else:
                segments.append(PathSegment(a.edge_id, 0.0, a.offset, False))
        for u, v in zip(nodes, nodes[1:]):
            edge_id, forward = net.connecting_edge(u, v)
            segments.append(
                PathSegment(edge_id, 0.0, net.edge(edge_id).length, forward)
            )
        edge_b = net.edge(b.edge_id)
        if y == edge_b.from_ and (
            y != edge_b.to or edge_b.oneway or b.offset <= edge_b.length / 2
        ):
            segments.append(PathSegment(b.edge_id, 0.0, b.offset, True))
        else:
            segments.append(
                PathSegment(b.edge_id, b.offset, edge_b.length, False)
            )
        segments = [segment for segment in segments if segment.length > 0]

    if not segments or all(segment.length == 0 for segment in segments):
        segments = [PathSegment(a.edge_id, a.offset, a.offset, True)]
    return RoutePath.from_segments(segments)


def one_to_many_distances(
    net: RoadNetwork,
    a: RoadPoint,
    targets: list[RoadPoint],
    cache: Optional[dict[int, dict[int, float]]] = None,
) -> list[float]:
    """
    Returns driving distances from `a` to every point in `targets`
    (`math.inf` for unreachable targets).

    Keyword arguments:
    net -- road network
    a -- source point
    targets -- target points
    cache -- optional mapping of node id to single-source distances
             that is read and extended by this call; enables reuse
             across calls with the same network
             (default None)
    """
    if not targets:
        return []
    a = _validated(net, a)
    if cache is None:
        cache = {}
    exits = net.exits(a)
    for x, _ in exits:
        if x not in cache:
            cache[x] = net.node_distances_from(x)

    result = []
    for target in targets:
        target = _validated(net, target)
        best = net.direct_distance(a, target)
        entries = net.entries(target)
        for x, exit_cost in exits:
            lengths = cache[x]
            for y, entry_cost in entries:
                if y in lengths:
                    best = min(best, exit_cost + lengths[y] + entry_cost)
        result.append(best)
    return result


def nearest_points_within(
    net: RoadNetwork, p: Point, r: float
) -> dict[int, tuple[float, float]]:
    """
    Returns a mapping of the ids of all edges whose geometry comes
    within `r` of `p` to the `(offset, distance)` of the point on that
    edge closest to `p`.
    """
    result = {}
    for hit in net.index.within(p, r):
        edge_id, i = hit.segment.owner
        if edge_id in result and result[edge_id][1] <= hit.dist:
            continue
        geometry = net.edge(edge_id).geometry
        offset = min(geometry.length, float(geometry.cum_length[i]) + hit.offset)
        result[edge_id] = (offset, hit.dist)
    return result


def edges_within_radius(net: RoadNetwork, p: Point, r: float) -> set[int]:
    """Returns the ids of all edges whose geometry comes within `r` of `p`."""
    if r <= 0:
        raise ValueError(f"Radius must be positive (got {r}).")
    return set(nearest_points_within(net, p, r))


def traversal_measure(path: RoutePath) -> dict[int, list[tuple[float, float]]]:
    """
    Returns a mapping of edge id to the sorted, merged and disjoint
    intervals of that edge covered by `path` (set union; traversal
    direction and multiplicity are ignored).
    """
    intervals: dict[int, list[tuple[float, float]]] = {}
    for segment in path.segments:
        if segment.length > 0:
            intervals.setdefault(segment.edge_id, []).append(
                (segment.lo, segment.hi)
            )
    result = {}
    for edge_id, edge_intervals in sorted(intervals.items()):
        merged = []
        for lo, hi in sorted(edge_intervals):
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        result[edge_id] = merged
    return result


def path_polyline(net: RoadNetwork, path: RoutePath) -> Polyline | Point:
    """
    Returns the geometry of `path` as `Polyline` (or the location of a
    zero-length path as `Point`).
    """
    if path.total_length <= 0:
        return net.location(path.start)
    parts = [
        net.edge(segment.edge_id).geometry.substring(
            segment.lo, segment.hi, segment.forward
        )
        for segment in path.segments
        if segment.length > 0
    ]
    vertices = np.vstack(parts)
    # drop repeated vertices at segment joints
    keep = np.ones(len(vertices), dtype=bool)
    keep[1:] = np.any(np.diff(vertices, axis=0) != 0, axis=1)
    return Polyline(vertices[keep])


def network_from_document(
    document: NetworkDocument,
    snap_tolerance: float = 1e-6,
    log: Optional[Logger] = None,
    index_capacity: int = 16,
    index_max_depth: int = 20,
) -> RoadNetwork:
    """
    Returns a `RoadNetwork` for `document`. Only the largest (weakly)
    connected component is retained; node and edge ids are renumbered
    densely in the order of the original ids. `snap_tolerance`,
    `index_capacity` and `index_max_depth` are passed to the network.
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    if not document.nodes or not document.edges:
        raise ValueError("Network document contains no nodes or no edges.")

    node_ids = [node.id_ for node in document.nodes]
    if len(set(node_ids)) != len(node_ids):
        raise ValueError("Network document contains duplicate node ids.")
    edge_ids = [edge.id_ for edge in document.edges]
    if len(set(edge_ids)) != len(edge_ids):
        raise ValueError("Network document contains duplicate edge ids.")

    # coordinates
    if document.crs is CoordinateSystem.WGS84:
        lonlat = [(node.x, node.y) for node in document.nodes]
        origin = tuple(np.asarray(lonlat, dtype=float).mean(axis=0))
        locations = dict(
            zip(node_ids, equirectangular(lonlat, origin))
        )
        geometries = {
            edge.id_: (
                None
                if edge.geometry is None
                else equirectangular(edge.geometry, origin)
            )
            for edge in document.edges
        }
    else:
        locations = {node.id_: Point(node.x, node.y) for node in document.nodes}
        geometries = {
            edge.id_: (
                None
                if edge.geometry is None
                else [Point(x, y) for x, y in edge.geometry]
            )
            for edge in document.edges
        }

    # largest component
    graph = nx.Graph()
    graph.add_nodes_from(node_ids)
    for edge in document.edges:
        for node_id in (edge.from_, edge.to):
            if node_id not in locations:
                raise ValueError(
                    f"Edge {edge.id_} references unknown node {node_id}."
                )
        graph.add_edge(edge.from_, edge.to)
    components = sorted(
        nx.connected_components(graph), key=lambda c: (-len(c), min(c))
    )
    component = components[0]
    dropped = len(node_ids) - len(component)
    if dropped:
        log.log(
            Context.WARNING,
            body=(
                f"Dropped {dropped} node(s) outside of the largest connected "
                + "component."
            ),
        )

    node_map = {
        old: new for new, old in enumerate(sorted(component))
    }
    nodes = [Node(new, locations[old]) for old, new in node_map.items()]
    edges = []
    for edge in sorted(document.edges, key=lambda e: e.id_):
        if edge.from_ not in node_map:
            continue
        geometry = geometries[edge.id_] or [
            locations[edge.from_], locations[edge.to]
        ]
        try:
            polyline = Polyline(geometry)
        except ValueError as exc_info:
            raise ValueError(
                f"Bad geometry for edge {edge.id_}: {exc_info}"
            ) from exc_info
        edges.append(
            Edge(
                len(edges),
                node_map[edge.from_],
                node_map[edge.to],
                polyline,
                float(edge.speed_limit),
                bool(edge.oneway),
            )
        )
    if not edges:
        raise ValueError("Network contains no edges after filtering.")
    return RoadNetwork(
        nodes, edges, snap_tolerance, index_capacity, index_max_depth
    )


def network_to_document(net: RoadNetwork) -> NetworkDocument:
    """Returns a (planar) `NetworkDocument` for `net`."""
    return NetworkDocument(
        nodes=[
            NetworkNode(node.id_, node.location.x, node.location.y)
            for node in net.nodes
        ],
        edges=[
            NetworkEdge(
                edge.id_,
                edge.from_,
                edge.to,
                edge.speed_limit,
                edge.oneway,
                (
                    edge.geometry.xy.tolist()
                    if edge.geometry.segment_count > 1
                    else None
                ),
            )
            for edge in net.edges
        ],
    )


def generate_grid_network(
    rows: int,
    cols: int,
    spacing: float,
    perturbation: float = 0.0,
    removal_prob: float = 0.0,
    speed_range: tuple[float, float] = (8.0, 16.0),
    seed: int = 0,
    **kwargs,
) -> RoadNetwork:
    """
    Returns a connected, two-way grid network.

    Node `(r, c)` has id `r * cols + c` and is located at
    `(c * spacing, r * spacing)` plus a uniform perturbation in
    `[-perturbation, perturbation]` per axis. Every edge is removed with
    probability `removal_prob` unless its removal disconnects the grid.
    Speed limits are drawn uniformly from `speed_range`.
    Remaining `kwargs` are passed to `RoadNetwork`.
    """
    if rows < 2 or cols < 2:
        raise ValueError(f"Grid needs at least 2x2 nodes (got {rows}x{cols}).")
    if spacing <= 0:
        raise ValueError(f"Grid spacing must be positive (got {spacing}).")
    if not 0 <= perturbation < spacing / 2:
        raise ValueError(
            f"Perturbation must be in [0, spacing/2) (got {perturbation})."
        )
    if not 0 <= removal_prob < 1:
        raise ValueError(
            f"Removal probability must be in [0, 1) (got {removal_prob})."
        )
    if not 0 < speed_range[0] <= speed_range[1]:
        raise ValueError(f"Bad speed range {speed_range}.")

    rng = np.random.default_rng(seed)
    jitter = rng.uniform(-perturbation, perturbation, size=(rows * cols, 2))
    nodes = [
        Node(
            r * cols + c,
            Point(
                float(c * spacing + jitter[r * cols + c][0]),
                float(r * spacing + jitter[r * cols + c][1]),
            ),
        )
        for r in range(rows)
        for c in range(cols)
    ]
    pairs = [
        (r * cols + c, r * cols + c + 1)
        for r in range(rows)
        for c in range(cols - 1)
    ] + [
        (r * cols + c, (r + 1) * cols + c)
        for r in range(rows - 1)
        for c in range(cols)
    ]

    graph = nx.Graph(pairs)
    removal_draws = rng.random(len(pairs))
    for i in rng.permutation(len(pairs)):
        if removal_draws[i] >= removal_prob:
            continue
        u, v = pairs[i]
        graph.remove_edge(u, v)
        if not nx.has_path(graph, u, v):
            graph.add_edge(u, v)
    pairs = [pair for pair in pairs if graph.has_edge(*pair)]

    speeds = rng.uniform(speed_range[0], speed_range[1], size=len(pairs))
    edges = [
        Edge(
            i,
            u,
            v,
            Polyline([nodes[u].location, nodes[v].location]),
            float(speeds[i]),
        )
        for i, (u, v) in enumerate(pairs)
    ]
    return RoadNetwork(nodes, edges, **kwargs)
