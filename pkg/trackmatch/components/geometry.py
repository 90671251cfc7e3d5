"""
This module defines planar geometry primitives, point-to-polyline
projection and the `QuadTree` segment index used by all other
components. All coordinates are planar meters.
"""

from typing import Optional, Hashable, Iterable, Sequence
from dataclasses import dataclass
from heapq import heappush, heappop
from itertools import count
import math

import numpy as np


EARTH_RADIUS = 6_371_008.8


@dataclass(frozen=True)
class Point:
    """Planar point (`x` east, `y` north; meters)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Non-finite coordinates ({self.x}, {self.y}).")

    def __iter__(self):
        yield self.x
        yield self.y


def distance(p: Point, q: Point) -> float:
    """Returns the Euclidean distance between `p` and `q`."""
    return math.hypot(p.x - q.x, p.y - q.y)


def project_to_segment(
    p: Point, a: Point, b: Point
) -> tuple[Point, float, float]:
    """
    Returns a tuple of the point on segment `ab` that is closest to `p`,
    its offset from `a` along `ab`, and its distance to `p`.

    A degenerate segment (`a == b`) is treated as the point `a`.
    """
    dx, dy = b.x - a.x, b.y - a.y
    length_squared = dx * dx + dy * dy
    if length_squared == 0:
        return a, 0.0, distance(p, a)
    u = ((p.x - a.x) * dx + (p.y - a.y) * dy) / length_squared
    u = min(1.0, max(0.0, u))
    if u == 0.0:
        foot = a
    elif u == 1.0:
        foot = b
    else:
        foot = Point(a.x + u * dx, a.y + u * dy)
    return foot, u * math.sqrt(length_squared), distance(p, foot)


def equirectangular(
    lonlat: Sequence[tuple[float, float]],
    origin: Optional[tuple[float, float]] = None,
) -> list[Point]:
    """
    Converts `(longitude, latitude)`-pairs (degrees) into planar points
    by an equirectangular projection about `origin` (default: centroid
    of `lonlat`).
    """
    if not lonlat:
        return []
    coordinates = np.asarray(lonlat, dtype=float)
    if origin is None:
        origin = tuple(coordinates.mean(axis=0))
    lon0, lat0 = np.radians(origin)
    lon, lat = np.radians(coordinates).T
    x = EARTH_RADIUS * (lon - lon0) * math.cos(lat0)
    y = EARTH_RADIUS * (lat - lat0)
    return [Point(float(xi), float(yi)) for xi, yi in zip(x, y)]


class Polyline:
    """
    Arc-length parameterized polygonal line.

    Keyword arguments:
    vertices -- sequence of at least two vertices (`Point`s or
                `(x, y)`-pairs) spanning a positive total length
    """

    def __init__(self, vertices: Iterable[Point | Sequence[float]]) -> None:
        self._xy = np.array(
            [(v.x, v.y) if isinstance(v, Point) else v for v in vertices],
            dtype=float,
        )
        if self._xy.ndim != 2 or len(self._xy) < 2:
            raise ValueError("Polyline requires at least two vertices.")
        if not np.isfinite(self._xy).all():
            raise ValueError("Polyline contains non-finite coordinates.")
        self._xy.setflags(write=False)
        segment_lengths = np.hypot(*np.diff(self._xy, axis=0).T)
        self._cum_length = np.concatenate(([0.0], np.cumsum(segment_lengths)))
        self._cum_length.setflags(write=False)
        if self._cum_length[-1] <= 0:
            raise ValueError("Polyline has zero length.")

    @property
    def xy(self) -> np.ndarray:
        """Returns the (read-only) `(k, 2)`-array of vertices."""
        return self._xy

    @property
    def vertices(self) -> list[Point]:
        """Returns the vertices as `Point`s."""
        return [Point(float(x), float(y)) for x, y in self._xy]

    @property
    def cum_length(self) -> np.ndarray:
        """Returns the cumulative arc length at every vertex."""
        return self._cum_length

    @property
    def length(self) -> float:
        """Returns the total length."""
        return float(self._cum_length[-1])

    @property
    def segment_count(self) -> int:
        """Returns the number of segments."""
        return len(self._xy) - 1

    def segment(self, i: int) -> tuple[Point, Point]:
        """Returns the endpoints of segment `i`."""
        return (
            Point(float(self._xy[i][0]), float(self._xy[i][1])),
            Point(float(self._xy[i + 1][0]), float(self._xy[i + 1][1])),
        )

    def _check_offset(self, offset: float) -> float:
        tolerance = 1e-9 * max(1.0, self.length)
        if not -tolerance <= offset <= self.length + tolerance:
            raise ValueError(
                f"Offset {offset} outside of polyline [0, {self.length}]."
            )
        return min(self.length, max(0.0, offset))

    def point_at(self, offset: float) -> Point:
        """Returns the point at arc `offset`."""
        offset = self._check_offset(offset)
        i = int(np.searchsorted(self._cum_length, offset, side="right")) - 1
        i = min(max(i, 0), self.segment_count - 1)
        segment_length = self._cum_length[i + 1] - self._cum_length[i]
        if segment_length == 0:
            x, y = self._xy[i]
        else:
            u = (offset - self._cum_length[i]) / segment_length
            x, y = self._xy[i] + u * (self._xy[i + 1] - self._xy[i])
        return Point(float(x), float(y))

    def substring(
        self, lo: float, hi: float, forward: bool = True
    ) -> np.ndarray:
        """
        Returns the vertices of the part between arc offsets `lo` and
        `hi` as `(k, 2)`-array (reversed if not `forward`). For
        `lo == hi` both returned vertices coincide.
        """
        lo, hi = self._check_offset(lo), self._check_offset(hi)
        if lo > hi:
            raise ValueError(f"Bad interval [{lo}, {hi}].")
        start, end = self.point_at(lo), self.point_at(hi)
        inner = self._xy[(self._cum_length > lo) & (self._cum_length < hi)]
        vertices = np.vstack(([tuple(start)], inner, [tuple(end)]))
        return vertices if forward else vertices[::-1]


def arc_length_between(pl: Polyline, s: float, t: float) -> float:
    """Returns the distance between arc offsets `s` and `t` along `pl`."""
    return abs(pl._check_offset(t) - pl._check_offset(s))


@dataclass(frozen=True)
class IndexedSegment:
    """
    Segment stored in a `QuadTree`.

    Keyword arguments:
    a -- first endpoint
    b -- second endpoint
    owner -- identifier of the owning object (e.g. `(edge_id, i)`)
    seq -- insertion sequence number (tie-breaker for queries)
    """

    a: Point
    b: Point
    owner: Hashable
    seq: int

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        """Returns the bounding box `(xmin, ymin, xmax, ymax)`."""
        return (
            min(self.a.x, self.b.x),
            min(self.a.y, self.b.y),
            max(self.a.x, self.b.x),
            max(self.a.y, self.b.y),
        )


@dataclass(frozen=True)
class SegmentHit:
    """Result of a segment query."""

    segment: IndexedSegment
    foot: Point
    offset: float
    dist: float


class QuadTree:
    """
    Region quad-tree over line segments.

    Segments are stored in the smallest node whose box contains their
    bounding box. Nodes split when exceeding `capacity` unless
    `max_depth` is reached. The tree is filled once via `from_segments`
    and read-only afterwards.

    Keyword arguments:
    bbox -- node box `(xmin, ymin, xmax, ymax)`
    capacity -- node capacity before splitting
                (default 16)
    max_depth -- maximum depth
                 (default 20)
    """

    def __init__(
        self,
        bbox: tuple[float, float, float, float],
        capacity: int = 16,
        max_depth: int = 20,
        _depth: int = 0,
    ) -> None:
        self.bbox = bbox
        self.capacity = capacity
        self.max_depth = max_depth
        self._depth = _depth
        self._items: list[IndexedSegment] = []
        self._children: Optional[list["QuadTree"]] = None
        self._size = 0

    @classmethod
    def from_segments(
        cls,
        segments: Iterable[tuple[Point, Point, Hashable]],
        capacity: int = 16,
        max_depth: int = 20,
    ) -> "QuadTree":
        """
        Returns a `QuadTree` indexing all `(a, b, owner)`-segments.
        Sequence numbers follow the iteration order.
        """
        items = [
            IndexedSegment(a, b, owner, seq)
            for seq, (a, b, owner) in enumerate(segments)
        ]
        if items:
            boxes = np.array([item.bbox for item in items])
            xmin, ymin = boxes[:, 0].min(), boxes[:, 1].min()
            xmax, ymax = boxes[:, 2].max(), boxes[:, 3].max()
        else:
            xmin = ymin = xmax = ymax = 0.0
        # square root box with a small margin
        half = max(xmax - xmin, ymax - ymin, 1.0) / 2 * 1.001
        cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
        tree = cls(
            (
                float(cx - half),
                float(cy - half),
                float(cx + half),
                float(cy + half),
            ),
            capacity,
            max_depth,
        )
        for item in items:
            tree._insert(item)
        return tree

    def __len__(self) -> int:
        return self._size

    def _contains(self, bbox: tuple[float, float, float, float]) -> bool:
        return (
            self.bbox[0] <= bbox[0]
            and self.bbox[1] <= bbox[1]
            and bbox[2] <= self.bbox[2]
            and bbox[3] <= self.bbox[3]
        )

    def _split(self) -> None:
        xmin, ymin, xmax, ymax = self.bbox
        cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
        self._children = [
            QuadTree(box, self.capacity, self.max_depth, self._depth + 1)
            for box in (
                (xmin, ymin, cx, cy),
                (cx, ymin, xmax, cy),
                (xmin, cy, cx, ymax),
                (cx, cy, xmax, ymax),
            )
        ]
        items, self._items = self._items, []
        for item in items:
            self._place(item)

    def _place(self, item: IndexedSegment) -> None:
        if self._children is not None:
            for child in self._children:
                if child._contains(item.bbox):
                    child._insert(item)
                    return
        self._items.append(item)

    def _insert(self, item: IndexedSegment) -> None:
        self._size += 1
        if (
            self._children is None
            and len(self._items) >= self.capacity
            and self._depth < self.max_depth
        ):
            self._split()
        self._place(item)

    def items(self) -> list[IndexedSegment]:
        """Returns all indexed segments in insertion order."""
        result = list(self._items)
        for child in self._children or []:
            result.extend(child.items())
        return sorted(result, key=lambda item: item.seq)

    def _box_distance(self, p: Point) -> float:
        xmin, ymin, xmax, ymax = self.bbox
        dx = max(xmin - p.x, 0.0, p.x - xmax)
        dy = max(ymin - p.y, 0.0, p.y - ymax)
        return math.hypot(dx, dy)

    def nearest(self, p: Point) -> Optional[SegmentHit]:
        """
        Returns the indexed segment closest to `p` (ties resolved by
        sequence number) or `None` if the tree is empty.
        """
        # best-first search; nodes before items at equal distance
        counter = count()
        heap = [(self._box_distance(p), 0, next(counter), self)]
        while heap:
            _, kind, _, obj = heappop(heap)
            if kind == 1:
                return obj
            for item in obj._items:
                foot, offset, dist = project_to_segment(p, item.a, item.b)
                heappush(
                    heap,
                    (dist, 1, item.seq, SegmentHit(item, foot, offset, dist)),
                )
            for child in obj._children or []:
                if child._size:
                    heappush(
                        heap,
                        (child._box_distance(p), 0, next(counter), child),
                    )
        return None

    def within(self, p: Point, r: float) -> list[SegmentHit]:
        """
        Returns all indexed segments that come within distance `r` of
        `p`, ordered by sequence number.
        """
        hits = []
        stack = [self]
        while stack:
            node = stack.pop()
            if not node._size or node._box_distance(p) > r:
                continue
            for item in node._items:
                foot, offset, dist = project_to_segment(p, item.a, item.b)
                if dist <= r:
                    hits.append(SegmentHit(item, foot, offset, dist))
            stack.extend(node._children or [])
        return sorted(hits, key=lambda hit: hit.segment.seq)


def build_index(
    pl: Polyline, capacity: int = 16, max_depth: int = 20
) -> QuadTree:
    """Returns a `QuadTree` over the segments of `pl` (owner: index)."""
    return QuadTree.from_segments(
        (
            (*pl.segment(i), i)
            for i in range(pl.segment_count)
        ),
        capacity,
        max_depth,
    )


def nearest_on_polyline(
    p: Point, pl: Polyline, idx: QuadTree
) -> tuple[Point, float, float]:
    """
    Returns a tuple of the point on `pl` closest to `p`, its arc offset
    and its distance to `p`. `idx` has to index the segments of `pl`
    (see `build_index`).
    """
    hit = idx.nearest(p)
    if hit is None:
        raise ValueError("Cannot project onto an empty polyline.")
    i = hit.segment.owner
    arc_offset = min(pl.length, float(pl.cum_length[i]) + hit.offset)
    return hit.foot, arc_offset, hit.dist
