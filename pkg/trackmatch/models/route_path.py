"""
RoadPoint- and RoutePath-data model definitions
"""

from dataclasses import dataclass, field

from dcm_common.models import DataModel


@dataclass
class RoadPoint(DataModel):
    """
    Position on the road network.

    Keyword arguments:
    edge_id -- identifier of the edge
    offset -- arc offset along the edge geometry in meters
    """

    edge_id: int
    offset: float

    @DataModel.serialization_handler("edge_id", "edgeId")
    @classmethod
    def edge_id_serialization_handler(cls, value):
        """Handles `edge_id`-serialization."""
        return value

    @DataModel.deserialization_handler("edge_id", "edgeId")
    @classmethod
    def edge_id_deserialization_handler(cls, value):
        """Handles `edge_id`-deserialization."""
        return value


@dataclass
class PathSegment(DataModel):
    """
    A traversed interval `[lo, hi]` of a single edge.

    Keyword arguments:
    edge_id -- identifier of the edge
    lo -- lower arc offset
    hi -- upper arc offset
    forward -- `True` if traversed from `lo` to `hi`, `False` if from
               `hi` to `lo`
               (default True)
    """

    edge_id: int
    lo: float
    hi: float
    forward: bool = True

    @DataModel.serialization_handler("edge_id", "edgeId")
    @classmethod
    def edge_id_serialization_handler(cls, value):
        """Handles `edge_id`-serialization."""
        return value

    @DataModel.deserialization_handler("edge_id", "edgeId")
    @classmethod
    def edge_id_deserialization_handler(cls, value):
        """Handles `edge_id`-deserialization."""
        return value

    @property
    def length(self) -> float:
        """Returns the length of the traversed interval."""
        return self.hi - self.lo

    @property
    def entry(self) -> float:
        """Returns the offset at which the segment is entered."""
        return self.lo if self.forward else self.hi

    @property
    def exit(self) -> float:
        """Returns the offset at which the segment is left."""
        return self.hi if self.forward else self.lo


@dataclass
class RoutePath(DataModel):
    """
    Connected path on the road network given as an ordered sequence of
    traversed edge intervals.

    A single-point path consists of exactly one zero-length segment.

    Keyword arguments:
    segments -- ordered list of traversed edge intervals
                (default [])
    total_length -- sum of all interval lengths in meters
                    (default 0.0)
    """

    segments: list[PathSegment] = field(default_factory=list)
    total_length: float = 0.0

    @DataModel.serialization_handler("total_length", "totalLength")
    @classmethod
    def total_length_serialization_handler(cls, value):
        """Handles `total_length`-serialization."""
        return value

    @DataModel.deserialization_handler("total_length", "totalLength")
    @classmethod
    def total_length_deserialization_handler(cls, value):
        """Handles `total_length`-deserialization."""
        return value

    @classmethod
    def from_segments(cls, segments: list[PathSegment]) -> "RoutePath":
        """
        Returns a `RoutePath` for `segments` with `total_length`
        computed from the segments.
        """
        return cls(
            segments=segments,
            total_length=sum(segment.length for segment in segments),
        )

    @property
    def is_point(self) -> bool:
        """Returns `True` if this path has zero length."""
        return self.total_length == 0

    @property
    def start(self) -> RoadPoint:
        """Returns the first position on this path."""
        first = self.segments[0]
        return RoadPoint(first.edge_id, first.entry)

    @property
    def end(self) -> RoadPoint:
        """Returns the last position on this path."""
        last = self.segments[-1]
        return RoadPoint(last.edge_id, last.exit)
