"""
Network-document data-model definition
"""

from typing import Optional
from dataclasses import dataclass, field
from enum import Enum

from dcm_common.models import DataModel


class CoordinateSystem(Enum):
    """Coordinate reference of a network document."""

    PLANAR = "planar"
    WGS84 = "wgs84"


@dataclass
class NetworkNode(DataModel):
    """
    Data model for a road-network node.

    Keyword arguments:
    id_ -- node identifier
    x -- planar east-coordinate in meters (longitude for wgs84)
    y -- planar north-coordinate in meters (latitude for wgs84)
    """

    id_: int
    x: float
    y: float

    @DataModel.serialization_handler("id_", "id")
    @classmethod
    def id__serialization_handler(cls, value):
        """Handles `id_`-serialization."""
        return value

    @DataModel.deserialization_handler("id_", "id")
    @classmethod
    def id__deserialization_handler(cls, value):
        """Handles `id_`-deserialization."""
        return value


@dataclass
class NetworkEdge(DataModel):
    """
    Data model for a road-network edge.

    Keyword arguments:
    id_ -- edge identifier
    from_ -- identifier of the start node
    to -- identifier of the end node
    speed_limit -- speed limit in meters per second
    oneway -- whether the edge may only be traversed from `from_` to `to`
              (default False)
    geometry -- list of intermediate-inclusive vertices as `[x, y]`-pairs;
                `None` indicates a straight segment between the nodes
                (default None)
    """

    id_: int
    from_: int
    to: int
    speed_limit: float
    oneway: bool = False
    geometry: Optional[list[list[float]]] = None

    @DataModel.serialization_handler("id_", "id")
    @classmethod
    def id__serialization_handler(cls, value):
        """Handles `id_`-serialization."""
        return value

    @DataModel.deserialization_handler("id_", "id")
    @classmethod
    def id__deserialization_handler(cls, value):
        """Handles `id_`-deserialization."""
        return value

    @DataModel.serialization_handler("from_", "from")
    @classmethod
    def from__serialization_handler(cls, value):
        """Handles `from_`-serialization."""
        return value

    @DataModel.deserialization_handler("from_", "from")
    @classmethod
    def from__deserialization_handler(cls, value):
        """Handles `from_`-deserialization."""
        return value

    @DataModel.serialization_handler("geometry")
    @classmethod
    def geometry_serialization_handler(cls, value):
        """Handles `geometry`-serialization."""
        if value is None:
            DataModel.skip()
        return [[float(x), float(y)] for x, y in value]

    @DataModel.deserialization_handler("geometry")
    @classmethod
    def geometry_deserialization_handler(cls, value):
        """Handles `geometry`-deserialization."""
        if value is None:
            DataModel.skip()
        return [[float(x), float(y)] for x, y in value]


@dataclass
class NetworkDocument(DataModel):
    """
    Data model for a (serialized) road network.

    Keyword arguments:
    nodes -- list of nodes
             (default [])
    edges -- list of edges
             (default [])
    crs -- coordinate reference of node/edge coordinates
           (default CoordinateSystem.PLANAR)
    """

    nodes: list[NetworkNode] = field(default_factory=list)
    edges: list[NetworkEdge] = field(default_factory=list)
    crs: CoordinateSystem = CoordinateSystem.PLANAR

    @DataModel.serialization_handler("crs")
    @classmethod
    def crs_serialization_handler(cls, value):
        """Handles `crs`-serialization."""
        return value.value

    @DataModel.deserialization_handler("crs")
    @classmethod
    def crs_deserialization_handler(cls, value):
        """Handles `crs`-deserialization."""
        if value is None:
            DataModel.skip()
        return CoordinateSystem(value)
