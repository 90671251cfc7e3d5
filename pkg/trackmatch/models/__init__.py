from .network_document import (
    CoordinateSystem,
    NetworkNode,
    NetworkEdge,
    NetworkDocument,
)
from .route_path import RoadPoint, PathSegment, RoutePath
from .track import Sample, Track
from .match_config import (
    OrderingMethod,
    MatchMethod,
    ScaleRule,
    DistanceMode,
    MatchConfig,
    BoostConfig,
)
from .match_result import MatchResult
from .ground_truth import (
    SamplingDistribution,
    SamplingConfig,
    TruePosition,
    GroundTruth,
)
from .sweep import AUTO_LAMBDA, SweepSpec, ResultRow


__all__ = [
    "CoordinateSystem",
    "NetworkNode",
    "NetworkEdge",
    "NetworkDocument",
    "RoadPoint",
    "PathSegment",
    "RoutePath",
    "Sample",
    "Track",
    "OrderingMethod",
    "MatchMethod",
    "ScaleRule",
    "DistanceMode",
    "MatchConfig",
    "BoostConfig",
    "MatchResult",
    "SamplingDistribution",
    "SamplingConfig",
    "TruePosition",
    "GroundTruth",
    "AUTO_LAMBDA",
    "SweepSpec",
    "ResultRow",
]
