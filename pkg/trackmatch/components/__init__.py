from .common import (
    UnreachableError,
    NoCandidatesError,
    InfeasibleMatchError,
    ConvergenceError,
    SimulationError,
)
from .geometry import Point, Polyline, QuadTree
from .road_network import RoadNetwork, generate_grid_network
from .single_track import match_track, estimate_sigma, auto_lambda
from .multi_track import TrackSet, OrderingOptions, match_multi
from .simulation import substream, generate_route, generate_trackset
from .evaluation import similarity, run_sweep, emit_results, read_results

__all__ = [
    "UnreachableError",
    "NoCandidatesError",
    "InfeasibleMatchError",
    "ConvergenceError",
    "SimulationError",
    "Point",
    "Polyline",
    "QuadTree",
    "RoadNetwork",
    "generate_grid_network",
    "match_track",
    "estimate_sigma",
    "auto_lambda",
    "TrackSet",
    "OrderingOptions",
    "match_multi",
    "substream",
    "generate_route",
    "generate_trackset",
    "similarity",
    "run_sweep",
    "emit_results",
    "read_results",
]
