"""
This module defines the generator of synthetic ground-truth routes and
noisy, sparsely sampled tracks.
"""

from typing import Optional
import math

import numpy as np
from dcm_common import Logger, LoggingContext as Context

from trackmatch.models import (
    PathSegment,
    RoutePath,
    Sample,
    Track,
    SamplingConfig,
    SamplingDistribution,
    TruePosition,
    GroundTruth,
)
from .common import SimulationError, UnreachableError
from .road_network import RoadNetwork
from .multi_track import TrackSet, Ordering


_TAG = "Simulation"


def substream(base_seed: int, *cell: int) -> np.random.Generator:
    """
    Returns the generator for the cell with (nonnegative) integer
    coordinates `cell`, derived from `base_seed`.
    """
    return np.random.default_rng(np.random.SeedSequence([base_seed, *cell]))


def generate_route(
    net: RoadNetwork,
    rng: np.random.Generator,
    min_length: float,
    max_length: float,
    max_attempts: int = 10000,
) -> RoutePath:
    """
    Returns the shortest path between two random nodes with a length in
    `[min_length, max_length]` (rejection sampling).

    Raises `SimulationError` after `max_attempts` rejections.
    """
    if min_length > max_length:
        raise ValueError(
            f"Bad route-length bounds [{min_length}, {max_length}]."
        )
    node_count = len(net.nodes)
    for _ in range(max_attempts):
        u, v = (int(i) for i in rng.integers(node_count, size=2))
        if u == v:
            continue
        try:
            length, nodes = net.node_distance(u, v)
        except UnreachableError:
            continue
        if not min_length <= length <= max_length:
            continue
        segments = []
        for a, b in zip(nodes, nodes[1:]):
            edge_id, forward = net.connecting_edge(a, b)
            segments.append(
                PathSegment(edge_id, 0.0, net.edge(edge_id).length, forward)
            )
        return RoutePath.from_segments(segments)
    raise SimulationError(
        f"No route with length in [{min_length}, {max_length}] found after "
        + f"{max_attempts} attempts."
    )


def generate_timestamps(
    duration: float,
    cfg: SamplingConfig,
    rng: Optional[np.random.Generator] = None,
) -> list[float]:
    """
    Returns sampling times in `(0, duration]`: multiples of `cfg.tau`
    (uniform) or cumulative sums of exponential inter-arrival times
    with mean `cfg.tau`. Without `rng`, a generator seeded with
    `cfg.seed` is used.

    Raises `SimulationError` if no timestamp fits.
    """
    if duration <= 0:
        raise ValueError(f"Duration must be positive (got {duration}).")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    match cfg.distribution:
        case SamplingDistribution.UNIFORM:
            count = math.floor(duration / cfg.tau + 1e-9)
            timestamps = [k * cfg.tau for k in range(1, count + 1)]
        case SamplingDistribution.EXPONENTIAL:
            timestamps = []
            t = rng.exponential(cfg.tau)
            while t <= duration:
                timestamps.append(float(t))
                t += rng.exponential(cfg.tau)
        case _:
            raise ValueError(
                f"Unknown sampling distribution '{cfg.distribution}'."
            )
    if not timestamps:
        raise SimulationError(
            f"No sampling time fits into a duration of {duration} s "
            + f"(tau={cfg.tau} s)."
        )
    return timestamps


def generate_track(
    net: RoadNetwork,
    route: RoutePath,
    cfg: SamplingConfig,
    rng: Optional[np.random.Generator] = None,
) -> tuple[Track, GroundTruth]:
    """
    Returns a noisy track sampled while driving along `route` and its
    ground truth.

    Every route segment is driven at a speed drawn uniformly from
    `[0.8, 1.2]` times its speed limit. Samples are the true positions
    plus independent normal noise with standard deviation `cfg.sigma`
    per axis. Without `rng`, a generator seeded with `cfg.seed` is
    used.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    segments = [segment for segment in route.segments if segment.length > 0]
    if not segments:
        raise SimulationError("Cannot sample a route of zero length.")
    limits = np.array([net.edge(s.edge_id).speed_limit for s in segments])
    speeds = rng.uniform(0.8 * limits, 1.2 * limits)
    lengths = np.array([segment.length for segment in segments])
    start_times = np.concatenate(([0.0], np.cumsum(lengths / speeds)))
    start_arcs = np.concatenate(([0.0], np.cumsum(lengths)))

    timestamps = generate_timestamps(float(start_times[-1]), cfg, rng)
    noise = cfg.sigma * rng.standard_normal((len(timestamps), 2))

    samples, positions = [], []
    for t, (gx, gy) in zip(timestamps, noise):
        i = int(np.searchsorted(start_times, t, side="right")) - 1
        i = min(max(i, 0), len(segments) - 1)
        traveled = min(
            lengths[i], speeds[i] * (t - start_times[i])
        )
        segment = segments[i]
        offset = (
            segment.lo + traveled if segment.forward else segment.hi - traveled
        )
        location = net.edge(segment.edge_id).geometry.point_at(
            min(max(offset, segment.lo), segment.hi)
        )
        positions.append(
            TruePosition(
                t, location.x, location.y, float(start_arcs[i] + traveled)
            )
        )
        samples.append(
            Sample(t, location.x + float(gx), location.y + float(gy))
        )

    return Track(samples), GroundTruth(
        route=RoutePath.from_segments(segments),
        speeds=[float(v) for v in speeds],
        positions=positions,
    )


def generate_trackset(
    net: RoadNetwork,
    route: RoutePath,
    s: int,
    cfg: SamplingConfig,
    rng: Optional[np.random.Generator] = None,
    max_attempts: int = 100,
    log: Optional[Logger] = None,
) -> tuple[TrackSet, list[GroundTruth]]:
    """
    Returns up to `s` independently generated tracks over `route` and
    their ground truths.

    A track without any sample is redrawn (speeds and sampling times)
    and dropped after `max_attempts` attempts. Raises `SimulationError`
    if fewer than `min(s, 2)` tracks remain.

    Keyword arguments:
    net -- road network
    route -- route driven by all tracks
    s -- number of tracks
    cfg -- sampling configuration
    rng -- generator
           (default None; seeded with `cfg.seed`)
    max_attempts -- attempts per track
                    (default 100)
    log -- logger for dropped tracks
           (default None)
    """
    if s < 1:
        raise ValueError(f"Number of tracks must be positive (got {s}).")
    if max_attempts < 1:
        raise ValueError(
            f"Number of attempts must be positive (got {max_attempts})."
        )
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if log is None:
        log = Logger(default_origin=_TAG)
    tracks, truths = [], []
    for k in range(s):
        for _ in range(max_attempts):
            try:
                track, truth = generate_track(net, route, cfg, rng)
            except SimulationError as exc_info:
                error = exc_info
                continue
            tracks.append(track)
            truths.append(truth)
            break
        else:
            log.log(
                Context.WARNING,
                body=(
                    f"Dropping track {k} after {max_attempts} attempts: "
                    + f"{error}"
                ),
            )
    if len(tracks) < min(s, 2):
        raise SimulationError(
            f"Only {len(tracks)} of {s} track(s) contain samples "
            + f"(tau={cfg.tau} s, route length {route.total_length} m)."
        )
    return TrackSet(tracks), truths


def true_order(truths: list[GroundTruth]) -> Ordering:
    """
    Returns the global order of the pooled samples of the tracks with
    ground truths `truths` by their true arc position along the route.
    """
    arcs = [
        position.arc for truth in truths for position in truth.positions
    ]
    return sorted(range(len(arcs)), key=lambda i: (arcs[i], i))
