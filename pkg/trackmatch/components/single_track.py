"""
This module defines the regularized single-track matcher: candidate
generation, dynamic programming over the layered candidate graph, the
noise-dependent choice of the regularization weight and the
cross-validation estimate of the noise level.
"""

from typing import Optional
from dataclasses import dataclass, replace
import math

import numpy as np
from dcm_common import Logger, LoggingContext as Context

from trackmatch.models import RoadPoint, RoutePath, Track, MatchConfig
from trackmatch.models import MatchResult
from .common import NoCandidatesError, InfeasibleMatchError, UnreachableError
from .geometry import Point, distance, build_index, nearest_on_polyline
from .road_network import (
    RoadNetwork,
    nearest_points_within,
    one_to_many_distances,
    shortest_route,
    path_polyline,
)


_TAG = "Single-Track Matcher"


@dataclass(frozen=True)
class Candidate:
    """
    Match candidate of a single sample.

    Keyword arguments:
    point -- position on the road network
    location -- planar location of `point`
    data_cost -- squared distance between sample and `location`
    """

    point: RoadPoint
    location: Point
    data_cost: float


def generate_candidates(
    net: RoadNetwork,
    sample: Point,
    cfg: MatchConfig,
    log: Optional[Logger] = None,
) -> list[Candidate]:
    """
    Returns the match candidates of `sample` ordered by data cost.

    For every edge within `cfg.radius` the candidates are the point
    closest to `sample` and `cfg.extra_candidates` points at the
    midpoints of equal subdivisions of the edge. Candidates closer than
    `cfg.deduplication_distance` to a cheaper candidate are dropped.
    The search radius doubles (at most `cfg.radius_growth_cap` times)
    while no edge is found.
    """
    radius = cfg.radius
    for growth in range(cfg.radius_growth_cap + 1):
        nearest = nearest_points_within(net, sample, radius)
        if nearest:
            break
        if growth < cfg.radius_growth_cap:
            radius *= 2
            if log is not None:
                log.log(
                    Context.WARNING,
                    body=(
                        f"No road within {radius / 2} m of sample "
                        + f"({sample.x}, {sample.y}); searching within "
                        + f"{radius} m."
                    ),
                )
    else:
        raise NoCandidatesError(
            f"No road within {radius} m of sample ({sample.x}, {sample.y})."
        )

    raw = []
    for edge_id, (offset, _) in sorted(nearest.items()):
        length = net.edge(edge_id).length
        n = cfg.extra_candidates
        for candidate_offset in [offset] + [
            (i + 0.5) * length / n for i in range(n)
        ]:
            point = net.road_point(edge_id, candidate_offset)
            location = net.location(point)
            raw.append(
                Candidate(point, location, distance(sample, location) ** 2)
            )
    raw.sort(key=lambda c: (c.data_cost, c.point.edge_id, c.point.offset))

    candidates: list[Candidate] = []
    for candidate in raw:
        if any(
            distance(candidate.location, kept.location)
            < cfg.deduplication_distance
            for kept in candidates
        ):
            continue
        candidates.append(candidate)
        if len(candidates) == cfg.max_candidates:
            break
    return candidates


def stitch_path(net: RoadNetwork, chosen: list[RoadPoint]) -> RoutePath:
    """
    Returns the concatenation of shortest routes between consecutive
    points of `chosen`.

    Raises `UnreachableError` if a pair is not connected.
    """
    if not chosen:
        raise ValueError("Cannot stitch an empty sequence of road points.")
    segments = []
    for a, b in zip(chosen, chosen[1:]):
        segments.extend(
            segment
            for segment in shortest_route(net, a, b).segments
            if segment.length > 0
        )
    if not segments:
        first = net.road_point(chosen[0].edge_id, chosen[0].offset)
        return shortest_route(net, first, first)
    return RoutePath.from_segments(segments)


def _transition_costs(
    net: RoadNetwork,
    sources: list[Candidate],
    targets: list[Candidate],
    cache: dict[int, dict[int, float]],
) -> np.ndarray:
    """Returns the matrix of driving distances (`inf` if unreachable)."""
    target_points = [target.point for target in targets]
    return np.array(
        [
            one_to_many_distances(net, source.point, target_points, cache)
            for source in sources
        ],
        dtype=float,
    ).reshape(len(sources), len(targets))


def match_track(
    net: RoadNetwork,
    track: Track,
    cfg: MatchConfig,
    log: Optional[Logger] = None,
) -> MatchResult:
    """
    Returns the chain of candidates minimizing the sum of squared
    sample-to-match distances plus `cfg.lambda_` times the sum of
    squared driving distances between consecutive matches.

    Ties are resolved in favor of lower-cost (earlier) candidates.
    Raises `NoCandidatesError` if a sample has no candidates and
    `InfeasibleMatchError` if no chain of reachable transitions exists.
    """
    track.validate()
    layers = [
        generate_candidates(net, Point(sample.x, sample.y), cfg, log)
        for sample in track.samples
    ]

    cache: dict[int, dict[int, float]] = {}
    cost = np.array([c.data_cost for c in layers[0]], dtype=float)
    back_pointers = []
    transitions = []
    for j in range(1, len(layers)):
        distances = _transition_costs(net, layers[j - 1], layers[j], cache)
        reachable = np.isfinite(distances)
        step = np.full(distances.shape, np.inf)
        step[reachable] = cfg.lambda_ * distances[reachable] ** 2
        total = cost[:, None] + step
        best = np.argmin(total, axis=0)
        cost = total[best, np.arange(len(layers[j]))] + np.array(
            [c.data_cost for c in layers[j]], dtype=float
        )
        if not np.isfinite(cost).any():
            raise InfeasibleMatchError(
                f"No candidate of sample {j} is reachable from any "
                + f"feasible candidate of sample {j - 1}."
            )
        back_pointers.append(best)
        transitions.append(distances)

    # backtrack
    index = int(np.argmin(cost))
    indices = [index]
    for best in reversed(back_pointers):
        index = int(best[index])
        indices.append(index)
    indices.reverse()

    chosen = [layers[j][i] for j, i in enumerate(indices)]
    data_cost = float(sum(c.data_cost for c in chosen))
    model_cost = float(
        sum(
            transitions[j][indices[j], indices[j + 1]] ** 2
            for j in range(len(transitions))
        )
    )
    return MatchResult(
        chosen=[c.point for c in chosen],
        path=stitch_path(net, [c.point for c in chosen]),
        total_cost=data_cost + cfg.lambda_ * model_cost,
        data_cost=data_cost,
        model_cost=model_cost,
        lambda_=cfg.lambda_,
    )


def optimal_lambda(
    n: int, sigma: float, length: float, calibration: float = 1.0
) -> float:
    """
    Returns the regularization weight `c * (n * sigma / L)^(4/3)` for
    `n` samples with noise level `sigma` on a route of length `L`.
    """
    if n < 2:
        raise ValueError(f"At least two samples required (got {n}).")
    if sigma < 0:
        raise ValueError(f"Noise level must be nonnegative (got {sigma}).")
    if length <= 0:
        raise ValueError(f"Route length must be positive (got {length}).")
    return calibration * (n * sigma / length) ** (4 / 3)


def cross_validation_folds(n: int) -> list[list[int]]:
    """
    Returns the `m = floor(sqrt(n))` folds `{i, i + m, i + 2m, ...}`
    (0-based) of `n` samples.
    """
    if n < 4:
        raise ValueError(
            f"Cross validation requires at least four samples (got {n})."
        )
    m = math.isqrt(n)
    return [list(range(i, n, m)) for i in range(m)]


def estimate_sigma(
    net: RoadNetwork,
    track: Track,
    cfg: MatchConfig,
    lambda_: float = 1.0,
    log: Optional[Logger] = None,
    normalization: float = 1.0,
) -> float:
    """
    Returns a cross-validation estimate of the noise level of `track`.

    For every fold, the remaining samples are matched with weight
    `lambda_` and the held-out samples are projected onto the matched
    path. Held-out samples before the first or after the last matched
    sample are not scored. The fold estimate is `sqrt(d / normalization)`
    with `d` the mean squared projection distance; the result is the
    mean over all folds. Folds that cannot be matched are skipped.

    The projection onto the path only retains the noise component
    across the road, so `d` estimates `sigma^2` (`normalization=1`).
    With `normalization=2`, `d` is treated as squared distance to the
    true location in the plane.
    """
    track.validate()
    if normalization <= 0:
        raise ValueError(
            f"Normalization must be positive (got {normalization})."
        )
    if log is None:
        log = Logger(default_origin=_TAG)
    cfg = replace(cfg, lambda_=lambda_)

    estimates = []
    for i, fold in enumerate(cross_validation_folds(len(track))):
        held_out = set(fold)
        complement = [
            j for j in range(len(track)) if j not in held_out
        ]
        scored = [j for j in fold if complement[0] < j < complement[-1]]
        if not scored:
            log.log(
                Context.WARNING,
                body=f"Skipping fold {i}: no held-out sample to score.",
            )
            continue
        try:
            result = match_track(
                net,
                Track([track.samples[j] for j in complement]),
                cfg,
                log,
            )
        except (
            NoCandidatesError,
            InfeasibleMatchError,
            UnreachableError,
        ) as exc_info:
            log.log(
                Context.WARNING,
                body=f"Skipping fold {i}: {exc_info}",
            )
            continue

        geometry = path_polyline(net, result.path)
        points = [
            Point(track.samples[j].x, track.samples[j].y) for j in scored
        ]
        if isinstance(geometry, Point):
            squared = [distance(p, geometry) ** 2 for p in points]
        else:
            index = build_index(geometry)
            squared = [
                nearest_on_polyline(p, geometry, index)[2] ** 2
                for p in points
            ]
        estimates.append(math.sqrt(float(np.mean(squared)) / normalization))

    if not estimates:
        raise InfeasibleMatchError(
            "Unable to estimate noise level: no fold could be matched."
        )
    sigma = float(np.mean(estimates))
    log.log(Context.INFO, body=f"Estimated noise level {sigma:.3f} m.")
    return sigma


def auto_lambda(
    net: RoadNetwork,
    track: Track,
    cfg: MatchConfig,
    calibration: float = 1.0,
    sigma_lambda: float = 1.0,
    log: Optional[Logger] = None,
) -> tuple[float, float]:
    """
    Returns a tuple of estimated noise level and regularization weight
    for `track`. The route length is taken from a match with weight
    `sigma_lambda`.
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    sigma = estimate_sigma(net, track, cfg, sigma_lambda, log)
    length = match_track(
        net, track, replace(cfg, lambda_=sigma_lambda), log
    ).path.total_length
    if length <= 0:
        lambda_ = 0.0
    else:
        lambda_ = optimal_lambda(len(track), sigma, length, calibration)
    log.log(
        Context.INFO,
        body=f"Selected regularization weight {lambda_:.6g}.",
    )
    return sigma, lambda_
