"""
This module defines the multi-track matcher: pooled samples of several
tracks over the same route are brought into a global order (iterative
projection or Laplacian seriation, optionally boosted by subsampling
and order aggregation) and the resulting merged track is matched with
the single-track matcher.
"""

from typing import Optional, Callable
from dataclasses import dataclass
import math

import numpy as np
import networkx as nx
from scipy import linalg
from scipy.spatial.distance import pdist, squareform
from dcm_common import Logger, LoggingContext as Context

from trackmatch.models import (
    Sample,
    Track,
    MatchConfig,
    BoostConfig,
    MatchResult,
    OrderingMethod,
    MatchMethod,
    ScaleRule,
    DistanceMode,
)
from .common import (
    NoCandidatesError,
    InfeasibleMatchError,
    UnreachableError,
    ConvergenceError,
)
from .geometry import (
    Point,
    Polyline,
    distance,
    build_index,
    nearest_on_polyline,
)
from .road_network import RoadNetwork, path_polyline
from .single_track import match_track


_TAG = "Multi-Track Matcher"
MATCH_ERRORS = (
    NoCandidatesError,
    InfeasibleMatchError,
    UnreachableError,
    ConvergenceError,
)

Ordering = list[int]
DistanceMatrix = np.ndarray


@dataclass(frozen=True)
class PooledSample:
    """
    Sample of a `TrackSet`.

    Keyword arguments:
    index -- global index within the track set
    track -- index of the owning track
    rank -- index within the owning track
    t -- timestamp
    location -- planar location
    """

    index: int
    track: int
    rank: int
    t: float
    location: Point


class TrackSet:
    """
    Bundle of tracks over the same route. Samples are pooled with
    global indices in the order (track, rank).

    Keyword arguments:
    tracks -- nonempty list of valid tracks
    """

    def __init__(self, tracks: list[Track]) -> None:
        if not tracks:
            raise ValueError("Track set contains no tracks.")
        for track in tracks:
            track.validate()
        self.tracks = list(tracks)
        self.pooled = [
            PooledSample(
                index, track_id, rank, sample.t, Point(sample.x, sample.y)
            )
            for index, (track_id, rank, sample) in enumerate(
                (track_id, rank, sample)
                for track_id, track in enumerate(self.tracks)
                for rank, sample in enumerate(track.samples)
            )
        ]
        self.xy = np.array(
            [(p.location.x, p.location.y) for p in self.pooled], dtype=float
        )
        self.track_of = np.array([p.track for p in self.pooled], dtype=int)

    def __len__(self) -> int:
        return len(self.pooled)

    def time_order(self) -> Ordering:
        """Returns the global indices of a single-track set in time order."""
        return list(range(len(self.pooled)))

    def subset(self, indices: list[int]) -> tuple["TrackSet", list[int]]:
        """
        Returns a tuple of the `TrackSet` restricted to the global
        `indices` (tracks without samples are dropped) and the mapping
        of its global indices to those of this set.
        """
        mapping = sorted(set(indices))
        by_track: dict[int, list[Sample]] = {}
        for index in mapping:
            sample = self.pooled[index]
            by_track.setdefault(sample.track, []).append(
                self.tracks[sample.track].samples[sample.rank]
            )
        return (
            TrackSet([Track(samples) for _, samples in sorted(by_track.items())]),
            mapping,
        )

    def ordered_track(self, order: Ordering) -> Track:
        """
        Returns the merged track of the samples in `order` with
        timestamps replaced by ordinal ranks.
        """
        return Track(
            [
                Sample(
                    float(rank),
                    self.pooled[index].location.x,
                    self.pooled[index].location.y,
                )
                for rank, index in enumerate(order)
            ]
        )


@dataclass(frozen=True)
class OrderingOptions:
    """
    Options of the multi-track ordering methods.

    Keyword arguments:
    max_rounds -- maximum number of iterative-projection rounds
                  (default 20)
    scale_rule -- weighting rule of the Laplacian
                  (default ScaleRule.MEDIAN)
    scale -- exponential-weight constant for `ScaleRule.FIXED`
             (default None)
    distance_mode -- distances used by Laplacian ordering
                     (default DistanceMode.PATH)
    """

    max_rounds: int = 20
    scale_rule: ScaleRule = ScaleRule.MEDIAN
    scale: Optional[float] = None
    distance_mode: DistanceMode = DistanceMode.PATH

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError(
                f"Maximum number of rounds must be positive (got {self.max_rounds})."
            )
        if self.scale_rule is ScaleRule.FIXED and (
            self.scale is None or self.scale <= 0
        ):
            raise ValueError(
                "Scale rule 'fixed' requires a positive scale (got "
                + f"{self.scale})."
            )


def _projector(
    geometry: Polyline | Point,
) -> Callable[[Point], tuple[float, float]]:
    """
    Returns a function mapping a point to `(arc offset, distance)` of
    its projection onto `geometry`.
    """
    if isinstance(geometry, Point):
        return lambda p: (0.0, distance(p, geometry))
    index = build_index(geometry)

    def project(p: Point) -> tuple[float, float]:
        _, arc, dist = nearest_on_polyline(p, geometry, index)
        return arc, dist

    return project


def _track_geometry(track: Track) -> Polyline | Point:
    """Returns the samples of `track` joined in time order."""
    try:
        return Polyline(track.xy)
    except ValueError:
        return Point(track.samples[0].x, track.samples[0].y)


def select_initial_track(tracks: list[Track]) -> int:
    """
    Returns the index of the track minimizing the sum of distances from
    the samples of all other tracks to its polyline (ties: lower index).
    """
    if not tracks:
        raise ValueError("No tracks to select from.")
    best, best_index = math.inf, 0
    for k, track in enumerate(tracks):
        project = _projector(_track_geometry(track))
        total = sum(
            project(Point(sample.x, sample.y))[1]
            for other, other_track in enumerate(tracks)
            if other != k
            for sample in other_track.samples
        )
        if total < best:
            best, best_index = total, k
    return best_index


def iterative_projection_order(
    net: RoadNetwork,
    trackset: TrackSet,
    match_cfg: MatchConfig,
    max_rounds: int = 20,
    log: Optional[Logger] = None,
) -> Ordering:
    """
    Returns a global order of all pooled samples by iterative
    projection: starting from the match of the initial track, all
    samples are sorted by the arc offset of their projection onto the
    current path, the merged track is matched again and the procedure
    repeats until the order stops changing or `max_rounds` is reached.
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    if len(trackset.tracks) == 1:
        return trackset.time_order()

    initial = select_initial_track(trackset.tracks)
    result = match_track(net, trackset.tracks[initial], match_cfg, log)
    order: Optional[Ordering] = None
    for round_ in range(1, max_rounds + 1):
        project = _projector(path_polyline(net, result.path))
        arcs = [project(p.location)[0] for p in trackset.pooled]
        new_order = sorted(range(len(trackset)), key=lambda i: (arcs[i], i))
        if new_order == order:
            log.log(
                Context.INFO,
                body=f"Iterative projection converged after {round_} rounds.",
            )
            return order
        order = new_order
        if round_ < max_rounds:
            result = match_track(
                net, trackset.ordered_track(order), match_cfg, log
            )
    log.log(
        Context.INFO,
        body=f"Iterative projection stopped after {max_rounds} rounds.",
    )
    return order


def build_distance_matrix(
    net: RoadNetwork,
    trackset: TrackSet,
    match_cfg: MatchConfig,
    log: Optional[Logger] = None,
) -> DistanceMatrix:
    """
    Returns the path-aware distance matrix of the pooled samples.

    Every track is matched individually. For samples `i` (track `k`)
    and `j` (track `l`), `d_k(i, j)` is the sum of both projection
    distances onto the path of `k` and the distance of the projections
    along that path; `D[i, j]` is the mean of `d_k(i, j)` and
    `d_l(i, j)`.
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    arcs = np.zeros((len(trackset), len(trackset.tracks)))
    residuals = np.zeros_like(arcs)
    for k, track in enumerate(trackset.tracks):
        try:
            result = match_track(net, track, match_cfg, log)
        except MATCH_ERRORS as exc_info:
            raise type(exc_info)(
                f"Unable to match track {k}: {exc_info}"
            ) from exc_info
        project = _projector(path_polyline(net, result.path))
        for i, sample in enumerate(trackset.pooled):
            arcs[i, k], residuals[i, k] = project(sample.location)

    own = trackset.track_of
    rows = np.arange(len(trackset))
    # by_own[i, j] = d_{k(i)}(i, j)
    by_own = (
        residuals[rows, own][:, None]
        + residuals[:, own].T
        + np.abs(arcs[rows, own][:, None] - arcs[:, own].T)
    )
    matrix = (by_own + by_own.T) / 2
    np.fill_diagonal(matrix, 0.0)
    return matrix


def euclidean_distance_matrix(trackset: TrackSet) -> DistanceMatrix:
    """Returns the matrix of Euclidean distances of the pooled samples."""
    if len(trackset) < 2:
        return np.zeros((len(trackset), len(trackset)))
    return squareform(pdist(trackset.xy))


def _validate_distance_matrix(matrix: DistanceMatrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Distance matrix is not square ({matrix.shape}).")
    if not np.isfinite(matrix).all() or (matrix < 0).any():
        raise ValueError("Distance matrix has negative or non-finite entries.")
    if not np.allclose(matrix, matrix.T):
        raise ValueError("Distance matrix is not symmetric.")
    return matrix


def laplacian_matrix(
    matrix: DistanceMatrix,
    scale_rule: ScaleRule = ScaleRule.MEDIAN,
    scale: Optional[float] = None,
) -> np.ndarray:
    """
    Returns the weighted graph Laplacian for the distance `matrix`.

    Weights are `exp(-c * D[i, j])` with `c = ln(2) / median` of the
    positive distances (`ScaleRule.MEDIAN`) or the given `scale`
    (`ScaleRule.FIXED`), or `1 / D[i, j]` (`ScaleRule.INVERSE`; zero
    distances are replaced by the smallest positive one).
    """
    matrix = _validate_distance_matrix(matrix)
    off_diagonal = ~np.eye(len(matrix), dtype=bool)
    positive = matrix[off_diagonal & (matrix > 0)]
    match scale_rule:
        case ScaleRule.MEDIAN:
            c = math.log(2) / np.median(positive) if positive.size else 1.0
            weights = np.exp(-c * matrix)
        case ScaleRule.FIXED:
            if scale is None or scale <= 0:
                raise ValueError(
                    f"Scale rule 'fixed' requires a positive scale (got {scale})."
                )
            weights = np.exp(-scale * matrix)
        case ScaleRule.INVERSE:
            floor = positive.min() if positive.size else 1.0
            weights = 1 / np.maximum(matrix, floor)
        case _:
            raise ValueError(f"Unknown scale rule '{scale_rule}'.")
    weights[~off_diagonal] = 0.0
    return np.diag(weights.sum(axis=1)) - weights


def fiedler_pair(laplacian: np.ndarray) -> tuple[float, np.ndarray]:
    """
    Returns the second-smallest eigenvalue of the graph `laplacian` and
    a unit eigenvector orthogonal to the all-ones vector (first nonzero
    component positive).
    """
    laplacian = np.asarray(laplacian, dtype=float)
    n = len(laplacian)
    if laplacian.shape != (n, n) or n < 2:
        raise ValueError(
            f"Laplacian must be square with at least two rows ({laplacian.shape})."
        )
    if not np.allclose(laplacian, laplacian.T):
        raise ValueError("Laplacian is not symmetric.")
    # restrict to the orthogonal complement of the all-ones vector
    basis = linalg.null_space(np.ones((1, n)))
    try:
        values, vectors = linalg.eigh(basis.T @ laplacian @ basis)
    except linalg.LinAlgError as exc_info:
        raise ConvergenceError(
            f"Eigensolver did not converge: {exc_info}"
        ) from exc_info
    vector = basis @ vectors[:, 0]
    vector /= np.linalg.norm(vector)
    nonzero = np.flatnonzero(np.abs(vector) > 1e-12)
    if nonzero.size and vector[nonzero[0]] < 0:
        vector = -vector
    return float(values[0]), vector


def fiedler_vector(laplacian: np.ndarray) -> np.ndarray:
    """Returns the Fiedler vector of the graph `laplacian`."""
    return fiedler_pair(laplacian)[1]


def laplacian_order(
    matrix: DistanceMatrix,
    scale_rule: ScaleRule = ScaleRule.MEDIAN,
    scale: Optional[float] = None,
) -> Ordering:
    """
    Returns the spectral seriation of the distance `matrix`: indices
    sorted by decreasing Fiedler-vector component (ties: index).
    """
    matrix = _validate_distance_matrix(matrix)
    if len(matrix) < 2:
        return list(range(len(matrix)))
    vector = fiedler_vector(laplacian_matrix(matrix, scale_rule, scale))
    return sorted(range(len(matrix)), key=lambda i: (-vector[i], i))


def consistency_score(a: Ordering, b: Ordering) -> int:
    """
    Returns the number of pairs of common elements ordered equally by
    `a` and `b` minus the number of pairs ordered differently.
    """
    position_b = {x: i for i, x in enumerate(b)}
    ranks = np.array([position_b[x] for x in a if x in position_b])
    if ranks.size < 2:
        return 0
    signs = np.sign(ranks[None, :] - ranks[:, None])
    return int(np.triu(signs, 1).sum())


def time_consistency(trackset: TrackSet, order: Ordering) -> int:
    """
    Returns the sum over all tracks of the consistency score of `order`
    restricted to the samples of that track and their time order.
    """
    by_track: dict[int, list[int]] = {}
    for index in order:
        by_track.setdefault(int(trackset.track_of[index]), []).append(index)
    # global indices of a track increase with time
    return sum(
        consistency_score(indices, sorted(indices))
        for indices in by_track.values()
    )


def orient_order(
    trackset: TrackSet,
    order: Ordering,
    reference: Optional[Ordering] = None,
) -> Ordering:
    """
    Returns `order` or its reverse, whichever agrees with the time order
    of the individual tracks. If the tracks do not decide, the
    orientation agreeing with `reference` is returned (if given).
    """
    score = time_consistency(trackset, order)
    if score == 0 and reference is not None:
        score = consistency_score(order, reference)
    if score < 0:
        return list(reversed(order))
    return list(order)


def scoring_matrix(
    orders: list[Ordering], support: list[int]
) -> np.ndarray:
    """
    Returns the matrix `M` over `support` with `M[i, j]` the number of
    orders placing `support[i]` before `support[j]` minus the number
    placing it after (orders not containing both do not count).
    """
    index = {x: i for i, x in enumerate(support)}
    matrix = np.zeros((len(support), len(support)), dtype=np.int64)
    for order in orders:
        positions = np.full(len(support), -1)
        for position, x in enumerate(order):
            positions[index[x]] = position
        present = positions >= 0
        signs = np.sign(positions[None, :] - positions[:, None])
        matrix += signs * (present[:, None] & present[None, :])
    return matrix


def _order_score(matrix: np.ndarray, permutation: np.ndarray) -> int:
    return int(np.triu(matrix[np.ix_(permutation, permutation)], 1).sum())


def _swap_local_search(
    matrix: np.ndarray, permutation: np.ndarray
) -> np.ndarray:
    """
    Returns a local optimum of the order score under swaps of two
    elements (first improvement, scanning positions in index order).
    """
    permutation = permutation.copy()
    n = len(permutation)
    permuted = matrix[np.ix_(permutation, permutation)]
    improved = True
    while improved:
        improved = False
        cumulative = np.cumsum(permuted, axis=0)
        p = 0
        while p < n - 1:
            q_range = np.arange(p + 1, n)
            row = permuted[p, p + 1:]
            # sum of P[p, r] and P[r, q] over p < r < q
            between = np.concatenate(([0], np.cumsum(row)[:-1])) + (
                cumulative[q_range - 1, q_range] - cumulative[p, q_range]
            )
            delta = -2 * (row + between)
            candidates = np.flatnonzero(delta > 0)
            if candidates.size == 0:
                p += 1
                continue
            q = int(q_range[candidates[0]])
            permutation[[p, q]] = permutation[[q, p]]
            permuted[[p, q], :] = permuted[[q, p], :]
            permuted[:, [p, q]] = permuted[:, [q, p]]
            cumulative = np.cumsum(permuted, axis=0)
            improved = True
    return permutation


def aggregate_orders(
    orders: list[Ordering],
    restarts: int = 100,
    rng: Optional[np.random.Generator] = None,
) -> Ordering:
    """
    Returns an aggregate of (partial) `orders`.

    Swap local search maximizes the order score (sum of `M` over all
    ordered pairs, see `scoring_matrix`) from the input orders (extended
    to the common support) and `restarts - len(orders)` random
    permutations. The result is the maximum-weight path in the DAG of
    pairs `(i, j)` with `M[i, j] > 0` that are consistent with the best
    permutation; elements off that path are dropped.
    """
    if not orders:
        raise ValueError("No orders to aggregate.")
    if rng is None:
        rng = np.random.default_rng(0)
    support = sorted(set().union(*orders))
    n = len(support)
    if n < 2:
        return support
    index = {x: i for i, x in enumerate(support)}
    matrix = scoring_matrix(orders, support)

    starts = []
    for order in orders:
        contained = set(order)
        starts.append(
            [index[x] for x in order]
            + [i for i, x in enumerate(support) if x not in contained]
        )
    starts.extend(
        rng.permutation(n) for _ in range(max(restarts - len(orders), 0))
    )

    best, best_score = None, -math.inf
    for start in starts:
        permutation = _swap_local_search(matrix, np.asarray(start))
        score = _order_score(matrix, permutation)
        if score > best_score:
            best, best_score = permutation, score

    rank = np.empty(n, dtype=int)
    rank[best] = np.arange(n)
    dag = nx.DiGraph()
    dag.add_nodes_from(int(i) for i in best)
    for i, j in zip(*np.nonzero(matrix > 0)):
        if rank[i] < rank[j]:
            dag.add_edge(int(i), int(j), weight=int(matrix[i, j]))
    path = nx.dag_longest_path(dag, weight="weight", default_weight=0)
    return [support[i] for i in path]


def _base_order(
    net: RoadNetwork,
    trackset: TrackSet,
    base_method: OrderingMethod,
    match_cfg: MatchConfig,
    options: OrderingOptions,
    log: Optional[Logger] = None,
) -> Ordering:
    if len(trackset.tracks) == 1:
        return trackset.time_order()
    match base_method:
        case OrderingMethod.ITERATIVE:
            order = iterative_projection_order(
                net, trackset, match_cfg, options.max_rounds, log
            )
        case OrderingMethod.LAPLACIAN:
            if options.distance_mode is DistanceMode.EUCLIDEAN:
                matrix = euclidean_distance_matrix(trackset)
            else:
                matrix = build_distance_matrix(
                    net, trackset, match_cfg, log
                )
            order = laplacian_order(
                matrix, options.scale_rule, options.scale
            )
        case _:
            raise ValueError(f"Unknown ordering method '{base_method}'.")
    return orient_order(trackset, order)


def boost(
    net: RoadNetwork,
    trackset: TrackSet,
    base_method: Optional[OrderingMethod],
    boost_cfg: BoostConfig,
    match_cfg: MatchConfig,
    options: Optional[OrderingOptions] = None,
    log: Optional[Logger] = None,
) -> Ordering:
    """
    Returns the aggregate of the `base_method`-orderings of
    `boost_cfg.subsamples` Bernoulli subsamples of the pooled samples.

    Subsamples with fewer than two samples are redrawn; subsamples whose
    ordering fails are skipped. Before aggregation, every subsample
    ordering is oriented along the time order of the tracks (or along
    the first ordering if its tracks do not decide).

    Keyword arguments:
    net -- road network
    trackset -- tracks to be ordered
    base_method -- ordering method applied to every subsample; `None`
                   uses `boost_cfg.base_method`
    boost_cfg -- boosting configuration
    match_cfg -- matching configuration of the base method
    options -- options of the base method
               (default None; uses `OrderingOptions()`)
    log -- logger for skipped or redrawn subsamples
           (default None)
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    if options is None:
        options = OrderingOptions()
    if base_method is None:
        base_method = boost_cfg.base_method
    if len(trackset) < 2:
        raise ValueError(
            f"Boosting requires at least two samples (got {len(trackset)})."
        )
    rng = np.random.default_rng(boost_cfg.seed)

    orders = []
    for k in range(boost_cfg.subsamples):
        while True:
            mask = rng.random(len(trackset)) < boost_cfg.inclusion_probability
            if mask.sum() >= 2:
                break
            log.log(
                Context.WARNING,
                body=f"Redrawing subsample {k} with fewer than two samples.",
            )
        subset, mapping = trackset.subset(np.flatnonzero(mask).tolist())
        try:
            order = _base_order(
                net, subset, base_method, match_cfg, options, log
            )
        except MATCH_ERRORS as exc_info:
            log.log(
                Context.WARNING,
                body=f"Skipping subsample {k}: {exc_info}",
            )
            continue
        order = [mapping[i] for i in order]
        if orders:
            order = orient_order(trackset, order, orders[0])
        orders.append(order)

    if not orders:
        raise InfeasibleMatchError(
            "Boosting failed: no subsample could be ordered."
        )
    return aggregate_orders(orders, boost_cfg.restarts, rng)


def compute_ordering(
    net: RoadNetwork,
    trackset: TrackSet,
    method: MatchMethod,
    match_cfg: MatchConfig,
    boost_cfg: Optional[BoostConfig] = None,
    options: Optional[OrderingOptions] = None,
    log: Optional[Logger] = None,
) -> Ordering:
    """
    Returns the global order of the pooled samples for `method`. A
    single track is always ordered by time; orderings of multiple tracks
    are oriented along the time order of the tracks.
    """
    if len(trackset.tracks) == 1:
        return trackset.time_order()
    if method is MatchMethod.SINGLE:
        raise ValueError(
            "Method 'single' cannot order samples of multiple tracks."
        )
    if options is None:
        options = OrderingOptions()
    if method.boosted:
        return boost(
            net,
            trackset,
            method.base_method,
            boost_cfg or BoostConfig(),
            match_cfg,
            options,
            log,
        )
    return _base_order(
        net, trackset, method.base_method, match_cfg, options, log
    )


def match_multi(
    net: RoadNetwork,
    trackset: TrackSet,
    method: MatchMethod,
    match_cfg: MatchConfig,
    boost_cfg: Optional[BoostConfig] = None,
    options: Optional[OrderingOptions] = None,
    log: Optional[Logger] = None,
) -> MatchResult:
    """
    Returns the match of the merged track of all samples of `trackset`
    arranged by the ordering of `method`.
    """
    order = compute_ordering(
        net, trackset, method, match_cfg, boost_cfg, options, log
    )
    return match_track(net, trackset.ordered_track(order), match_cfg, log)
