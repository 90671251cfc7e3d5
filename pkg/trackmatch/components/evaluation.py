"""
This module defines the similarity of matched paths, trimmed summary
statistics and the parameter-sweep harness.
"""

from typing import Optional, Iterable
from dataclasses import dataclass, replace
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
import csv
import math
import time

import numpy as np
from scipy.stats import trim_mean
from dcm_common import Logger, LoggingContext as Context

from trackmatch.models import (
    RoutePath,
    MatchConfig,
    BoostConfig,
    MatchMethod,
    SamplingConfig,
    AUTO_LAMBDA,
    SweepSpec,
    ResultRow,
)
from .road_network import RoadNetwork, traversal_measure
from .single_track import match_track, auto_lambda
from .multi_track import (
    OrderingOptions,
    compute_ordering,
    match_multi,
)
from .simulation import substream, generate_route, generate_trackset


_TAG = "Evaluation"
RESULT_COLUMNS = [
    "sigma",
    "tau",
    "lambda",
    "method",
    "s",
    "route",
    "instance",
    "similarity",
    "runtime_ms",
    "error",
]


def _overlap(
    a: list[tuple[float, float]], b: list[tuple[float, float]]
) -> float:
    """Returns the length of the intersection of two interval unions."""
    total, i, j = 0.0, 0, 0
    while i < len(a) and j < len(b):
        lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        total += max(0.0, hi - lo)
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return total


def similarity(p1: RoutePath, p2: RoutePath) -> float:
    """
    Returns the length of the intersection divided by the length of the
    union of the road intervals covered by `p1` and `p2` (direction and
    multiplicity are ignored).
    """
    m1, m2 = traversal_measure(p1), traversal_measure(p2)
    length1 = sum(hi - lo for intervals in m1.values() for lo, hi in intervals)
    length2 = sum(hi - lo for intervals in m2.values() for lo, hi in intervals)
    if length1 <= 0 and length2 <= 0:
        raise ValueError("Similarity of two zero-length paths is undefined.")
    intersection = sum(
        _overlap(m1[edge_id], m2[edge_id]) for edge_id in m1.keys() & m2.keys()
    )
    return intersection / (length1 + length2 - intersection)


def trimmed_mean(values: Iterable[float], trim_fraction: float = 0.1) -> float:
    """
    Returns the mean of `values` after dropping `floor(f * n)` values
    from both ends of the sorted sequence.
    """
    values = np.asarray(list(values), dtype=float)
    if not 0 <= trim_fraction < 0.5:
        raise ValueError(
            f"Trim fraction must be in [0, 0.5) (got {trim_fraction})."
        )
    if len(values) - 2 * math.floor(trim_fraction * len(values)) < 1:
        raise ValueError("No values left after trimming.")
    return float(trim_mean(values, trim_fraction))


@dataclass(frozen=True)
class _Unit:
    """Generated instance shared by all weights and methods of a cell."""

    route: int
    instance: int
    sigma_index: int
    tau_index: int
    s_index: int


# worker state (set once per process)
_network: Optional[RoadNetwork] = None
_spec: Optional[SweepSpec] = None
_match_cfg: Optional[MatchConfig] = None
_options: Optional[OrderingOptions] = None
_route_cache: dict = {}


def _init_worker(
    net: RoadNetwork,
    spec: SweepSpec,
    match_cfg: MatchConfig,
    options: OrderingOptions,
) -> None:
    global _network, _spec, _match_cfg, _options, _route_cache
    _network, _spec, _match_cfg, _options = net, spec, match_cfg, options
    _route_cache = {}


def _route(index: int) -> RoutePath:
    if index not in _route_cache:
        _route_cache[index] = generate_route(
            _network,
            substream(_spec.seed, 0, index),
            _spec.route_min_length,
            _spec.route_max_length,
        )
    return _route_cache[index]


def _match_row(
    trackset, truths, lambda_, method: MatchMethod, boost_seed: int
) -> float:
    """Returns the similarity achieved by `method` with weight `lambda_`."""
    route = truths[0].route
    if method is MatchMethod.SINGLE:
        values = []
        for track in trackset.tracks:
            cfg = _match_cfg
            if lambda_ == AUTO_LAMBDA:
                cfg = replace(
                    cfg, lambda_=auto_lambda(_network, track, cfg)[1]
                )
            else:
                cfg = replace(cfg, lambda_=float(lambda_))
            values.append(
                similarity(match_track(_network, track, cfg).path, route)
            )
        return float(np.mean(values))

    boost_cfg = BoostConfig(
        subsamples=_spec.subsamples,
        inclusion_probability=_spec.inclusion_probability,
        base_method=method.base_method,
        restarts=_spec.restarts,
        seed=boost_seed,
    )
    if lambda_ == AUTO_LAMBDA:
        cfg = replace(_match_cfg, lambda_=1.0)
        order = compute_ordering(
            _network, trackset, method, cfg, boost_cfg, _options
        )
        merged = trackset.ordered_track(order)
        cfg = replace(cfg, lambda_=auto_lambda(_network, merged, cfg)[1])
        result = match_track(_network, merged, cfg)
    else:
        result = match_multi(
            _network,
            trackset,
            method,
            replace(_match_cfg, lambda_=float(lambda_)),
            boost_cfg,
            _options,
        )
    return similarity(result.path, route)


def _run_unit(
    args: tuple[_Unit, frozenset],
) -> list[ResultRow]:
    unit, skip = args
    sigma = _spec.sigmas[unit.sigma_index]
    tau = _spec.taus[unit.tau_index]
    s = _spec.track_counts[unit.s_index]
    rows = []

    def row(lambda_, method, value, runtime, error=None) -> ResultRow:
        return ResultRow(
            sigma=float(sigma),
            tau=float(tau),
            lambda_=lambda_,
            method=method.value,
            s=s,
            route=unit.route,
            instance=unit.instance,
            similarity=value,
            runtime_ms=runtime if _spec.record_runtime else 0.0,
            error=error,
        )

    pending = [
        (lambda_, method)
        for lambda_ in _spec.lambdas
        for method in _spec.methods
        if row(lambda_, method, math.nan, 0.0).key not in skip
    ]
    if not pending:
        return rows

    cell_seed = np.random.SeedSequence(
        [
            _spec.seed,
            1,
            unit.route,
            unit.instance,
            unit.sigma_index,
            unit.tau_index,
            unit.s_index,
        ]
    )
    try:
        trackset, truths = generate_trackset(
            _network,
            _route(unit.route),
            s,
            SamplingConfig(sigma, tau, _spec.distribution),
            np.random.default_rng(cell_seed),
        )
    except (ValueError, RuntimeError) as exc_info:
        return [
            row(lambda_, method, math.nan, 0.0, type(exc_info).__name__)
            for lambda_, method in pending
        ]
    boost_seed = int(cell_seed.generate_state(1)[0])

    for lambda_, method in pending:
        start = time.perf_counter()
        try:
            value = _match_row(trackset, truths, lambda_, method, boost_seed)
        except (ValueError, RuntimeError) as exc_info:
            rows.append(
                row(
                    lambda_,
                    method,
                    math.nan,
                    (time.perf_counter() - start) * 1000,
                    type(exc_info).__name__,
                )
            )
            continue
        rows.append(
            row(lambda_, method, value, (time.perf_counter() - start) * 1000)
        )
    return rows


def run_sweep(
    net: RoadNetwork,
    spec: SweepSpec,
    match_cfg: Optional[MatchConfig] = None,
    workers: int = 1,
    existing: Optional[Iterable[ResultRow]] = None,
    log: Optional[Logger] = None,
    options: Optional[OrderingOptions] = None,
) -> list[ResultRow]:
    """
    Returns the result rows of all cells of `spec` that are not already
    contained in `existing`.

    Every cell, route and instance draws its data from its own random
    substream so that rows do not depend on execution order. Failed
    runs are returned as rows with NaN similarity and the error type.

    Keyword arguments:
    net -- road network
    spec -- sweep specification
    match_cfg -- base matching configuration (the weight is replaced
                 per row)
                 (default None; uses `MatchConfig()`)
    workers -- number of worker processes
               (default 1)
    existing -- rows from a previous (partial) run to be skipped
                (default None)
    log -- logger for failed rows
           (default None)
    options -- options of the multi-track ordering methods
               (default None; uses `OrderingOptions()`)
    """
    if log is None:
        log = Logger(default_origin=_TAG)
    if workers < 1:
        raise ValueError(f"Number of workers must be positive (got {workers}).")
    if match_cfg is None:
        match_cfg = MatchConfig()
    if options is None:
        options = OrderingOptions()
    skip = frozenset(row.key for row in (existing or []))
    units = [
        (_Unit(route, instance, sigma_index, tau_index, s_index), skip)
        for route in range(spec.routes)
        for sigma_index in range(len(spec.sigmas))
        for tau_index in range(len(spec.taus))
        for s_index in range(len(spec.track_counts))
        for instance in range(spec.instances)
    ]

    if workers == 1:
        _init_worker(net, spec, match_cfg, options)
        results = [_run_unit(unit) for unit in units]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(net, spec, match_cfg, options),
        ) as executor:
            results = list(executor.map(_run_unit, units))

    rows = [row for unit_rows in results for row in unit_rows]
    for row in rows:
        if row.error is not None:
            log.log(
                Context.ERROR,
                body=(
                    f"Run failed with {row.error} (sigma={row.sigma}, "
                    + f"tau={row.tau}, lambda={row.lambda_}, "
                    + f"method={row.method}, s={row.s}, route={row.route}, "
                    + f"instance={row.instance})."
                ),
            )
    return rows


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "NaN"
    return str(value)


def emit_results(
    rows: Iterable[ResultRow], destination: Path, append: bool = False
) -> None:
    """
    Writes `rows` as comma-separated values to `destination` (with
    header unless appending to an existing, nonempty file).
    """
    destination = Path(destination)
    write_header = not (
        append and destination.is_file() and destination.stat().st_size > 0
    )
    with destination.open(
        "a" if append else "w", encoding="utf-8", newline=""
    ) as file:
        writer = csv.writer(file, lineterminator="\n")
        if write_header:
            writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _format(row.sigma),
                    _format(row.tau),
                    _format(row.lambda_),
                    row.method,
                    _format(row.s),
                    _format(row.route),
                    _format(row.instance),
                    _format(row.similarity),
                    _format(row.runtime_ms),
                    _format(row.error),
                ]
            )


def read_results(source: Path) -> list[ResultRow]:
    """Returns the rows of a results file written by `emit_results`."""
    with Path(source).open(encoding="utf-8", newline="") as file:
        reader = csv.DictReader(file)
        if reader.fieldnames is None:
            return []
        if reader.fieldnames != RESULT_COLUMNS:
            raise ValueError(
                f"Unexpected columns {reader.fieldnames} in '{source}' "
                + f"(expected {RESULT_COLUMNS})."
            )
        try:
            return [
                ResultRow(
                    sigma=float(record["sigma"]),
                    tau=float(record["tau"]),
                    lambda_=(
                        record["lambda"]
                        if record["lambda"] == AUTO_LAMBDA
                        else float(record["lambda"])
                    ),
                    method=record["method"],
                    s=int(record["s"]),
                    route=int(record["route"]),
                    instance=int(record["instance"]),
                    similarity=float(record["similarity"]),
                    runtime_ms=float(record["runtime_ms"]),
                    error=record["error"] or None,
                )
                for record in reader
            ]
        except (TypeError, ValueError) as exc_info:
            raise ValueError(
                f"Malformed results file '{source}': {exc_info}"
            ) from exc_info


@dataclass(frozen=True)
class CellSummary:
    """Trimmed-mean similarity of one sweep cell."""

    sigma: float
    tau: float
    lambda_: float | str
    method: str
    s: int
    similarity: float
    runs: int
    failures: int


def summarize(
    rows: Iterable[ResultRow], trim_fraction: float = 0.1
) -> list[CellSummary]:
    """
    Returns the trimmed-mean similarity per cell (sigma, tau, lambda,
    method, s) over all successful runs; cells without enough successful
    runs report NaN.
    """
    cells: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        cells.setdefault(row.key[:5], []).append(row)
    summaries = []
    for key, cell_rows in cells.items():
        values = [
            row.similarity
            for row in cell_rows
            if row.error is None and not math.isnan(row.similarity)
        ]
        try:
            value = trimmed_mean(values, trim_fraction)
        except ValueError:
            value = math.nan
        summaries.append(
            CellSummary(
                *key,
                similarity=value,
                runs=len(cell_rows),
                failures=len(cell_rows) - len(values),
            )
        )
    return summaries
