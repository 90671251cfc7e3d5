"""
Command-line interface of trackmatch.

Every subcommand prints its results to stdout; failures are reported as
a single line on stderr with exit status 1.
"""

from typing import Optional
from pathlib import Path
from dataclasses import replace
import argparse
import math
import sys

import numpy as np
from dcm_common import Logger

from trackmatch.config import AppConfig
from trackmatch.models import (
    AUTO_LAMBDA,
    MatchMethod,
    OrderingMethod,
    ScaleRule,
    DistanceMode,
    SamplingConfig,
    SamplingDistribution,
    SweepSpec,
)
from trackmatch.components.road_network import generate_grid_network
from trackmatch.components.single_track import (
    match_track,
    estimate_sigma,
    auto_lambda,
    optimal_lambda,
)
from trackmatch.components.multi_track import (
    compute_ordering,
    match_multi,
)
from trackmatch.components.simulation import (
    substream,
    generate_route,
    generate_trackset,
)
from trackmatch.components.evaluation import (
    similarity,
    run_sweep,
    emit_results,
    read_results,
    summarize,
)
from trackmatch import util


_TAG = "trackmatch CLI"


def _lambda(value: str) -> float | str:
    if value == AUTO_LAMBDA:
        return value
    try:
        lambda_ = float(value)
    except ValueError as exc_info:
        raise argparse.ArgumentTypeError(
            f"expected nonnegative number or '{AUTO_LAMBDA}', got '{value}'"
        ) from exc_info
    if lambda_ < 0 or not math.isfinite(lambda_):
        raise argparse.ArgumentTypeError(
            f"expected nonnegative number or '{AUTO_LAMBDA}', got '{value}'"
        )
    return lambda_


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError as exc_info:
        raise argparse.ArgumentTypeError(
            f"expected integer, got '{value}'"
        ) from exc_info
    if number < 1:
        raise argparse.ArgumentTypeError(
            f"expected positive integer, got {number}"
        )
    return number


def _add_match_arguments(
    parser: argparse.ArgumentParser, config: AppConfig
) -> None:
    parser.add_argument(
        "--network", type=Path, required=True, help="network file"
    )
    parser.add_argument(
        "--lambda",
        dest="lambda_",
        type=_lambda,
        default=config.MATCH_LAMBDA,
        help=f"regularization weight or '{AUTO_LAMBDA}'",
    )
    parser.add_argument(
        "--n-extra",
        type=int,
        default=config.MATCH_EXTRA_CANDIDATES,
        help="extra candidates per edge",
    )
    parser.add_argument(
        "--radius",
        type=float,
        default=config.MATCH_RADIUS,
        help="candidate search radius in meters",
    )
    parser.add_argument(
        "--max-candidates",
        type=int,
        default=config.MATCH_MAX_CANDIDATES,
        help="maximum number of candidates per sample",
    )
    parser.add_argument(
        "--calibration",
        type=float,
        default=None,
        help="calibration constant of the weight rule",
    )
    parser.add_argument(
        "--truth", type=Path, help="ground truth or path document"
    )
    parser.add_argument("--output", type=Path, help="match result file")


def build_parser(
    config: Optional[AppConfig] = None,
) -> argparse.ArgumentParser:
    """Returns the argument parser of the command-line interface."""
    config = config or AppConfig()
    parser = argparse.ArgumentParser(
        prog="trackmatch",
        description="Map matching of sparse, noisy GPS tracks.",
    )
    # global flags are accepted before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    for target, default in ((parser, None), (common, argparse.SUPPRESS)):
        target.add_argument(
            "--seed",
            type=int,
            default=0 if default is None else default,
            help="base seed",
        )
        target.add_argument(
            "--workers",
            type=_positive_int,
            default=config.SWEEP_WORKERS if default is None else default,
            help="number of worker processes",
        )
        target.add_argument(
            "--verbose",
            action="store_true",
            default=False if default is None else default,
            help="print log to stderr",
        )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # gen-network
    gen = subparsers.add_parser(
        "gen-network", parents=[common], help="generate grid network"
    )
    gen.add_argument("--rows", type=int, default=config.GRID_ROWS)
    gen.add_argument("--cols", type=int, default=config.GRID_COLS)
    gen.add_argument("--spacing", type=float, default=config.GRID_SPACING)
    gen.add_argument(
        "--perturbation", type=float, default=config.GRID_PERTURBATION
    )
    gen.add_argument(
        "--removal-prob", type=float, default=config.GRID_REMOVAL_PROBABILITY
    )
    gen.add_argument(
        "--speed-range",
        type=float,
        nargs=2,
        metavar=("MIN", "MAX"),
        default=list(config.grid_speed_range),
    )
    gen.add_argument("--output", type=Path, required=True)

    # simulate
    simulate = subparsers.add_parser(
        "simulate", parents=[common], help="generate routes and noisy tracks"
    )
    simulate.add_argument("--network", type=Path, required=True)
    simulate.add_argument("--routes", type=_positive_int, default=1)
    simulate.add_argument(
        "--tracks-per-route", type=_positive_int, default=1
    )
    simulate.add_argument("--sigma", type=float, required=True)
    simulate.add_argument("--tau", type=float, required=True)
    simulate.add_argument(
        "--dist",
        choices=[d.value for d in SamplingDistribution],
        default=SamplingDistribution.UNIFORM.value,
    )
    simulate.add_argument(
        "--min-length", type=float, default=config.ROUTE_MIN_LENGTH
    )
    simulate.add_argument(
        "--max-length", type=float, default=config.ROUTE_MAX_LENGTH
    )
    simulate.add_argument("--output", type=Path, required=True)

    # match
    match = subparsers.add_parser(
        "match", parents=[common], help="match a single track"
    )
    match.add_argument("--track", type=Path, required=True)
    _add_match_arguments(match, config)

    # multimatch
    multimatch = subparsers.add_parser(
        "multimatch", parents=[common], help="match tracks of one route"
    )
    multimatch.add_argument(
        "--tracks",
        type=Path,
        required=True,
        help="directory of track files or multi-section track file",
    )
    multimatch.add_argument(
        "--method",
        choices=[m.value for m in OrderingMethod],
        default=OrderingMethod.ITERATIVE.value,
    )
    multimatch.add_argument("--boost", action="store_true")
    multimatch.add_argument(
        "--subsamples", type=_positive_int, default=config.BOOST_SUBSAMPLES
    )
    multimatch.add_argument(
        "--inclusion-prob",
        type=float,
        default=config.BOOST_INCLUSION_PROBABILITY,
    )
    multimatch.add_argument(
        "--restarts", type=_positive_int, default=config.BOOST_RESTARTS
    )
    multimatch.add_argument(
        "--max-rounds",
        type=_positive_int,
        default=config.ITERATIVE_MAX_ROUNDS,
    )
    multimatch.add_argument(
        "--scale-rule",
        choices=[r.value for r in ScaleRule],
        default=config.scale_rule.value,
    )
    multimatch.add_argument(
        "--scale", type=float, default=config.LAPLACIAN_SCALE
    )
    multimatch.add_argument(
        "--distance-mode",
        choices=[m.value for m in DistanceMode],
        default=DistanceMode.PATH.value,
    )
    _add_match_arguments(multimatch, config)

    # estimate-sigma
    estimate = subparsers.add_parser(
        "estimate-sigma", parents=[common], help="estimate noise level"
    )
    estimate.add_argument("--network", type=Path, required=True)
    estimate.add_argument("--track", type=Path, required=True)
    estimate.add_argument("--calibration", type=float, default=None)
    estimate.add_argument(
        "--radius", type=float, default=config.MATCH_RADIUS
    )

    # similarity
    similarity_ = subparsers.add_parser(
        "similarity", parents=[common], help="similarity of two paths"
    )
    similarity_.add_argument("first", type=Path)
    similarity_.add_argument("second", type=Path)

    # sweep
    sweep = subparsers.add_parser(
        "sweep", parents=[common], help="run a parameter sweep"
    )
    sweep.add_argument("--network", type=Path, help="network file")
    sweep.add_argument("--spec", type=Path, help="sweep spec file")
    sweep.add_argument("--sigmas", type=float, nargs="+")
    sweep.add_argument("--taus", type=float, nargs="+")
    sweep.add_argument("--lambdas", type=_lambda, nargs="+")
    sweep.add_argument(
        "--methods", choices=[m.value for m in MatchMethod], nargs="+"
    )
    sweep.add_argument(
        "--track-counts", type=_positive_int, nargs="+", default=[1]
    )
    sweep.add_argument("--routes", type=_positive_int, default=25)
    sweep.add_argument("--instances", type=_positive_int, default=10)
    sweep.add_argument(
        "--trim", type=float, default=config.SWEEP_TRIM_FRACTION
    )
    sweep.add_argument(
        "--distribution",
        choices=[d.value for d in SamplingDistribution],
        default=SamplingDistribution.EXPONENTIAL.value,
    )
    sweep.add_argument(
        "--record-runtime",
        action="store_true",
        help="record runtimes (reruns are no longer byte-identical)",
    )
    sweep.add_argument("--output", type=Path, required=True)
    return parser


def _match_config(args, config: AppConfig, lambda_: float = 1.0):
    return config.match_config(
        lambda_=lambda_,
        radius=args.radius,
        extra_candidates=args.n_extra,
        max_candidates=args.max_candidates,
    )


def _report_similarity(result, args) -> None:
    if args.truth is not None:
        truth = util.load_route_path(args.truth)
        print(f"similarity={similarity(result.path, truth):.6f}")


def cmd_gen_network(args, config: AppConfig, log: Logger) -> None:
    """Generates and writes a grid network."""
    net = generate_grid_network(
        args.rows,
        args.cols,
        args.spacing,
        args.perturbation,
        args.removal_prob,
        tuple(args.speed_range),
        args.seed,
        **config.network_options(),
    )
    util.write_network(net, args.output)
    print(f"{len(net.nodes)} nodes, {len(net.edges)} edges")


def cmd_simulate(args, config: AppConfig, log: Logger) -> None:
    """Generates routes with noisy tracks and ground truths."""
    net = util.load_network_from_file(
        args.network, log=log, **config.network_options()
    )
    cfg = SamplingConfig(
        args.sigma, args.tau, SamplingDistribution(args.dist), args.seed
    )
    count = 0
    for r in range(args.routes):
        route = generate_route(
            net,
            substream(args.seed, 0, r),
            args.min_length,
            args.max_length,
            config.ROUTE_MAX_ATTEMPTS,
        )
        trackset, truths = generate_trackset(
            net,
            route,
            args.tracks_per_route,
            cfg,
            substream(args.seed, 1, r),
            log=log,
        )
        directory = args.output / f"route_{r}"
        directory.mkdir(parents=True, exist_ok=True)
        for k, (track, truth) in enumerate(zip(trackset.tracks, truths)):
            util.write_track(track, directory / f"track_{k}.csv")
            util.write_ground_truth(truth, directory / f"truth_{k}.json")
        count += len(trackset.tracks)
    print(f"{args.routes} route(s), {count} track(s)")


def cmd_match(args, config: AppConfig, log: Logger) -> None:
    """Matches a single track."""
    net = util.load_network_from_file(
        args.network, log=log, **config.network_options()
    )
    track = util.load_track_from_file(args.track)
    calibration = (
        config.LAMBDA_CALIBRATION
        if args.calibration is None
        else args.calibration
    )
    if args.lambda_ == AUTO_LAMBDA:
        sigma, lambda_ = auto_lambda(
            net,
            track,
            _match_config(args, config),
            calibration,
            config.SIGMA_ESTIMATION_LAMBDA,
            log,
        )
        print(f"sigma_hat={sigma:.6f}")
        print(f"lambda={lambda_:.6g}")
    else:
        lambda_ = args.lambda_
    result = match_track(net, track, _match_config(args, config, lambda_), log)
    if args.output is not None:
        util.write_match_result(result, args.output)
    print(
        f"total_cost={result.total_cost:.6f} "
        + f"length={result.path.total_length:.3f}"
    )
    _report_similarity(result, args)


def cmd_multimatch(args, config: AppConfig, log: Logger) -> None:
    """Matches multiple tracks of the same route."""
    net = util.load_network_from_file(
        args.network, log=log, **config.network_options()
    )
    trackset = util.load_trackset(args.tracks)
    method = MatchMethod(
        f"{args.method}_boosted" if args.boost else args.method
    )
    boost_cfg = config.boost_config(
        subsamples=args.subsamples,
        inclusion_probability=args.inclusion_prob,
        base_method=OrderingMethod(args.method),
        restarts=args.restarts,
        seed=args.seed,
    )
    options = config.ordering_options(
        max_rounds=args.max_rounds,
        scale_rule=ScaleRule(args.scale_rule),
        scale=args.scale,
        distance_mode=DistanceMode(args.distance_mode),
    )
    if args.lambda_ == AUTO_LAMBDA:
        cfg = _match_config(args, config, config.SIGMA_ESTIMATION_LAMBDA)
        order = compute_ordering(
            net, trackset, method, cfg, boost_cfg, options, log
        )
        merged = trackset.ordered_track(order)
        sigma, lambda_ = auto_lambda(
            net,
            merged,
            cfg,
            (
                config.LAMBDA_CALIBRATION
                if args.calibration is None
                else args.calibration
            ),
            config.SIGMA_ESTIMATION_LAMBDA,
            log,
        )
        print(f"sigma_hat={sigma:.6f}")
        print(f"lambda={lambda_:.6g}")
        result = match_track(net, merged, replace(cfg, lambda_=lambda_), log)
    else:
        result = match_multi(
            net,
            trackset,
            method,
            _match_config(args, config, args.lambda_),
            boost_cfg,
            options,
            log,
        )
    if args.output is not None:
        util.write_match_result(result, args.output)
    print(
        f"total_cost={result.total_cost:.6f} "
        + f"length={result.path.total_length:.3f} "
        + f"samples={len(result.chosen)}/{len(trackset)}"
    )
    if args.truth is not None:
        truth = util.load_route_path(args.truth)
        print(f"similarity={similarity(result.path, truth):.6f}")
        if args.lambda_ != AUTO_LAMBDA:
            cfg = _match_config(args, config, args.lambda_)
            baseline = np.mean(
                [
                    similarity(match_track(net, track, cfg).path, truth)
                    for track in trackset.tracks
                ]
            )
            print(f"single_track_mean_similarity={baseline:.6f}")


def cmd_estimate_sigma(args, config: AppConfig, log: Logger) -> None:
    """Estimates the noise level of a track."""
    net = util.load_network_from_file(
        args.network, log=log, **config.network_options()
    )
    track = util.load_track_from_file(args.track)
    cfg = config.match_config(radius=args.radius)
    sigma = estimate_sigma(
        net, track, cfg, config.SIGMA_ESTIMATION_LAMBDA, log
    )
    print(f"sigma_hat={sigma:.6f}")
    if args.calibration is not None:
        length = match_track(
            net, track, replace(cfg, lambda_=config.SIGMA_ESTIMATION_LAMBDA)
        ).path.total_length
        lambda_ = (
            optimal_lambda(len(track), sigma, length, args.calibration)
            if length > 0
            else 0.0
        )
        print(f"lambda={lambda_:.6g}")


def cmd_similarity(args, config: AppConfig, log: Logger) -> None:
    """Prints the similarity of two paths."""
    value = similarity(
        util.load_route_path(args.first), util.load_route_path(args.second)
    )
    print(f"{value:.6f}")


def cmd_sweep(args, config: AppConfig, log: Logger) -> None:
    """Runs (or resumes) a parameter sweep."""
    if args.spec is not None:
        spec = util.load_sweep_spec_from_file(args.spec)
    else:
        missing = [
            flag
            for flag, value in (
                ("--sigmas", args.sigmas),
                ("--taus", args.taus),
                ("--lambdas", args.lambdas),
                ("--methods", args.methods),
            )
            if not value
        ]
        if missing:
            raise ValueError(
                f"Missing sweep axes {', '.join(missing)} (or use --spec)."
            )
        spec = SweepSpec(
            sigmas=args.sigmas,
            taus=args.taus,
            lambdas=args.lambdas,
            methods=[MatchMethod(method) for method in args.methods],
            track_counts=args.track_counts,
            routes=args.routes,
            instances=args.instances,
            seed=args.seed,
            trim_fraction=args.trim,
            distribution=SamplingDistribution(args.distribution),
            route_min_length=config.ROUTE_MIN_LENGTH,
            route_max_length=config.ROUTE_MAX_LENGTH,
            subsamples=config.BOOST_SUBSAMPLES,
            inclusion_probability=config.BOOST_INCLUSION_PROBABILITY,
            restarts=config.BOOST_RESTARTS,
            record_runtime=args.record_runtime,
        )
    if args.network is not None:
        net = util.load_network_from_file(
            args.network, log=log, **config.network_options()
        )
    else:
        net = generate_grid_network(
            config.GRID_ROWS,
            config.GRID_COLS,
            config.GRID_SPACING,
            config.GRID_PERTURBATION,
            config.GRID_REMOVAL_PROBABILITY,
            config.grid_speed_range,
            spec.seed,
            **config.network_options(),
        )

    existing = read_results(args.output) if args.output.is_file() else []
    rows = run_sweep(
        net,
        spec,
        config.match_config(),
        args.workers,
        existing,
        log,
        config.ordering_options(),
    )
    emit_results(rows, args.output, append=bool(existing))
    print(f"{len(rows)} new row(s), {len(existing)} existing row(s)")
    for cell in summarize(existing + rows, spec.trim_fraction):
        print(
            f"sigma={cell.sigma} tau={cell.tau} lambda={cell.lambda_} "
            + f"method={cell.method} s={cell.s} "
            + f"similarity={cell.similarity:.4f} "
            + f"runs={cell.runs} failures={cell.failures}"
        )


COMMANDS = {
    "gen-network": cmd_gen_network,
    "simulate": cmd_simulate,
    "match": cmd_match,
    "multimatch": cmd_multimatch,
    "estimate-sigma": cmd_estimate_sigma,
    "similarity": cmd_similarity,
    "sweep": cmd_sweep,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Runs the command-line interface; returns the exit status."""
    try:
        config = AppConfig()
    except ValueError as exc_info:
        print(f"trackmatch: bad configuration: {exc_info}", file=sys.stderr)
        return 1
    parser = build_parser(config)
    args = parser.parse_args(argv)
    if args.command == "gen-network" and (args.rows < 2 or args.cols < 2):
        parser.error("--rows and --cols must be at least 2")

    log = Logger(default_origin=_TAG)
    try:
        COMMANDS[args.command](args, config, log)
    except (ValueError, RuntimeError, OSError) as exc_info:
        print(
            f"trackmatch {args.command}: "
            + str(exc_info).replace("\n", " "),
            file=sys.stderr,
        )
        return 1
    finally:
        if args.verbose:
            print(log.fancy(), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
