"""Configuration module for trackmatch."""

import os
from json import loads

from trackmatch.models import (
    MatchConfig,
    BoostConfig,
    OrderingMethod,
    ScaleRule,
)
from trackmatch.components.multi_track import OrderingOptions


class AppConfig:
    """
    Configuration for trackmatch.

    All settings can be overridden via environment variables of the same
    name or by subclassing.
    """

    # ------ MATCHING ------
    MATCH_LAMBDA = float(os.environ.get("MATCH_LAMBDA") or 1.0)
    MATCH_RADIUS = float(os.environ.get("MATCH_RADIUS") or 200.0)
    MATCH_EXTRA_CANDIDATES = int(
        os.environ.get("MATCH_EXTRA_CANDIDATES") or 3
    )
    MATCH_MAX_CANDIDATES = int(os.environ.get("MATCH_MAX_CANDIDATES") or 40)
    MATCH_RADIUS_GROWTH_CAP = int(
        os.environ.get("MATCH_RADIUS_GROWTH_CAP") or 2
    )
    MATCH_DEDUPLICATION_DISTANCE = float(
        os.environ.get("MATCH_DEDUPLICATION_DISTANCE") or 1.0
    )

    # ------ LAMBDA RULE ------
    LAMBDA_CALIBRATION = float(os.environ.get("LAMBDA_CALIBRATION") or 1.0)
    SIGMA_ESTIMATION_LAMBDA = float(
        os.environ.get("SIGMA_ESTIMATION_LAMBDA") or 1.0
    )

    # ------ MULTI-TRACK ------
    ITERATIVE_MAX_ROUNDS = int(os.environ.get("ITERATIVE_MAX_ROUNDS") or 20)
    BOOST_SUBSAMPLES = int(os.environ.get("BOOST_SUBSAMPLES") or 10)
    BOOST_INCLUSION_PROBABILITY = float(
        os.environ.get("BOOST_INCLUSION_PROBABILITY") or 0.5
    )
    BOOST_RESTARTS = int(os.environ.get("BOOST_RESTARTS") or 100)
    LAPLACIAN_SCALE_RULE = os.environ.get("LAPLACIAN_SCALE_RULE", "median")
    LAPLACIAN_SCALE = (
        float(os.environ["LAPLACIAN_SCALE"])
        if os.environ.get("LAPLACIAN_SCALE")
        else None
    )

    # ------ NETWORK ------
    SNAP_TOLERANCE = float(os.environ.get("SNAP_TOLERANCE") or 1e-6)
    QUADTREE_CAPACITY = int(os.environ.get("QUADTREE_CAPACITY") or 16)
    QUADTREE_MAX_DEPTH = int(os.environ.get("QUADTREE_MAX_DEPTH") or 20)
    GRID_ROWS = int(os.environ.get("GRID_ROWS") or 20)
    GRID_COLS = int(os.environ.get("GRID_COLS") or 20)
    GRID_SPACING = float(os.environ.get("GRID_SPACING") or 500.0)
    GRID_PERTURBATION = float(os.environ.get("GRID_PERTURBATION") or 0.0)
    GRID_REMOVAL_PROBABILITY = float(
        os.environ.get("GRID_REMOVAL_PROBABILITY") or 0.0
    )
    GRID_SPEED_RANGE = os.environ.get("GRID_SPEED_RANGE", "[8.0, 16.0]")

    # ------ SIMULATION ------
    ROUTE_MIN_LENGTH = float(os.environ.get("ROUTE_MIN_LENGTH") or 3000.0)
    ROUTE_MAX_LENGTH = float(os.environ.get("ROUTE_MAX_LENGTH") or 15000.0)
    ROUTE_MAX_ATTEMPTS = int(os.environ.get("ROUTE_MAX_ATTEMPTS") or 10000)

    # ------ EVALUATION ------
    SWEEP_TRIM_FRACTION = float(
        os.environ.get("SWEEP_TRIM_FRACTION") or 0.1
    )
    SWEEP_WORKERS = int(os.environ.get("SWEEP_WORKERS") or 1)

    def __init__(self) -> None:
        try:
            self.scale_rule = ScaleRule(self.LAPLACIAN_SCALE_RULE)
        except ValueError as exc_info:
            raise ValueError(
                f"Unknown Laplacian scale rule '{self.LAPLACIAN_SCALE_RULE}' "
                + f"(expected one of {[r.value for r in ScaleRule]})."
            ) from exc_info

        self.grid_speed_range = self.load_speed_range(self.GRID_SPEED_RANGE)

        if self.ITERATIVE_MAX_ROUNDS < 1:
            raise ValueError(
                "Maximum number of iterative-projection rounds must be "
                + f"positive (got {self.ITERATIVE_MAX_ROUNDS})."
            )
        if self.QUADTREE_CAPACITY < 1 or self.QUADTREE_MAX_DEPTH < 0:
            raise ValueError(
                f"Bad quad-tree settings (capacity {self.QUADTREE_CAPACITY}, "
                + f"maximum depth {self.QUADTREE_MAX_DEPTH})."
            )
        if self.ROUTE_MIN_LENGTH > self.ROUTE_MAX_LENGTH:
            raise ValueError(
                f"Bad route-length bounds [{self.ROUTE_MIN_LENGTH}, "
                + f"{self.ROUTE_MAX_LENGTH}]."
            )
        if not 0 <= self.SWEEP_TRIM_FRACTION < 0.5:
            raise ValueError(
                "Trim fraction must be in [0, 0.5) (got "
                + f"{self.SWEEP_TRIM_FRACTION})."
            )
        if self.SWEEP_WORKERS < 1:
            raise ValueError(
                f"Number of workers must be positive (got {self.SWEEP_WORKERS})."
            )

        # validates matching, boosting and ordering settings
        self.match_config()
        self.boost_config()
        self.ordering_options()

    @staticmethod
    def load_speed_range(json: str) -> tuple[float, float]:
        """
        Loads a speed range from a JSON-array `[min, max]` (meters per
        second).
        """
        speed_range = loads(json)
        if (
            not isinstance(speed_range, list)
            or len(speed_range) != 2
            or not all(isinstance(v, (int, float)) for v in speed_range)
        ):
            raise ValueError(
                f"Bad speed range '{json}' (expected array '[min, max]')."
            )
        if not 0 < speed_range[0] <= speed_range[1]:
            raise ValueError(
                f"Bad speed range '{json}' (expected 0 < min <= max)."
            )
        return float(speed_range[0]), float(speed_range[1])

    def match_config(self, **kwargs) -> MatchConfig:
        """
        Returns a `MatchConfig` with defaults from this configuration;
        `kwargs` override individual settings.
        """
        return MatchConfig(
            **(
                {
                    "lambda_": self.MATCH_LAMBDA,
                    "radius": self.MATCH_RADIUS,
                    "extra_candidates": self.MATCH_EXTRA_CANDIDATES,
                    "max_candidates": self.MATCH_MAX_CANDIDATES,
                    "radius_growth_cap": self.MATCH_RADIUS_GROWTH_CAP,
                    "deduplication_distance": (
                        self.MATCH_DEDUPLICATION_DISTANCE
                    ),
                }
                | kwargs
            )
        )

    def boost_config(self, **kwargs) -> BoostConfig:
        """
        Returns a `BoostConfig` with defaults from this configuration;
        `kwargs` override individual settings.
        """
        return BoostConfig(
            **(
                {
                    "subsamples": self.BOOST_SUBSAMPLES,
                    "inclusion_probability": self.BOOST_INCLUSION_PROBABILITY,
                    "base_method": OrderingMethod.ITERATIVE,
                    "restarts": self.BOOST_RESTARTS,
                }
                | kwargs
            )
        )

    def ordering_options(self, **kwargs) -> OrderingOptions:
        """
        Returns `OrderingOptions` with defaults from this configuration;
        `kwargs` override individual settings.
        """
        return OrderingOptions(
            **(
                {
                    "max_rounds": self.ITERATIVE_MAX_ROUNDS,
                    "scale_rule": self.scale_rule,
                    "scale": self.LAPLACIAN_SCALE,
                }
                | kwargs
            )
        )

    def network_options(self) -> dict:
        """
        Returns the keyword arguments for constructing or loading a
        `RoadNetwork` (snap tolerance and quad-tree settings).
        """
        return {
            "snap_tolerance": self.SNAP_TOLERANCE,
            "index_capacity": self.QUADTREE_CAPACITY,
            "index_max_depth": self.QUADTREE_MAX_DEPTH,
        }
