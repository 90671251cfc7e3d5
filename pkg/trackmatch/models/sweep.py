"""
Data-model definitions for parameter sweeps.
"""

from typing import Optional
from dataclasses import dataclass, field

from dcm_common.models import DataModel

from .match_config import MatchMethod
from .ground_truth import SamplingDistribution


AUTO_LAMBDA = "auto"


@dataclass
class SweepSpec(DataModel):
    """
    Specification of a parameter sweep. A cell is a combination of one
    value from every grid; every cell is evaluated on `routes` routes
    with `instances` generated instances each.

    Keyword arguments:
    sigmas -- grid of noise levels in meters
    taus -- grid of (mean) sampling intervals in seconds
    lambdas -- grid of regularization weights; the value `"auto"`
               selects the weight from estimated noise
    methods -- grid of matching methods
    track_counts -- grid of track counts `s` per route
                    (default [1])
    routes -- number of generated routes
              (default 25)
    instances -- number of instances per route and cell
                 (default 10)
    seed -- base seed
            (default 0)
    trim_fraction -- fraction of results trimmed at both ends when
                     summarizing
                     (default 0.1)
    distribution -- sampling-time distribution
                    (default SamplingDistribution.EXPONENTIAL)
    route_min_length -- lower route-length bound in meters
                        (default 3000.0)
    route_max_length -- upper route-length bound in meters
                        (default 15000.0)
    subsamples -- boosting subsamples `m`
                  (default 10)
    inclusion_probability -- boosting inclusion probability `p`
                             (default 0.5)
    restarts -- aggregation restarts `K`
                (default 100)
    record_runtime -- whether to record runtimes; if `False`, runtimes
                      are written as zero so that reruns reproduce the
                      results file byte by byte
                      (default False)
    """

    sigmas: list[float] = field(default_factory=list)
    taus: list[float] = field(default_factory=list)
    lambdas: list[float | str] = field(default_factory=list)
    methods: list[MatchMethod] = field(default_factory=list)
    track_counts: list[int] = field(default_factory=lambda: [1])
    routes: int = 25
    instances: int = 10
    seed: int = 0
    trim_fraction: float = 0.1
    distribution: SamplingDistribution = SamplingDistribution.EXPONENTIAL
    route_min_length: float = 3000.0
    route_max_length: float = 15000.0
    subsamples: int = 10
    inclusion_probability: float = 0.5
    restarts: int = 100
    record_runtime: bool = False

    def __post_init__(self):
        for name in ("sigmas", "taus", "lambdas", "methods", "track_counts"):
            if not getattr(self, name):
                raise ValueError(f"Sweep grid '{name}' must not be empty.")
        for lambda_ in self.lambdas:
            if isinstance(lambda_, str) and lambda_ != AUTO_LAMBDA:
                raise ValueError(
                    f"Unknown regularization weight '{lambda_}'."
                )
        if not 0 <= self.trim_fraction < 0.5:
            raise ValueError(
                "Trim fraction must be in [0, 0.5) (got "
                + f"{self.trim_fraction})."
            )
        if self.routes < 1 or self.instances < 1:
            raise ValueError(
                "Number of routes and instances must be positive (got "
                + f"{self.routes} and {self.instances})."
            )
        if min(self.track_counts) < 1:
            raise ValueError("Track counts must be positive.")

    @DataModel.serialization_handler("lambdas")
    @classmethod
    def lambdas_serialization_handler(cls, value):
        """Handles `lambdas`-serialization."""
        return list(value)

    @DataModel.deserialization_handler("lambdas")
    @classmethod
    def lambdas_deserialization_handler(cls, value):
        """Handles `lambdas`-deserialization."""
        if value is None:
            DataModel.skip()
        return [v if isinstance(v, str) else float(v) for v in value]

    @DataModel.serialization_handler("methods")
    @classmethod
    def methods_serialization_handler(cls, value):
        """Handles `methods`-serialization."""
        return [method.value for method in value]

    @DataModel.deserialization_handler("methods")
    @classmethod
    def methods_deserialization_handler(cls, value):
        """Handles `methods`-deserialization."""
        if value is None:
            DataModel.skip()
        return [MatchMethod(method) for method in value]

    @DataModel.serialization_handler("track_counts", "trackCounts")
    @classmethod
    def track_counts_serialization_handler(cls, value):
        """Handles `track_counts`-serialization."""
        return value

    @DataModel.deserialization_handler("track_counts", "trackCounts")
    @classmethod
    def track_counts_deserialization_handler(cls, value):
        """Handles `track_counts`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("trim_fraction", "trimFraction")
    @classmethod
    def trim_fraction_serialization_handler(cls, value):
        """Handles `trim_fraction`-serialization."""
        return value

    @DataModel.deserialization_handler("trim_fraction", "trimFraction")
    @classmethod
    def trim_fraction_deserialization_handler(cls, value):
        """Handles `trim_fraction`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("distribution")
    @classmethod
    def distribution_serialization_handler(cls, value):
        """Handles `distribution`-serialization."""
        return value.value

    @DataModel.deserialization_handler("distribution")
    @classmethod
    def distribution_deserialization_handler(cls, value):
        """Handles `distribution`-deserialization."""
        if value is None:
            DataModel.skip()
        return SamplingDistribution(value)

    @DataModel.serialization_handler("route_min_length", "routeMinLength")
    @classmethod
    def route_min_length_serialization_handler(cls, value):
        """Handles `route_min_length`-serialization."""
        return value

    @DataModel.deserialization_handler("route_min_length", "routeMinLength")
    @classmethod
    def route_min_length_deserialization_handler(cls, value):
        """Handles `route_min_length`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("route_max_length", "routeMaxLength")
    @classmethod
    def route_max_length_serialization_handler(cls, value):
        """Handles `route_max_length`-serialization."""
        return value

    @DataModel.deserialization_handler("route_max_length", "routeMaxLength")
    @classmethod
    def route_max_length_deserialization_handler(cls, value):
        """Handles `route_max_length`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler(
        "inclusion_probability", "inclusionProbability"
    )
    @classmethod
    def inclusion_probability_serialization_handler(cls, value):
        """Handles `inclusion_probability`-serialization."""
        return value

    @DataModel.deserialization_handler(
        "inclusion_probability", "inclusionProbability"
    )
    @classmethod
    def inclusion_probability_deserialization_handler(cls, value):
        """Handles `inclusion_probability`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("record_runtime", "recordRuntime")
    @classmethod
    def record_runtime_serialization_handler(cls, value):
        """Handles `record_runtime`-serialization."""
        return value

    @DataModel.deserialization_handler("record_runtime", "recordRuntime")
    @classmethod
    def record_runtime_deserialization_handler(cls, value):
        """Handles `record_runtime`-deserialization."""
        if value is None:
            DataModel.skip()
        return value


@dataclass
class ResultRow(DataModel):
    """
    Single measurement of a sweep.

    Keyword arguments:
    sigma -- noise level in meters
    tau -- (mean) sampling interval in seconds
    lambda_ -- regularization weight (or `"auto"`)
    method -- matching method identifier
    s -- number of tracks
    route -- route index
    instance -- instance index
    similarity -- similarity of the match to the ground truth (NaN for
                  failed runs)
    runtime_ms -- runtime in milliseconds
    error -- error code of failed runs
             (default None)
    """

    sigma: float
    tau: float
    lambda_: float | str
    method: str
    s: int
    route: int
    instance: int
    similarity: float
    runtime_ms: float
    error: Optional[str] = None

    @property
    def key(self) -> tuple:
        """Returns the identity of this row within a sweep."""
        return (
            float(self.sigma),
            float(self.tau),
            (
                self.lambda_
                if isinstance(self.lambda_, str)
                else float(self.lambda_)
            ),
            self.method,
            int(self.s),
            int(self.route),
            int(self.instance),
        )

    @DataModel.serialization_handler("lambda_", "lambda")
    @classmethod
    def lambda__serialization_handler(cls, value):
        """Handles `lambda_`-serialization."""
        return value

    @DataModel.deserialization_handler("lambda_", "lambda")
    @classmethod
    def lambda__deserialization_handler(cls, value):
        """Handles `lambda_`-deserialization."""
        return value

    @DataModel.serialization_handler("runtime_ms", "runtimeMs")
    @classmethod
    def runtime_ms_serialization_handler(cls, value):
        """Handles `runtime_ms`-serialization."""
        return value

    @DataModel.deserialization_handler("runtime_ms", "runtimeMs")
    @classmethod
    def runtime_ms_deserialization_handler(cls, value):
        """Handles `runtime_ms`-deserialization."""
        return value

    @DataModel.serialization_handler("error")
    @classmethod
    def error_serialization_handler(cls, value):
        """Handles `error`-serialization."""
        if value is None:
            DataModel.skip()
        return value
