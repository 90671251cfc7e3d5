"""
Data-model definitions for synthetic track generation.
"""

from dataclasses import dataclass, field
from enum import Enum

from dcm_common.models import DataModel

from .route_path import RoutePath


class SamplingDistribution(Enum):
    """Distributions of sampling times."""

    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"


@dataclass
class SamplingConfig(DataModel):
    """
    Configuration of the track generator.

    Keyword arguments:
    sigma -- standard deviation of the per-axis location noise in meters
    tau -- (mean) sampling interval in seconds
    distribution -- sampling-time distribution
                    (default SamplingDistribution.UNIFORM)
    seed -- seed of the generator used if the caller passes none
            (default 0)
    """

    sigma: float
    tau: float
    distribution: SamplingDistribution = SamplingDistribution.UNIFORM
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(
                f"Noise level must be nonnegative (got {self.sigma})."
            )
        if self.tau <= 0:
            raise ValueError(
                f"Sampling interval must be positive (got {self.tau})."
            )

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


@dataclass
class TruePosition(DataModel):
    """
    Noise-free position of a generated sample.

    Keyword arguments:
    t -- timestamp in seconds
    x -- planar east-coordinate in meters
    y -- planar north-coordinate in meters
    arc -- arc offset along the route in meters
    """

    t: float
    x: float
    y: float
    arc: float


@dataclass
class GroundTruth(DataModel):
    """
    Ground truth of a generated track.

    Keyword arguments:
    route -- traveled route
    speeds -- traveled speed per route segment in meters per second
    positions -- noise-free positions of all samples
    """

    route: RoutePath = field(default_factory=RoutePath)
    speeds: list[float] = field(default_factory=list)
    positions: list[TruePosition] = field(default_factory=list)
