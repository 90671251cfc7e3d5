"""
Configuration data-model definitions for single- and multi-track
matching.
"""

from typing import Optional
from dataclasses import dataclass
from enum import Enum

from dcm_common.models import DataModel


class OrderingMethod(Enum):
    """Base methods for ordering pooled samples of multiple tracks."""

    ITERATIVE = "iterative"
    LAPLACIAN = "laplacian"


class MatchMethod(Enum):
    """Methods for matching tracks in experiments and on the CLI."""

    SINGLE = "single"
    ITERATIVE = "iterative"
    LAPLACIAN = "laplacian"
    ITERATIVE_BOOSTED = "iterative_boosted"
    LAPLACIAN_BOOSTED = "laplacian_boosted"

    @property
    def base_method(self) -> Optional[OrderingMethod]:
        """
        Returns the ordering method of a multi-track method (`None` for
        `SINGLE`).
        """
        if self is MatchMethod.SINGLE:
            return None
        return OrderingMethod(self.value.removesuffix("_boosted"))

    @property
    def boosted(self) -> bool:
        """Returns `True` for boosted multi-track methods."""
        return self.value.endswith("_boosted")


class ScaleRule(Enum):
    """Weighting rules for the graph Laplacian."""

    MEDIAN = "median"
    INVERSE = "inverse"
    FIXED = "fixed"


class DistanceMode(Enum):
    """Distances used for Laplacian ordering."""

    PATH = "path"
    EUCLIDEAN = "euclidean"


@dataclass
class MatchConfig(DataModel):
    """
    Configuration of the regularized single-track matcher.

    Keyword arguments:
    lambda_ -- regularization weight of the squared driving distances
               (default 1.0)
    radius -- candidate search radius in meters
              (default 200.0)
    extra_candidates -- number of evenly spaced extra candidates per
                        edge
                        (default 3)
    max_candidates -- maximum number of candidates per sample (by data
                      cost)
                      (default 40)
    radius_growth_cap -- number of times the search radius is doubled if
                         no candidate is found
                         (default 2)
    deduplication_distance -- candidates closer than this distance (in
                              meters) are merged
                              (default 1.0)
    """

    lambda_: float = 1.0
    radius: float = 200.0
    extra_candidates: int = 3
    max_candidates: int = 40
    radius_growth_cap: int = 2
    deduplication_distance: float = 1.0

    def __post_init__(self):
        if self.lambda_ < 0:
            raise ValueError(
                f"Regularization weight must be nonnegative (got {self.lambda_})."
            )
        if self.radius <= 0:
            raise ValueError(
                f"Search radius must be positive (got {self.radius})."
            )
        if self.extra_candidates < 0:
            raise ValueError(
                "Number of extra candidates must be nonnegative (got "
                + f"{self.extra_candidates})."
            )
        if self.max_candidates < 1:
            raise ValueError(
                "Maximum number of candidates must be positive (got "
                + f"{self.max_candidates})."
            )
        if self.radius_growth_cap < 0:
            raise ValueError(
                "Radius growth cap must be nonnegative (got "
                + f"{self.radius_growth_cap})."
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
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("extra_candidates", "extraCandidates")
    @classmethod
    def extra_candidates_serialization_handler(cls, value):
        """Handles `extra_candidates`-serialization."""
        return value

    @DataModel.deserialization_handler("extra_candidates", "extraCandidates")
    @classmethod
    def extra_candidates_deserialization_handler(cls, value):
        """Handles `extra_candidates`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("max_candidates", "maxCandidates")
    @classmethod
    def max_candidates_serialization_handler(cls, value):
        """Handles `max_candidates`-serialization."""
        return value

    @DataModel.deserialization_handler("max_candidates", "maxCandidates")
    @classmethod
    def max_candidates_deserialization_handler(cls, value):
        """Handles `max_candidates`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler("radius_growth_cap", "radiusGrowthCap")
    @classmethod
    def radius_growth_cap_serialization_handler(cls, value):
        """Handles `radius_growth_cap`-serialization."""
        return value

    @DataModel.deserialization_handler(
        "radius_growth_cap", "radiusGrowthCap"
    )
    @classmethod
    def radius_growth_cap_deserialization_handler(cls, value):
        """Handles `radius_growth_cap`-deserialization."""
        if value is None:
            DataModel.skip()
        return value

    @DataModel.serialization_handler(
        "deduplication_distance", "deduplicationDistance"
    )
    @classmethod
    def deduplication_distance_serialization_handler(cls, value):
        """Handles `deduplication_distance`-serialization."""
        return value

    @DataModel.deserialization_handler(
        "deduplication_distance", "deduplicationDistance"
    )
    @classmethod
    def deduplication_distance_deserialization_handler(cls, value):
        """Handles `deduplication_distance`-deserialization."""
        if value is None:
            DataModel.skip()
        return value


@dataclass
class BoostConfig(DataModel):
    """
    Configuration of the boosting process (subsample, order, aggregate).

    Keyword arguments:
    subsamples -- number of Bernoulli subsamples `m`
                  (default 10)
    inclusion_probability -- probability `p` of keeping a sample
                             (default 0.5)
    base_method -- ordering method applied to every subsample
                   (default OrderingMethod.ITERATIVE)
    restarts -- number of local-search restarts `K` in aggregation
                (default 100)
    seed -- seed of the subsampling and restart generator
            (default 0)
    """

    subsamples: int = 10
    inclusion_probability: float = 0.5
    base_method: OrderingMethod = OrderingMethod.ITERATIVE
    restarts: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.subsamples < 1:
            raise ValueError(
                f"Number of subsamples must be positive (got {self.subsamples})."
            )
        if not 0 < self.inclusion_probability <= 1:
            raise ValueError(
                "Inclusion probability must be in (0, 1] (got "
                + f"{self.inclusion_probability})."
            )
        if self.restarts < 1:
            raise ValueError(
                f"Number of restarts must be positive (got {self.restarts})."
            )

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

    @DataModel.serialization_handler("base_method", "baseMethod")
    @classmethod
    def base_method_serialization_handler(cls, value):
        """Handles `base_method`-serialization."""
        return value.value

    @DataModel.deserialization_handler("base_method", "baseMethod")
    @classmethod
    def base_method_deserialization_handler(cls, value):
        """Handles `base_method`-deserialization."""
        if value is None:
            DataModel.skip()
        return OrderingMethod(value)
