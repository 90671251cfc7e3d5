"""
MatchResult data-model definition
"""

from dataclasses import dataclass, field

from dcm_common.models import DataModel

from .route_path import RoadPoint, RoutePath


@dataclass
class MatchResult(DataModel):
    """
    Result of the regularized single-track matcher.

    Keyword arguments:
    chosen -- matched road point per sample
    path -- concatenation of shortest routes between consecutive
            matched road points
    total_cost -- `data_cost + lambda_ * model_cost`
    data_cost -- sum of squared sample-to-match distances
    model_cost -- sum of squared driving distances between consecutive
                  matches
    lambda_ -- regularization weight the match was computed with
               (default 0.0)
    """

    chosen: list[RoadPoint] = field(default_factory=list)
    path: RoutePath = field(default_factory=RoutePath)
    total_cost: float = 0.0
    data_cost: float = 0.0
    model_cost: float = 0.0
    lambda_: float = 0.0

    @DataModel.serialization_handler("total_cost", "totalCost")
    @classmethod
    def total_cost_serialization_handler(cls, value):
        """Handles `total_cost`-serialization."""
        return value

    @DataModel.deserialization_handler("total_cost", "totalCost")
    @classmethod
    def total_cost_deserialization_handler(cls, value):
        """Handles `total_cost`-deserialization."""
        return value

    @DataModel.serialization_handler("data_cost", "dataCost")
    @classmethod
    def data_cost_serialization_handler(cls, value):
        """Handles `data_cost`-serialization."""
        return value

    @DataModel.deserialization_handler("data_cost", "dataCost")
    @classmethod
    def data_cost_deserialization_handler(cls, value):
        """Handles `data_cost`-deserialization."""
        return value

    @DataModel.serialization_handler("model_cost", "modelCost")
    @classmethod
    def model_cost_serialization_handler(cls, value):
        """Handles `model_cost`-serialization."""
        return value

    @DataModel.deserialization_handler("model_cost", "modelCost")
    @classmethod
    def model_cost_deserialization_handler(cls, value):
        """Handles `model_cost`-deserialization."""
        return value

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
