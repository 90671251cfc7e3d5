"""Test module for the `GroundTruth` and related data models."""

import pytest
from dcm_common.models.data_model import get_model_serialization_test

from trackmatch.models import (
    PathSegment,
    RoutePath,
    SamplingDistribution,
    SamplingConfig,
    TruePosition,
    GroundTruth,
)


test_sampling_config_json = get_model_serialization_test(
    SamplingConfig,
    (
        ((10.0, 30.0), {}),
        (
            (0.0, 1.0),
            {"distribution": SamplingDistribution.EXPONENTIAL, "seed": 2},
        ),
    ),
)


test_true_position_json = get_model_serialization_test(
    TruePosition,
    (((5.0, 10.0, 20.0, 35.0), {}),),
)


test_ground_truth_json = get_model_serialization_test(
    GroundTruth,
    (
        ((), {}),
        (
            (
                RoutePath.from_segments(
                    [PathSegment(0, 0.0, 100.0), PathSegment(1, 0.0, 50.0)]
                ),
                [10.0, 12.0],
                [TruePosition(5.0, 50.0, 0.0, 50.0)],
            ),
            {},
        ),
    ),
)


@pytest.mark.parametrize(
    ("sigma", "tau"),
    [(-1.0, 1.0), (1.0, 0.0)],
    ids=["negative-sigma", "zero-tau"],
)
def test_sampling_config_invalid(sigma, tau):
    """Test validation of `SamplingConfig`."""
    with pytest.raises(ValueError) as exc_info:
        SamplingConfig(sigma, tau)
    print(exc_info.value)
