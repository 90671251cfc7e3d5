"""
Track data-model definition
"""

from dataclasses import dataclass, field

from dcm_common.models import DataModel


@dataclass
class Sample(DataModel):
    """
    Single time-stamped location measurement.

    Keyword arguments:
    t -- timestamp in seconds
    x -- planar east-coordinate in meters
    y -- planar north-coordinate in meters
    """

    t: float
    x: float
    y: float


@dataclass
class Track(DataModel):
    """
    Time-ordered sequence of noisy location samples.

    Keyword arguments:
    samples -- samples ordered by strictly increasing timestamps
               (default [])
    """

    samples: list[Sample] = field(default_factory=list)

    def validate(self) -> None:
        """
        Raises `ValueError` if this track is empty or its timestamps
        are not strictly increasing.
        """
        if not self.samples:
            raise ValueError("Track contains no samples.")
        for previous, sample in zip(self.samples, self.samples[1:]):
            if sample.t <= previous.t:
                raise ValueError(
                    "Track timestamps are not strictly increasing "
                    + f"({previous.t} followed by {sample.t})."
                )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def xy(self) -> list[tuple[float, float]]:
        """Returns the sample locations as `(x, y)`-pairs."""
        return [(sample.x, sample.y) for sample in self.samples]
