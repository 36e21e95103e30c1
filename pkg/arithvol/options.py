from dataclasses import dataclass

from toricvol.config import ComputationConfig


@dataclass(frozen=True)
class MahlerOptions:
    """
    Trapezoid refinement starts at initial_points nodes per circle and
    doubles up to max_points_1d (one variable) or max_points_nd per axis.
    """
    tolerance: float = 1e-8
    initial_points: int = 64
    max_points_1d: int = 2 ** 20
    max_points_nd: int = 2 ** 10

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("Mahler tolerance must be positive")
        if not 2 <= self.initial_points <= min(self.max_points_1d, self.max_points_nd):
            raise ValueError("Need 2 <= initial_points <= max points")

    @classmethod
    def from_config(cls, **overrides) -> 'MahlerOptions':
        values = ComputationConfig.section('MAHLER')
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**{k: values[k] for k in cls.__dataclass_fields__ if k in values})


def positivity_tolerance() -> float:
    return float(ComputationConfig.get('POSITIVITY.tolerance', 1e-9))
