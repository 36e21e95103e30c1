from dataclasses import dataclass

from toricvol.config import ComputationConfig


@dataclass(frozen=True)
class ConjugateOptions:
    residual_tolerance: float = 1e-9
    value_tolerance: float = 1e-8
    max_iterations: int = 200
    divergence_radius: float = 1e3
    max_condition: float = 1e12
    armijo_c1: float = 1e-4
    max_backtracks: int = 60
    boundary_tolerance: float = 1e-12

    def __post_init__(self):
        if self.residual_tolerance <= 0 or self.value_tolerance <= 0:
            raise ValueError("Conjugate tolerances must be positive")
        if not 0 < self.armijo_c1 < 1:
            raise ValueError("Armijo constant must lie in (0, 1)")

    @classmethod
    def from_config(cls, **overrides) -> 'ConjugateOptions':
        values = ComputationConfig.section('CONJUGATE')
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**{k: values[k] for k in cls.__dataclass_fields__ if k in values})
