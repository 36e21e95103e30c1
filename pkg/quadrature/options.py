from dataclasses import dataclass

from toricvol.config import ComputationConfig


@dataclass(frozen=True)
class QuadratureOptions:
    """
    Tolerances and limits for the adaptive rules. Whole-space integrals start
    on the box of half-width initial_radius and double it until the added
    shell is below tolerance or max_radius is passed.
    """
    rel_tolerance: float = 1e-6
    abs_tolerance: float = 1e-12
    order: int = 16
    max_depth: int = 12
    initial_radius: float = 8.0
    max_radius: float = 1024.0
    sign_refinement_depth: int = 6

    def __post_init__(self):
        if self.rel_tolerance <= 0 or self.abs_tolerance < 0:
            raise ValueError("Quadrature tolerance must be positive")
        if self.order < 1 or self.max_depth < 0:
            raise ValueError("Quadrature order and depth must be positive")
        if not 0 < self.initial_radius <= self.max_radius:
            raise ValueError("Need 0 < initial_radius <= max_radius")

    @classmethod
    def from_config(cls, **overrides) -> 'QuadratureOptions':
        values = ComputationConfig.section('QUADRATURE')
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**{k: values[k] for k in cls.__dataclass_fields__ if k in values})
