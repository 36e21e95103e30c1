from dataclasses import dataclass

from toricvol.config import ComputationConfig


@dataclass(frozen=True)
class CountingOptions:
    """
    budget caps the nodes of one exact enumeration. theta_tolerance is the
    slack under which g_check(e/l) still counts as nonnegative.
    use_closed_form lets Fubini-Study section spaces skip quadrature.
    """
    budget: int = 10_000_000
    theta_tolerance: float = 1e-9
    use_closed_form: bool = True

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("Counting budget must be positive")
        if self.theta_tolerance < 0:
            raise ValueError("Theta tolerance cannot be negative")

    @classmethod
    def from_config(cls, **overrides) -> 'CountingOptions':
        values = ComputationConfig.section('COUNTING')
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**{k: values[k] for k in cls.__dataclass_fields__ if k in values})
