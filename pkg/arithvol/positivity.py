"""
Arithmetic positivity of a metrized toric line bundle:

    ample  iff g_check(e) > 0 at every lattice point e of Delta,
    nef    iff g_check(e) >= 0 at every lattice point e of Delta,
    big    iff g(0) < 0, equivalently max g_check > 0.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from conjugate.options import ConjugateOptions
from conjugate.solver import conjugate_eval, conjugate_max
from conjugate.theta import ThetaMembership, classify_value
from lattice_core.linalg import LatticePoint
from lattice_core.polytope import lattice_points
from metric_models.metrics import MetricModel
from toricvol.exceptions import EmptyPolytope

from .options import positivity_tolerance

logger = logging.getLogger(__name__)


@dataclass
class PositivityReport:
    ample: bool
    nef: bool
    big: bool
    origin_value: float
    max_conjugate: float
    lattice_conjugates: Dict[LatticePoint, float] = field(default_factory=dict)
    tolerance: float = 1e-9
    # both bigness criteria are computed; False flags a disagreement
    consistent: bool = True

    @property
    def marginal_points(self) -> List[LatticePoint]:
        return [e for e, value in self.lattice_conjugates.items()
                if classify_value(value, self.tolerance) == ThetaMembership.BOUNDARY]

    @property
    def origin_marginal(self) -> bool:
        return abs(self.origin_value) < self.tolerance

    def to_frame(self) -> pd.DataFrame:
        """One row per lattice point of Delta plus a summary row for g(0)."""
        rows = [{
            'point': ' '.join(str(c) for c in e),
            'value': value,
            'status': classify_value(value, self.tolerance).value,
        } for e, value in self.lattice_conjugates.items()]
        rows.append({
            'point': 'g(0)',
            'value': self.origin_value,
            'status': 'marginal' if self.origin_marginal else ('big' if self.big else 'not big'),
        })
        return pd.DataFrame(rows, columns=['point', 'value', 'status'])

    def summary(self) -> Dict[str, bool]:
        return {'ample': self.ample, 'nef': self.nef, 'big': self.big}


def _max_conjugate(m: MetricModel, values: Dict[LatticePoint, float]) -> float:
    constant = m.constant_conjugate()
    if constant is not None:
        return constant
    if m.canonical_split() is not None:
        # g_check attains its maximum at a supergradient of g at 0; solve there rather than reuse -g(0)
        _, point = conjugate_max(m)
        return conjugate_eval(m, tuple(point.tolist())).value
    return max(values.values())


def classify_positivity(m: MetricModel, tol: Optional[float] = None,
                        conjugate_opts: Optional[ConjugateOptions] = None) -> PositivityReport:
    tol = positivity_tolerance() if tol is None else tol
    conjugate_opts = conjugate_opts or ConjugateOptions.from_config()

    points = lattice_points(m.reference_polytope, 1)
    if not points:
        raise EmptyPolytope(f"{m.reference_polytope} has no lattice points")
    values = {e: conjugate_eval(m, e, conjugate_opts).value for e in points}

    lowest = min(values.values())
    origin_value = float(m.evaluate(np.zeros(m.dimension)))
    max_value = _max_conjugate(m, values)

    big = origin_value < -tol
    big_by_conjugate = max_value > tol
    consistent = big == big_by_conjugate
    if not consistent:
        logger.warning("Bigness criteria disagree for %s: g(0) = %.3e, max g_check = %.3e",
                       m.describe(), origin_value, max_value)

    report = PositivityReport(
        ample=lowest > tol,
        nef=lowest >= -tol,
        big=big,
        origin_value=origin_value,
        max_conjugate=max_value,
        lattice_conjugates=values,
        tolerance=tol,
        consistent=consistent,
    )
    logger.debug("Positivity of %s: %s", m.describe(), report.summary())
    return report
