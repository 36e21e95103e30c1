"""
Empirical checks of the volume formula: log-counts of small sections in
the L2 ellipsoids at growing levels, and volumes along a sequence of
metrics converging uniformly to a limit.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, List, Optional

import pandas as pd

from conjugate.options import ConjugateOptions
from metric_models.metrics import MetricModel, sup_distance
from quadrature.options import QuadratureOptions
from sections_counting.ellipsoid import CountMethod
from sections_counting.options import CountingOptions
from sections_counting.sections import build_section_space, count_small_sections
from toricvol.config import ComputationConfig
from toricvol.exceptions import NotSmooth

from .volume import arithmetic_volume, canonical_small_section_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceRow:
    l: int
    monomials: int
    exact: Optional[int]
    log_lower: float
    log_upper: float
    lower_estimate: float
    upper_estimate: float
    formula: float
    method: str = CountMethod.SANDWICH

    @property
    def width(self) -> float:
        return self.upper_estimate - self.lower_estimate

    def brackets(self, slack: float = 0.0) -> bool:
        return self.lower_estimate - slack <= self.formula <= self.upper_estimate + slack


def _normalizer(dimension: int, l: int) -> float:
    return math.factorial(dimension + 1) / float(l) ** (dimension + 1)


def _is_canonical(m: MetricModel) -> bool:
    return not m.smooth and m.constant_conjugate() == 0.0


def volume_convergence_experiment(m: MetricModel, l_list: Iterable[int],
                                  opts: Optional[CountingOptions] = None,
                                  quad_opts: Optional[QuadratureOptions] = None,
                                  conjugate_opts: Optional[ConjugateOptions] = None) -> List[ConvergenceRow]:
    """
    (d+1)! log Card / l^(d+1) at each level, bracketed by the ellipsoid box
    bounds, next to the formula value. Canonical metrics have no L2 measure
    and are counted as +-monomials instead.
    """
    opts = opts or CountingOptions.from_config()
    if not _is_canonical(m) and not (m.smooth and m.strictly_positive):
        raise NotSmooth(f"Counting {m.describe()} needs a Monge-Ampere measure")
    formula = arithmetic_volume(m, quad_opts, conjugate_opts)
    rows = []
    for l in sorted(set(int(l) for l in l_list)):
        scale = _normalizer(m.dimension, l)
        if _is_canonical(m):
            count = canonical_small_section_count(m.reference_polytope, l)
            log_count = math.log(count)
            rows.append(ConvergenceRow(l, count // 2, count, log_count, log_count,
                                       scale * log_count, scale * log_count, formula, CountMethod.CANONICAL))
            continue

        space = build_section_space(m, l, opts, conjugate_opts, quad_opts)
        result = count_small_sections(space, opts.budget)
        row = ConvergenceRow(
            l=l,
            monomials=len(space),
            exact=result.exact,
            log_lower=result.log_lower,
            log_upper=result.log_upper,
            lower_estimate=scale * result.log_lower,
            upper_estimate=scale * result.log_upper,
            formula=formula,
            method=result.method,
        )
        logger.info("Level %s: normalized bracket [%.6f, %.6f] against %.6f",
                    l, row.lower_estimate, row.upper_estimate, formula)
        rows.append(row)
    return rows


def convergence_frame(rows: List[ConvergenceRow]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(row) for row in rows])
    if not frame.empty:
        frame['method'] = frame['method'].astype(str)
    return frame


def metric_sequence_experiment(family: Callable[[int], MetricModel], limit: MetricModel,
                               k_list: Iterable[int],
                               quad_opts: Optional[QuadratureOptions] = None,
                               conjugate_opts: Optional[ConjugateOptions] = None,
                               seed: Optional[int] = None) -> pd.DataFrame:
    """
    Columns k, sup_distance, volume, limit_volume: the sampled uniform
    distance from m_k to the limit and the two volumes.
    """
    sampling = ComputationConfig.section('SAMPLING')
    seed = sampling['seed'] if seed is None else seed
    limit_volume = arithmetic_volume(limit, quad_opts, conjugate_opts)
    rows = []
    for k in k_list:
        member = family(k)
        rows.append({
            'k': k,
            'sup_distance': sup_distance(member, limit, sampling['radius'], sampling['samples'], seed),
            'volume': arithmetic_volume(member, quad_opts, conjugate_opts),
            'limit_volume': limit_volume,
        })
        logger.info("Sequence member k=%s: volume %.8f", k, rows[-1]['volume'])
    return pd.DataFrame(rows, columns=['k', 'sup_distance', 'volume', 'limit_volume'])
