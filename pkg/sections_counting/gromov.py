"""
Comparison of sup and L2 norms of monomial sections:
||s||_sup <= C sqrt(l) ||s||_L2 on the l-th power.
"""
import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from conjugate.options import ConjugateOptions
from metric_models.metrics import MetricModel
from quadrature.monge_ampere import MAMeasure
from quadrature.options import QuadratureOptions

from .options import CountingOptions
from .sections import build_section_space

logger = logging.getLogger(__name__)


def _interior_mask(m: MetricModel, basis, l: int) -> np.ndarray:
    """e/l strictly inside the reference polytope."""
    inequalities = m.reference_polytope.inequalities
    return np.array([all(sum(c * ui for c, ui in zip(e, u)) > b * l for u, b in inequalities) for e in basis])


def gromov_ratio_table(m: MetricModel, l_max: int, opts: Optional[CountingOptions] = None,
                       conjugate_opts: Optional[ConjugateOptions] = None,
                       quad_opts: Optional[QuadratureOptions] = None,
                       interior_only: bool = False) -> pd.DataFrame:
    """
    Columns l, max_ratio, argmax, ratio_over_sqrt_l where max_ratio is the
    largest ||chi^e||_sup / ||chi^e||_L2 over the monomials of level l.
    With interior_only the maximum skips monomials on the boundary of l*Delta,
    and levels without interior monomials have no row.
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    # fail before any conjugate work if the metric has no L2 structure
    MAMeasure(m)

    rows = []
    for l in range(1, l_max + 1):
        space = build_section_space(m, l, opts, conjugate_opts, quad_opts)
        usable = ~space.bound_mask
        if interior_only:
            usable &= _interior_mask(m, space.basis, l)
        if not np.any(usable):
            logger.warning("Level %s has no eligible monomial with a computed L2 norm", l)
            continue
        log_ratio = np.where(usable, space.log_sup_norms - 0.5 * space.log_l2_diag, -np.inf)
        best = int(np.argmax(log_ratio))
        ratio = math.exp(log_ratio[best])
        rows.append({
            'l': l,
            'max_ratio': ratio,
            'argmax': ' '.join(str(c) for c in space.basis[best]),
            'ratio_over_sqrt_l': ratio / math.sqrt(l),
        })
    return pd.DataFrame(rows, columns=['l', 'max_ratio', 'argmax', 'ratio_over_sqrt_l'])


def gromov_constant(table: pd.DataFrame) -> float:
    """Smallest C with max_ratio <= C sqrt(l) on every row of the table."""
    if table.empty:
        return math.nan
    return float(table['ratio_over_sqrt_l'].max())
