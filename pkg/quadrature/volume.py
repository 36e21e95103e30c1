"""
(d+1)! times the integral of max(g_check, 0) over the polytope, which is
the integral of g_check over Theta.
"""
import logging
import math
from typing import Optional

import numpy as np

from conjugate.options import ConjugateOptions
from conjugate.solver import conjugate_batch
from lattice_core.polytope import polytope_volume, triangulate
from metric_models.metrics import MetricModel

from .options import QuadratureOptions
from .rules import QuadratureResult, integrate_simplex

logger = logging.getLogger(__name__)


def positive_part_integral(m: MetricModel, opts: Optional[QuadratureOptions] = None,
                           conjugate_opts: Optional[ConjugateOptions] = None,
                           shift: float = 0.0) -> QuadratureResult:
    """
    Integral of max(g_check + shift, 0) over the reference polytope, simplex
    by simplex over the pulling triangulation. Cells where the integrand
    changes sign are refined down to opts.sign_refinement_depth.
    """
    opts = opts or QuadratureOptions.from_config()
    conjugate_opts = conjugate_opts or ConjugateOptions.from_config()
    polytope = m.reference_polytope

    if not polytope.is_full_dimensional:
        logger.info("Polytope %s is not full-dimensional; the volume integral vanishes", polytope)
        return QuadratureResult(0.0, 0.0, 0)

    constant = m.constant_conjugate()
    if constant is not None:
        value = max(constant + shift, 0.0) * float(polytope_volume(polytope))
        return QuadratureResult(value, 0.0, 0)

    def integrand(points):
        return np.maximum(conjugate_batch(m, points, conjugate_opts) + shift, 0.0)

    parts, errors = [], []
    evaluations = 0
    converged = True
    for simplex in triangulate(polytope):
        cell = integrate_simplex(integrand, [[float(c) for c in v] for v in simplex],
                                 opts, kink_depth=opts.sign_refinement_depth)
        parts.append(cell.value)
        errors.append(cell.error)
        evaluations += cell.evaluations
        converged = converged and cell.converged
    result = QuadratureResult(math.fsum(parts), math.fsum(errors), evaluations, converged)
    logger.debug("Positive part integral %.10g (error %.2e, %s conjugates)",
                 result.value, result.error, evaluations)
    return result


def volume_integral(m: MetricModel, opts: Optional[QuadratureOptions] = None,
                    conjugate_opts: Optional[ConjugateOptions] = None) -> float:
    result = positive_part_integral(m, opts, conjugate_opts)
    if not result.converged:
        logger.warning("Volume quadrature hit the maximal depth; error estimate %.2e", result.error)
    return math.factorial(m.dimension + 1) * result.value
