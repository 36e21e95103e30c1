"""
The normalized Monge-Ampere measure det(-Hess g) du / vol(polytope) on R^d
and the L2 norms of monomial sections it defines.

In logarithmic coordinates z = exp(-u + i theta) one has
|chi^e(z)|^2 ||s||^{2l} = exp(-2(<e,u> - l g(u))), so the Gram matrix of the
monomials is diagonal with entries

    a_e = integral of exp(-2(<e,u> - l g(u))) dMA(u).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from conjugate.solver import conjugate_eval
from lattice_core.polytope import polytope_volume
from metric_models.metrics import MetricModel
from toricvol.exceptions import NoConvergence, NotSmooth

from .options import QuadratureOptions
from .rules import QuadratureResult, integrate_whole_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class L2Norm:
    """a_e with its logarithm; is_bound marks the upper bound exp(-2l g_check(e/l))."""
    value: float
    log_value: float
    is_bound: bool = False


class MAMeasure:
    """Normalized Monge-Ampere measure of a smooth strictly positive metric."""

    def __init__(self, metric: MetricModel):
        if not (metric.smooth and metric.strictly_positive):
            raise NotSmooth(f"Monge-Ampere measure of {metric.describe()} is degenerate")
        self.metric = metric
        self.normalization = float(polytope_volume(metric.reference_polytope))

    def density(self, u) -> np.ndarray:
        hess = np.atleast_3d(-self.metric.hessian(np.atleast_2d(u)))
        return np.linalg.det(hess) / self.normalization

    def integrate(self, f: Callable[[np.ndarray], np.ndarray],
                  opts: Optional[QuadratureOptions] = None,
                  center: Optional[Sequence[float]] = None,
                  initial_radius: Optional[float] = None) -> QuadratureResult:
        opts = opts or QuadratureOptions.from_config()

        def integrand(U):
            return np.asarray(f(U), dtype=float) * self.density(U)

        return integrate_whole_space(integrand, self.metric.dimension, opts, center, initial_radius)

    def total_mass(self, opts: Optional[QuadratureOptions] = None) -> float:
        return self.integrate(lambda U: np.ones(len(U)), opts).value


def integrate_ma(m: MetricModel, f: Callable[[np.ndarray], np.ndarray],
                 opts: Optional[QuadratureOptions] = None) -> float:
    """Integral of f against the normalized Monge-Ampere measure of m."""
    result = MAMeasure(m).integrate(f, opts)
    if not result.converged:
        raise NoConvergence(
            "Monge-Ampere integral did not settle before the maximal radius",
            {'value': result.value, 'radius': result.radius, 'error': result.error},
        )
    return result.value


def _level_radius(opts: QuadratureOptions, l: int) -> float:
    # the integrand concentrates on a ball of radius ~ 1/sqrt(l)
    return max(opts.initial_radius / math.sqrt(l), 0.5)


def l2_norm_squared_monomial(m: MetricModel, e: Sequence[int], l: int,
                             opts: Optional[QuadratureOptions] = None) -> L2Norm:
    """
    a_e for the l-th power metric. The integrand is divided by its supremum
    exp(-2l g_check(e/l)) before integration so large l cannot underflow.
    """
    opts = opts or QuadratureOptions.from_config()
    measure = MAMeasure(m)
    if int(l) != l or l < 1:
        raise ValueError("Level l must be a positive integer")
    x = tuple(Fraction(int(c), int(l)) for c in e)
    conjugate = conjugate_eval(m, x)
    log_bound = -2.0 * l * conjugate.value
    xf = np.array([float(c) for c in x])

    def scaled(U):
        exponent = -2.0 * l * (U @ xf - m.evaluate(U) - conjugate.value)
        return np.exp(np.minimum(exponent, 0.0))

    result = measure.integrate(scaled, opts, center=conjugate.minimizer,
                               initial_radius=_level_radius(opts, l))
    if not result.converged or result.value <= 0:
        logger.warning("L2 norm of chi^%s at level %s reported as its upper bound", tuple(e), l)
        return L2Norm(math.exp(log_bound), log_bound, is_bound=True)
    log_value = log_bound + math.log(result.value)
    return L2Norm(math.exp(log_value), log_value)


def cross_inner_product(m: MetricModel, e: Sequence[int], f: Sequence[int], l: int,
                        opts: Optional[QuadratureOptions] = None, angles: int = 64) -> complex:
    """
    <chi^e, chi^f> with the angular average over the compact torus done by
    the trapezoid rule on `angles` points per circle.
    """
    opts = opts or QuadratureOptions.from_config()
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    d = m.dimension

    theta = 2.0 * np.pi * np.arange(angles) / angles
    grid = np.stack([g.ravel() for g in np.meshgrid(*([theta] * d), indexing='ij')], axis=1)
    angular = complex(np.mean(np.exp(1j * (grid @ (e - f)))))

    radial = integrate_ma(m, lambda U: np.exp(-(U @ (e + f)) + 2.0 * l * m.evaluate(U)), opts)
    return angular * radial


def fubini_study_l2_closed_form(e: Sequence[int], l: int, d: int, sharpening: int = 1) -> L2Norm:
    """
    a_e = d! * e_0! * e_1! ... e_d! / (l + d)! for the Fubini-Study metric of
    P^d, with e_0 = l - |e|. The metric sharpened by k rescales u by k, which
    divides every exponent by k inside the Dirichlet integral.
    """
    e0 = l - sum(e)
    if e0 < 0 or any(c < 0 for c in e) or len(e) != d:
        raise ValueError(f"{tuple(e)} is not a lattice point of the dilate {l} of the simplex")
    k = float(sharpening)
    log_value = float(gammaln(d + 1) + gammaln(e0 / k + 1) + sum(gammaln(c / k + 1) for c in e)
                      - gammaln(l / k + d + 1))
    return L2Norm(math.exp(log_value), log_value)
