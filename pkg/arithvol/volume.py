"""
Arithmetic volume (d+1)! * integral over Theta of g_check, with the
closed forms used as oracles.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from conjugate.options import ConjugateOptions
from lattice_core.polytope import LatticePolytope, lattice_points
from metric_models.metrics import MetricModel
from quadrature.options import QuadratureOptions
from quadrature.volume import positive_part_integral
from toricvol.exceptions import NotSmooth

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VolumeResult:
    value: float
    error: float
    converged: bool = True
    # smooth metrics without a positive curvature form only bound the volume from below
    is_lower_bound: bool = False
    method: str = 'quadrature'


def _check_metric(m: MetricModel) -> bool:
    if m.constant_conjugate() is not None:
        return False
    if m.canonical_split() is None:
        raise NotSmooth(f"No volume formula for the non-smooth metric {m.describe()}")
    return not m.strictly_positive


def arithmetic_volume_result(m: MetricModel, opts: Optional[QuadratureOptions] = None,
                             conjugate_opts: Optional[ConjugateOptions] = None) -> VolumeResult:
    lower_only = _check_metric(m)
    integral = positive_part_integral(m, opts, conjugate_opts)
    scale = math.factorial(m.dimension + 1)
    method = 'exact' if integral.evaluations == 0 else 'quadrature'
    if not integral.converged:
        logger.warning("Volume of %s did not meet the quadrature tolerance", m.describe())
    if lower_only:
        logger.info("%s is not strictly positive; its volume integral is a lower bound", m.describe())
    return VolumeResult(scale * integral.value, scale * integral.error, integral.converged, lower_only, method)


def arithmetic_volume(m: MetricModel, opts: Optional[QuadratureOptions] = None,
                      conjugate_opts: Optional[ConjugateOptions] = None) -> float:
    return arithmetic_volume_result(m, opts, conjugate_opts).value


def projective_space_volume(d: int) -> Fraction:
    """Volume of P^d with the Fubini-Study metric: (d+1)/2 * (H_{d+1} - 1)."""
    harmonic = sum(Fraction(1, k) for k in range(1, d + 2))
    return Fraction(d + 1, 2) * (harmonic - 1)


def sharpened_volume_closed_form(d: int, k: int) -> Fraction:
    """The sharpened metric has conjugate g_check / k, so its volume is divided by k."""
    if k < 1:
        raise ValueError("Sharpening factor must be a positive integer")
    return projective_space_volume(d) / k


def canonical_small_section_count(polytope: LatticePolytope, l: int) -> int:
    """Small sections of lD for the canonical metric are 0 and the +-chi^e, e in l*Delta."""
    return 2 * len(lattice_points(polytope, l)) + 1
