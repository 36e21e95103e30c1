"""
Monomial bases of H^0(lD) with their sup and L2 norms.

The sections chi^e, e in l*Delta, are orthogonal for any torus-invariant
metric, and

    ||chi^e||_sup = exp(-l g_check(e/l)),
    a_e = ||chi^e||_L2^2 <= exp(-2l g_check(e/l)).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from conjugate.options import ConjugateOptions
from conjugate.solver import conjugate_eval
from lattice_core.linalg import LatticePoint
from lattice_core.polytope import lattice_points
from metric_models.metrics import MetricModel, fubini_study_sharpening
from quadrature.monge_ampere import L2Norm, fubini_study_l2_closed_form, l2_norm_squared_monomial
from quadrature.options import QuadratureOptions
from toricvol.exceptions import BudgetExceeded, NotSmooth

from .ellipsoid import CountMethod, CountResult, count_ellipsoid_bounds_log, count_ellipsoid_exact
from .options import CountingOptions

logger = logging.getLogger(__name__)


@dataclass
class SectionSpace:
    level: int
    basis: Tuple[LatticePoint, ...]
    conjugates: np.ndarray
    l2_diag: Optional[Tuple[L2Norm, ...]] = None

    def __len__(self):
        return len(self.basis)

    @property
    def log_sup_norms(self) -> np.ndarray:
        return -self.level * self.conjugates

    @property
    def sup_norms(self) -> np.ndarray:
        return np.exp(self.log_sup_norms)

    @property
    def has_l2(self) -> bool:
        return self.l2_diag is not None

    @property
    def log_l2_diag(self) -> np.ndarray:
        if self.l2_diag is None:
            raise NotSmooth("Section space was built without L2 norms")
        return np.array([norm.log_value for norm in self.l2_diag])

    @property
    def bound_mask(self) -> np.ndarray:
        if self.l2_diag is None:
            return np.zeros(len(self.basis), dtype=bool)
        return np.array([norm.is_bound for norm in self.l2_diag])

    def to_frame(self, tol: float = 1e-9) -> pd.DataFrame:
        """One row per monomial: l, e, sup_norm, a_e, in_theta."""
        frame = pd.DataFrame({
            'l': self.level,
            'e': [' '.join(str(c) for c in e) for e in self.basis],
            'sup_norm': self.sup_norms,
            'a_e': [n.value for n in self.l2_diag] if self.l2_diag else np.nan,
            'in_theta': self.conjugates >= -tol,
        })
        if self.l2_diag:
            frame['a_e_is_bound'] = self.bound_mask
        return frame


def _conjugates_at_level(m: MetricModel, basis, l: int, opts: ConjugateOptions) -> np.ndarray:
    return np.array([
        conjugate_eval(m, tuple(Fraction(c, l) for c in e), opts).value for e in basis
    ])


def _l2_diagonal(m: MetricModel, basis, l: int, counting: CountingOptions,
                 quad_opts: Optional[QuadratureOptions]) -> Optional[Tuple[L2Norm, ...]]:
    sharpening = fubini_study_sharpening(m) if counting.use_closed_form else None
    if sharpening is not None:
        return tuple(fubini_study_l2_closed_form(e, l, m.dimension, sharpening) for e in basis)
    try:
        return tuple(l2_norm_squared_monomial(m, e, l, quad_opts) for e in basis)
    except NotSmooth:
        logger.info("%s has no Monge-Ampere measure; section space carries sup norms only", m.describe())
        return None


def build_section_space(m: MetricModel, l: int, opts: Optional[CountingOptions] = None,
                        conjugate_opts: Optional[ConjugateOptions] = None,
                        quad_opts: Optional[QuadratureOptions] = None,
                        with_l2: bool = True) -> SectionSpace:
    """
    Basis l*Delta in lexicographic order, sup norms from the conjugate and,
    when the metric has a Monge-Ampere measure, the L2 diagonal.
    """
    if int(l) != l or l < 1:
        raise ValueError("Level l must be a positive integer")
    l = int(l)
    opts = opts or CountingOptions.from_config()
    conjugate_opts = conjugate_opts or ConjugateOptions.from_config()

    basis = tuple(lattice_points(m.reference_polytope, l))
    conjugates = _conjugates_at_level(m, basis, l, conjugate_opts)
    l2_diag = _l2_diagonal(m, basis, l, opts, quad_opts) if with_l2 else None

    logger.debug("Section space of level %s: %s monomials, %s with sup norm <= 1",
                 l, len(basis), int(np.sum(conjugates >= -opts.theta_tolerance)))
    return SectionSpace(level=l, basis=basis, conjugates=conjugates, l2_diag=l2_diag)


def small_section_lattice(m: MetricModel, l: int, tol: Optional[float] = None,
                          conjugate_opts: Optional[ConjugateOptions] = None) -> List[LatticePoint]:
    """Exponents e in l*Delta with g_check(e/l) >= -tol; they span the small sections."""
    if tol is None:
        tol = CountingOptions.from_config().theta_tolerance
    space = build_section_space(m, l, conjugate_opts=conjugate_opts, with_l2=False)
    return [e for e, value in zip(space.basis, space.conjugates) if value >= -tol]


def log_sup_norm_bound_gap(space: SectionSpace) -> float:
    """
    max over e of log a_e - 2 log ||chi^e||_sup; nonpositive up to
    quadrature error.
    """
    if not space.has_l2:
        raise NotSmooth("Section space was built without L2 norms")
    exact = ~space.bound_mask
    if not np.any(exact):
        return -math.inf
    return float(np.max(space.log_l2_diag[exact] - 2.0 * space.log_sup_norms[exact]))


def count_small_sections(space: SectionSpace, budget: Optional[int] = None) -> CountResult:
    """
    Lattice points of the L2 ellipsoid {sum a_e x_e^2 <= 1} of the section
    space. The exact walk only runs when the outer box fits in the budget.
    """
    budget = budget or CountingOptions.from_config().budget
    mask = space.bound_mask
    log_diag = space.log_l2_diag
    log_lower, log_upper = count_ellipsoid_bounds_log(log_diag, mask)
    certified = not bool(np.any(mask))
    if certified and log_upper <= math.log(budget):
        try:
            # snap to nearby rationals so boundary ties such as a_e = 1/2 count exactly
            diag = [Fraction(float(a)).limit_denominator(10 ** 12) for a in np.exp(log_diag)]
            exact = count_ellipsoid_exact(diag, budget)
            return CountResult(exact, log_lower, log_upper, CountMethod.EXACT)
        except BudgetExceeded as exc:
            log_lower = max(log_lower, math.log(exc.partial_count))
    return CountResult(None, log_lower, log_upper, CountMethod.SANDWICH, certified)
