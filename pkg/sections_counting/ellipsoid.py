"""
Lattice points in the diagonal ellipsoid {x in Z^n : sum a_i x_i^2 <= 1}.

Exact counts come from a depth-first walk over the coordinates; each level
only visits |x_i| <= floor(sqrt(r / a_i)) for the residual r left by the
coordinates already fixed. The product bounds

    prod (2 floor(1 / sqrt(n a_i)) + 1) <= count <= prod (2 floor(1 / sqrt(a_i)) + 1)

come from the box inscribed in the ellipsoid and the box around it.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Tuple

import numpy as np
from django.db import models

from toricvol.exceptions import BudgetExceeded

from .options import CountingOptions

logger = logging.getLogger(__name__)

# beyond this log-radius the floor changes log(2R + 1) by less than 1e-13
_LARGE_LOG_RADIUS = 30.0


class CountMethod(models.TextChoices):
    EXACT = 'exact', 'Exact enumeration'
    SANDWICH = 'sandwich', 'Box sandwich bounds'
    CANONICAL = 'canonical', 'Sup-norm monomial count'


@dataclass(frozen=True)
class CountResult:
    exact: Optional[int]
    log_lower: float
    log_upper: float
    method: str = CountMethod.SANDWICH
    # False when some a_e was only an upper bound, which makes log_upper heuristic
    certified: bool = True

    @property
    def log_exact(self) -> Optional[float]:
        return None if self.exact is None else math.log(self.exact)

    def brackets_exact(self, slack: float = 1e-12) -> bool:
        if self.exact is None:
            return True
        return self.log_lower - slack <= math.log(self.exact) <= self.log_upper + slack


def _check_diagonal(diag: Sequence) -> Tuple[bool, list]:
    exact = all(isinstance(a, Rational) for a in diag)
    values = [Fraction(a) if exact else float(a) for a in diag]
    if any(not a > 0 for a in values):
        raise ValueError("Ellipsoid diagonal entries must be positive")
    return exact, values


def _radius(a, residual, exact: bool) -> int:
    """floor(sqrt(residual / a)), or -1 if the residual is negative."""
    if residual < 0:
        return -1
    if exact:
        return math.isqrt(math.floor(residual / a))
    radius = int(math.sqrt(residual / a))
    while a * (radius + 1) ** 2 <= residual:
        radius += 1
    while radius > 0 and a * radius ** 2 > residual:
        radius -= 1
    return radius


def count_ellipsoid_exact(diag: Sequence, budget: Optional[int] = None) -> int:
    """
    Card {x in Z^n : sum a_i x_i^2 <= 1}. Fractions are counted in exact
    arithmetic. Raises BudgetExceeded once more than `budget` partial
    vectors have been expanded; its partial_count is a lower bound.
    """
    exact, values = _check_diagonal(diag)
    budget = budget or CountingOptions.from_config().budget
    n = len(values)
    if n == 0:
        return 1
    # small radii first keeps the upper levels of the walk narrow
    values.sort(reverse=True)
    one = Fraction(1) if exact else 1.0

    count = 0
    nodes = 0
    stack = [(0, one, 1)]
    while stack:
        index, residual, weight = stack.pop()
        nodes += 1
        if nodes > budget:
            lower = max(count, _box_lower_count(values, exact))
            logger.warning("Exact ellipsoid count stopped after %s nodes; %s points found", budget, count)
            raise BudgetExceeded(f"Ellipsoid enumeration exceeded {budget} nodes",
                                 partial_count=lower, nodes=nodes)
        a = values[index]
        radius = _radius(a, residual, exact)
        if index == n - 1:
            count += weight * (2 * radius + 1)
            continue
        stack.append((index + 1, residual, weight))
        for x in range(1, radius + 1):
            stack.append((index + 1, residual - a * x * x, 2 * weight))
    return count


def _box_lower_count(values, exact: bool) -> int:
    n = len(values)
    return math.prod(2 * _radius(n * a, 1, exact) + 1 for a in values)


def count_ellipsoid_bounds(diag: Sequence) -> Tuple[float, float]:
    """(log_lower, log_upper) from the inscribed and circumscribed boxes."""
    exact, values = _check_diagonal(diag)
    n = len(values)
    log_lower = math.fsum(math.log(2 * _radius(n * a, 1, exact) + 1) for a in values)
    log_upper = math.fsum(math.log(2 * _radius(a, 1, exact) + 1) for a in values)
    return log_lower, log_upper


def _log_box_side(log_radius: float) -> float:
    """log(2 floor(exp(log_radius)) + 1)."""
    if log_radius < -1e-15:
        return 0.0
    if log_radius > _LARGE_LOG_RADIUS:
        return math.log(2.0) + log_radius
    return math.log(2 * math.floor(math.exp(log_radius) * (1 + 1e-15)) + 1)


def count_ellipsoid_bounds_log(log_diag: Sequence[float],
                               bound_mask: Optional[Sequence[bool]] = None) -> Tuple[float, float]:
    """
    Box bounds from log a_i, for diagonals that overflow floats. Entries
    flagged in bound_mask only carry an upper bound of a_i and contribute
    radius 0 to the lower bound.
    """
    log_diag = np.asarray(log_diag, dtype=float)
    n = len(log_diag)
    if n == 0:
        return 0.0, 0.0
    mask = np.zeros(n, dtype=bool) if bound_mask is None else np.asarray(bound_mask, dtype=bool)
    log_n = math.log(n)
    lower = [0.0 if flagged else _log_box_side(-0.5 * (log_a + log_n))
             for log_a, flagged in zip(log_diag, mask)]
    upper = [_log_box_side(-0.5 * log_a) for log_a in log_diag]
    return math.fsum(lower), math.fsum(upper)


def count_ellipsoid(diag: Sequence, budget: Optional[int] = None) -> CountResult:
    """Sandwich bounds, plus the exact count when it fits in the budget."""
    log_lower, log_upper = count_ellipsoid_bounds(diag)
    try:
        exact = count_ellipsoid_exact(diag, budget)
    except BudgetExceeded as exc:
        if exc.partial_count > 0:
            log_lower = max(log_lower, math.log(exc.partial_count))
        return CountResult(None, log_lower, log_upper, CountMethod.SANDWICH)
    return CountResult(exact, log_lower, log_upper, CountMethod.EXACT)
