"""
Adaptive tensor Gauss-Legendre rules on boxes, whole-space integration by
box doubling, and simplices through the collapsed-coordinate map.
All partial sums are accumulated with math.fsum.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .options import QuadratureOptions

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass
class QuadratureResult:
    value: float
    error: float
    evaluations: int
    converged: bool = True
    radius: Optional[float] = None


@lru_cache(maxsize=None)
def _gauss_legendre(order: int):
    return leggauss(order)


def tensor_rule(lower: np.ndarray, upper: np.ndarray, order: int):
    """Nodes (order^d, d) and weights of the product rule on a box."""
    nodes, weights = _gauss_legendre(order)
    half = (upper - lower) / 2.0
    mid = (upper + lower) / 2.0
    axes = [mid[i] + half[i] * nodes for i in range(len(lower))]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing='ij')], axis=1)
    w = np.ones(1)
    for i in range(len(lower)):
        w = np.outer(w, weights * half[i]).ravel()
    return grid, w


def _children(lower, upper):
    mid = (lower + upper) / 2.0
    for corner in itertools.product((0, 1), repeat=len(lower)):
        corner = np.array(corner, dtype=bool)
        yield np.where(corner, mid, lower), np.where(corner, upper, mid)


def _has_kink(values: np.ndarray) -> bool:
    return bool(np.any(values > 0) and np.any(values <= 0))


def integrate_box(func: Integrand, lower: Sequence[float], upper: Sequence[float],
                  opts: QuadratureOptions, kink_depth: int = 0) -> QuadratureResult:
    """
    Dyadic adaptive integration. A cell is accepted when its rule agrees with
    the sum over its 2^d children, either relative to the cell itself or to
    its volume share of the first whole-box estimate. Cells whose node values
    change sign are split down to kink_depth regardless.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    root_volume = float(np.prod(upper - lower))

    def estimate(lo, hi):
        nodes, weights = tensor_rule(lo, hi, opts.order)
        values = np.asarray(func(nodes), dtype=float)
        return math.fsum(weights * values), _has_kink(values), len(weights)

    value, kink, evaluations = estimate(lower, upper)
    stack = [(lower, upper, 0, value, kink)]
    accepted, errors = [], []
    converged = True

    while stack:
        lo, hi, depth, parent, parent_kink = stack.pop()
        children = []
        for clo, chi in _children(lo, hi):
            child, child_kink, n = estimate(clo, chi)
            evaluations += n
            children.append((clo, chi, child, child_kink))
        total = math.fsum(c[2] for c in children)
        diff = abs(total - parent)
        forced = depth < kink_depth and (parent_kink or any(c[3] for c in children))
        share = float(np.prod(hi - lo)) / root_volume
        good = diff <= max(opts.rel_tolerance * abs(total),
                           opts.rel_tolerance * abs(value) * share,
                           opts.abs_tolerance)
        if (good and not forced) or depth + 1 >= opts.max_depth:
            if not good:
                converged = False
            accepted.append(total)
            errors.append(diff)
            continue
        for clo, chi, child, child_kink in children:
            stack.append((clo, chi, depth + 1, child, child_kink))

    if not converged:
        logger.debug("Box [%s, %s] hit max depth %s", lower.tolist(), upper.tolist(), opts.max_depth)
    return QuadratureResult(math.fsum(accepted), math.fsum(errors), evaluations, converged)


def _shell_cells(center: np.ndarray, radius: float):
    """Cells of side `radius` covering [-2R, 2R]^d minus [-R, R]^d around center."""
    d = len(center)
    offsets = (-2.0, -1.0, 0.0, 1.0)
    for index in itertools.product(range(4), repeat=d):
        if all(i in (1, 2) for i in index):
            continue
        lower = center + radius * np.array([offsets[i] for i in index])
        yield lower, lower + radius


def integrate_whole_space(func: Integrand, dimension: int, opts: QuadratureOptions,
                          center: Optional[Sequence[float]] = None,
                          initial_radius: Optional[float] = None) -> QuadratureResult:
    """
    Integral over R^d of a decaying integrand. The box around `center` is
    doubled until the added shell is below tolerance; converged is False if
    max_radius is reached first.
    """
    center = np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
    radius = float(initial_radius or opts.initial_radius)

    first = integrate_box(func, center - radius, center + radius, opts)
    parts, errors = [first.value], [first.error]
    evaluations = first.evaluations
    converged = first.converged

    while True:
        shell_parts = []
        for lower, upper in _shell_cells(center, radius):
            cell = integrate_box(func, lower, upper, opts)
            shell_parts.append(cell.value)
            errors.append(cell.error)
            evaluations += cell.evaluations
            converged = converged and cell.converged
        shell = math.fsum(shell_parts)
        parts.append(shell)
        radius *= 2.0
        total = math.fsum(parts)
        logger.debug("Shell at radius %s contributes %.3e of %.6e", radius, shell, total)
        if abs(shell) <= opts.rel_tolerance * abs(total) + opts.abs_tolerance:
            return QuadratureResult(total, math.fsum(errors), evaluations, converged, radius)
        if radius * 2.0 > opts.max_radius:
            logger.warning("Integrand still contributes %.3e at radius %s", shell, radius)
            return QuadratureResult(total, math.fsum(errors), evaluations, False, radius)


def _collapsed_map(simplex: np.ndarray):
    """
    Map from the unit cube onto a d-simplex (rows = vertices): y_k is the
    product of the first k cube coordinates, which fills the ordered simplex
    1 >= y_1 >= ... >= y_d >= 0, followed by the affine map sending its
    vertices to the given ones.
    """
    d = simplex.shape[1]
    steps = np.diff(simplex, axis=0)
    scale = abs(np.linalg.det(steps)) if d else 1.0

    def transform(xi: np.ndarray):
        y = np.cumprod(xi, axis=1)
        points = simplex[0] + y @ steps
        jacobian = np.ones(len(xi)) * scale
        for k in range(d - 1):
            jacobian *= xi[:, k] ** (d - 1 - k)
        return points, jacobian

    return transform


def integrate_simplex(func: Integrand, simplex: Sequence[Sequence[float]],
                      opts: QuadratureOptions, kink_depth: int = 0) -> QuadratureResult:
    """Integral of func over a full-dimensional simplex given by its d+1 vertices."""
    vertices = np.asarray(simplex, dtype=float)
    d = vertices.shape[1]
    transform = _collapsed_map(vertices)

    def pulled_back(xi):
        points, jacobian = transform(xi)
        return np.asarray(func(points), dtype=float) * jacobian

    return integrate_box(pulled_back, np.zeros(d), np.ones(d), opts, kink_depth)
