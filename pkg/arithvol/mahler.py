"""
Mahler measure M(P) = mean of log|P| over the unit torus, for integer
Laurent polynomials given as {exponent vector: coefficient}.

Among integer polynomials with sup norm at most 1 on the torus, M(P) = 0
and sum a^2 = 1 single out the monomials +-X^v.
"""
import itertools
import logging
import math
import warnings
from dataclasses import dataclass
from numbers import Integral
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import sympy as sp
from scipy.integrate import IntegrationWarning, nquad

from toricvol.exceptions import DimensionMismatch, NoConvergence

from .options import MahlerOptions

logger = logging.getLogger(__name__)

Coefficients = Dict[Tuple[int, ...], int]

DEFAULT_VARIABLES = ('X', 'Y', 'Z', 'W')


def _as_integer(value) -> int:
    if isinstance(value, Integral):
        return int(value)
    if getattr(value, 'is_integer', False) is True or (hasattr(value, 'denominator') and value.denominator == 1):
        return int(value)
    raise ValueError(f"Coefficient {value} is not an integer")


def normalize_coefficients(coeffs) -> Coefficients:
    """Integer coefficients keyed by exponent tuples, zero terms dropped."""
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    result: Coefficients = {}
    for exponent, value in items:
        key = tuple(int(c) for c in (exponent if isinstance(exponent, (tuple, list)) else (exponent,)))
        result[key] = result.get(key, 0) + _as_integer(value)
    result = {k: v for k, v in result.items() if v != 0}
    if not result:
        raise ValueError("The zero polynomial has no Mahler measure")
    if len({len(k) for k in result}) != 1:
        raise DimensionMismatch("Exponent vectors have different lengths")
    return result


def parse_polynomial(text: str, variables: Optional[Sequence[str]] = None) -> Tuple[Coefficients, Tuple[str, ...]]:
    """'X^2 - 3*X*Y + 1' -> ({(2, 0): 1, (1, 1): -3, (0, 0): 1}, ('X', 'Y'))."""
    expr = sp.sympify(text.replace('^', '**'))
    if variables is None:
        symbols = sorted(expr.free_symbols, key=str)
    else:
        symbols = [sp.Symbol(v) for v in variables]
    if not symbols:
        return normalize_coefficients({(): expr}), ()
    poly = sp.Poly(expr, *symbols)
    return normalize_coefficients(dict(poly.terms())), tuple(str(s) for s in symbols)


def format_polynomial(coeffs: Coefficients, variables: Optional[Sequence[str]] = None) -> str:
    coeffs = normalize_coefficients(coeffs)
    d = len(next(iter(coeffs)))
    symbols = sp.symbols(list(variables or DEFAULT_VARIABLES[:d])) if d else []
    expr = sum(c * sp.Mul(*[s ** e for s, e in zip(symbols, k)]) for k, c in coeffs.items())
    return str(sp.expand(expr))


def evaluate_on_torus(coeffs: Coefficients, theta: np.ndarray) -> np.ndarray:
    """P(exp(i theta)) for angles of shape (n, d)."""
    exponents = np.array(list(coeffs), dtype=float)
    values = np.array(list(coeffs.values()), dtype=float)
    return np.exp(1j * (np.atleast_2d(theta) @ exponents.T)) @ values


def _midpoint_grid(d: int, n: int) -> np.ndarray:
    axis = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    return np.stack([g.ravel() for g in np.meshgrid(*([axis] * d), indexing='ij')], axis=1)


def _mean_log_modulus(coeffs: Coefficients, d: int, n: int) -> float:
    modulus = np.abs(evaluate_on_torus(coeffs, _midpoint_grid(d, n)))
    with np.errstate(divide='ignore'):
        return float(np.mean(np.log(modulus)))


def mahler_measure_trapezoid(coeffs: Coefficients, opts: Optional[MahlerOptions] = None) -> float:
    """
    Periodic midpoint rule with grid doubling. Zeros on the torus leave an
    error of order 1/N, which Richardson extrapolation on successive grids
    removes.
    """
    opts = opts or MahlerOptions.from_config()
    coeffs = normalize_coefficients(coeffs)
    d = len(next(iter(coeffs)))
    max_points = opts.max_points_1d if d <= 1 else opts.max_points_nd
    n = opts.initial_points
    previous = previous_extrapolated = None
    while True:
        current = _mean_log_modulus(coeffs, d, n)
        if not math.isfinite(current):
            raise NoConvergence(f"P vanishes on a grid node at {n} points per circle", {'points': n})
        if previous is not None:
            if abs(current - previous) <= opts.tolerance:
                return current
            extrapolated = 2.0 * current - previous
            if previous_extrapolated is not None and abs(extrapolated - previous_extrapolated) <= opts.tolerance:
                return extrapolated
            previous_extrapolated = extrapolated
        previous = current
        if 2 * n > max_points:
            raise NoConvergence(
                f"Torus mean of log|P| did not stabilize with {n} points per circle",
                {'points': n, 'estimate': current, 'extrapolated': previous_extrapolated},
            )
        logger.debug("Mahler grid %s: %.12f", n, current)
        n *= 2


def _jensen(coefficients: np.ndarray) -> float:
    """log|a_n| + sum log max(1, |root|) for coefficients listed from the top degree."""
    scale = np.max(np.abs(coefficients))
    trimmed = np.trim_zeros(np.where(np.abs(coefficients) > 1e-14 * scale, coefficients, 0), 'f')
    if trimmed.size == 0:
        return -math.inf
    roots = np.roots(trimmed)
    return float(math.log(abs(trimmed[0])) + np.sum(np.log(np.maximum(1.0, np.abs(roots)))))


def _jensen_axis(coeffs: Coefficients) -> int:
    spans = [max(k[i] for k in coeffs) - min(k[i] for k in coeffs) for i in range(len(next(iter(coeffs))))]
    return int(np.argmax(spans))


def mahler_measure_jensen(coeffs: Coefficients, opts: Optional[MahlerOptions] = None) -> float:
    """
    Jensen's formula in the variable of largest degree span, integrated
    over the remaining angles by adaptive quadrature.
    """
    opts = opts or MahlerOptions.from_config()
    coeffs = normalize_coefficients(coeffs)
    axis = _jensen_axis(coeffs)
    low = min(k[axis] for k in coeffs)
    span = max(k[axis] for k in coeffs) - low
    outer = [(tuple(c for i, c in enumerate(k) if i != axis), k[axis] - low, v) for k, v in coeffs.items()]

    def inner(*angles):
        column = np.zeros(span + 1, dtype=complex)
        for rest, power, value in outer:
            column[span - power] += value * np.exp(1j * sum(a * e for a, e in zip(angles, rest)))
        return _jensen(column)

    d = len(next(iter(coeffs)))
    if d == 1:
        return inner()
    with warnings.catch_warnings():
        warnings.simplefilter('error', IntegrationWarning)
        try:
            value, error = nquad(inner, [(0.0, 2.0 * np.pi)] * (d - 1),
                                 opts={'epsabs': opts.tolerance, 'epsrel': opts.tolerance, 'limit': 200})
        except IntegrationWarning as exc:
            raise NoConvergence(f"Outer torus integral failed: {exc}") from exc
    return value / (2.0 * np.pi) ** (d - 1)


def mahler_measure(coeffs, opts: Optional[MahlerOptions] = None, method: str = 'jensen') -> float:
    """M(P); 'jensen' or 'trapezoid'. Monomials c X^v return log|c| exactly."""
    coeffs = normalize_coefficients(coeffs)
    if len(coeffs) == 1:
        return math.log(abs(next(iter(coeffs.values()))))
    if method == 'jensen':
        return mahler_measure_jensen(coeffs, opts)
    if method == 'trapezoid':
        return mahler_measure_trapezoid(coeffs, opts)
    raise ValueError(f"Unknown Mahler method {method!r}")


@dataclass(frozen=True)
class ParsevalResult:
    l2_mass: int
    is_unit_monomial: bool
    numeric_mass: float


def parseval_check(coeffs) -> ParsevalResult:
    """
    sum a^2 exactly, and the torus mean of |P|^2 on a grid fine enough to
    integrate it without aliasing.
    """
    coeffs = normalize_coefficients(coeffs)
    mass = sum(v * v for v in coeffs.values())
    d = len(next(iter(coeffs)))
    spans = [max(k[i] for k in coeffs) - min(k[i] for k in coeffs) for i in range(d)]
    n = max(spans, default=0) + 1
    numeric = float(np.mean(np.abs(evaluate_on_torus(coeffs, _midpoint_grid(d, n))) ** 2)) if d else float(mass)
    return ParsevalResult(mass, mass == 1, numeric)


def torus_sup(coeffs, resolution: int = 1024) -> float:
    """Sampled max |P| over a uniform grid of the torus; a lower bound for the sup norm."""
    coeffs = normalize_coefficients(coeffs)
    d = len(next(iter(coeffs)))
    if d == 0:
        return float(abs(next(iter(coeffs.values()))))
    axis = 2.0 * np.pi * np.arange(resolution) / resolution
    grid = np.stack([g.ravel() for g in np.meshgrid(*([axis] * d), indexing='ij')], axis=1)
    return float(np.max(np.abs(evaluate_on_torus(coeffs, grid))))


def exhaustive_small_polynomial_search(coeff_range: Tuple[int, int] = (-2, 2), degree: int = 2,
                                       resolution: int = 1024,
                                       opts: Optional[MahlerOptions] = None) -> pd.DataFrame:
    """
    Every nonzero a_0 + a_1 X + ... + a_n X^n with a_i in coeff_range; rows
    record the sampled sup, M(P), sum a^2 and whether P is a small candidate.
    """
    lo, hi = coeff_range
    rows = []
    for values in itertools.product(range(lo, hi + 1), repeat=degree + 1):
        if not any(values):
            continue
        coeffs = {(i,): v for i, v in enumerate(values) if v}
        sup = torus_sup(coeffs, resolution)
        parseval = parseval_check(coeffs)
        rows.append({
            'polynomial': format_polynomial(coeffs, ('X',)),
            'sup_sampled': sup,
            'mahler': mahler_measure(coeffs, opts),
            'l2_mass': parseval.l2_mass,
            'is_unit_monomial': parseval.is_unit_monomial,
            'small': sup <= 1.0 + 1e-9,
        })
    return pd.DataFrame(rows)
