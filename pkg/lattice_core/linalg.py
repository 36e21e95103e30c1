"""
Exact rational linear algebra helpers.
Coordinates are fractions.Fraction throughout; sympy does the elimination.
"""
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy as sp

RationalPoint = Tuple[Fraction, ...]
LatticePoint = Tuple[int, ...]


def to_fraction(value) -> Fraction:
    """
    Parse an exact rational. Accepts int, Fraction, sympy Rational and
    "p/q" or integer strings. Floats are rejected: lattice data must be exact.
    """
    if isinstance(value, bool):
        raise TypeError(f"Invalid rational value: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("Empty rational string")
        return Fraction(text)
    raise TypeError(f"Invalid rational value: {value!r}")


def rational_point(coords: Iterable) -> RationalPoint:
    return tuple(to_fraction(c) for c in coords)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def subtract(a: Sequence, b: Sequence) -> RationalPoint:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


def add(a: Sequence, b: Sequence) -> RationalPoint:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def scale(a: Sequence, factor) -> RationalPoint:
    return tuple(Fraction(x) * factor for x in a)


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _matrix(rows: Sequence[Sequence], ncols: int) -> sp.Matrix:
    if not rows:
        return sp.zeros(0, ncols)
    return sp.Matrix([[sp.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row]
                      for row in rows])


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return _matrix(rows, ncols or len(rows[0])).rank()


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[RationalPoint]:
    """Basis of {x : row . x = 0 for every row}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    basis = _matrix(rows, ncols).nullspace()
    return [tuple(to_fraction(v) for v in vec) for vec in basis]


def determinant(rows: Sequence[Sequence]) -> Fraction:
    return to_fraction(_matrix(rows, len(rows)).det())


def solve_square(rows: Sequence[Sequence], rhs: Sequence) -> Optional[RationalPoint]:
    """Unique solution of a square system, or None when singular."""
    m = _matrix(rows, len(rows))
    if m.det() == 0:
        return None
    b = _matrix([[x] for x in rhs], 1)
    return tuple(to_fraction(v) for v in m.LUsolve(b))


def solve_consistent(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> Optional[RationalPoint]:
    """
    A solution of a possibly over- or under-determined system, free
    parameters set to zero. Returns None if the system is inconsistent.
    """
    m = _matrix(rows, ncols)
    b = _matrix([[x] for x in rhs], 1)
    try:
        solution, params = m.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return tuple(to_fraction(v) for v in solution)


def primitive(vector: Sequence) -> LatticePoint:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fractions_ = [Fraction(x) for x in vector]
    lcm = reduce(lambda acc, f: acc * f.denominator // math.gcd(acc, f.denominator), fractions_, 1)
    ints = [int(f * lcm) for f in fractions_]
    g = reduce(math.gcd, (abs(i) for i in ints), 0)
    if g == 0:
        raise ValueError("Zero vector has no primitive representative")
    return tuple(i // g for i in ints)


def is_primitive(vector: Sequence[int]) -> bool:
    return reduce(math.gcd, (abs(int(i)) for i in vector), 0) == 1


def affine_dimension(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull; -1 for the empty set."""
    if not points:
        return -1
    base = points[0]
    diffs = [subtract(p, base) for p in points[1:]]
    diffs = [d for d in diffs if any(d)]
    if not diffs:
        return 0
    return rank(diffs, len(base))
