"""
Exact lattice polytopes: vertex and inequality forms, lattice points of
dilates, triangulation, volume, Minkowski sums and the monomial map.
No floating point is used in this module.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from toricvol.exceptions import (
    DegeneratePolytope,
    DimensionMismatch,
    EmptyPolytope,
    UnboundedPolytope,
)

from .linalg import (
    LatticePoint,
    RationalPoint,
    add,
    affine_dimension,
    determinant,
    dot,
    format_fraction,
    nullspace,
    primitive,
    rank,
    rational_point,
    solve_square,
    subtract,
    to_fraction,
)

logger = logging.getLogger(__name__)

# (normal u, offset b) meaning <x, u> >= b
Inequality = Tuple[LatticePoint, Fraction]


@dataclass(frozen=True)
class LatticePolytope:
    """
    A bounded polyhedron in M_R = R^d kept in both vertex and inequality form.
    Vertices are sorted lexicographically.
    """
    dimension: int
    vertices: Tuple[RationalPoint, ...]
    inequalities: Tuple[Inequality, ...]

    # ---- construction -------------------------------------------------

    @classmethod
    def from_inequalities(cls, dimension: int, inequalities: Sequence) -> 'LatticePolytope':
        ineqs = _normalize_inequalities(dimension, inequalities)
        _check_bounded(dimension, ineqs)
        vertices = _enumerate_vertices(dimension, ineqs)
        if not vertices:
            raise EmptyPolytope("Inequality system is infeasible")
        return cls(dimension=dimension, vertices=tuple(vertices), inequalities=ineqs)

    @classmethod
    def from_vertices(cls, points: Sequence[Sequence]) -> 'LatticePolytope':
        pts = sorted({rational_point(p) for p in points})
        if not pts:
            raise EmptyPolytope("No points given")
        dimension = len(pts[0])
        if any(len(p) != dimension for p in pts):
            raise DimensionMismatch("Points have inconsistent dimensions")
        ineqs = _hull_inequalities(dimension, pts)
        vertices = [p for p in pts if _is_vertex(dimension, p, ineqs)]
        return cls(dimension=dimension, vertices=tuple(vertices), inequalities=ineqs)

    # ---- queries --------------------------------------------------------

    def contains(self, x: Sequence) -> bool:
        point = rational_point(x)
        return all(dot(point, u) >= b for u, b in self.inequalities)

    def contains_float(self, x: Sequence[float], tol: float = 1e-12) -> bool:
        return all(sum(float(xi) * ui for xi, ui in zip(x, u)) >= float(b) - tol
                   for u, b in self.inequalities)

    def tight_inequalities(self, x: Sequence, tol: float = 0.0) -> List[int]:
        """Indices of inequalities active at x (exact when tol == 0)."""
        if tol == 0.0:
            point = rational_point(x)
            return [i for i, (u, b) in enumerate(self.inequalities) if dot(point, u) == b]
        return [i for i, (u, b) in enumerate(self.inequalities)
                if abs(sum(float(xi) * ui for xi, ui in zip(x, u)) - float(b)) <= tol]

    @property
    def affine_dimension(self) -> int:
        return affine_dimension(list(self.vertices))

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dimension == self.dimension

    @property
    def is_lattice(self) -> bool:
        return all(c.denominator == 1 for v in self.vertices for c in v)

    def dilate(self, factor) -> 'LatticePolytope':
        factor = to_fraction(factor)
        if factor <= 0:
            raise ValueError("Dilation factor must be positive")
        return LatticePolytope(
            dimension=self.dimension,
            vertices=tuple(tuple(c * factor for c in v) for v in self.vertices),
            inequalities=tuple((u, b * factor) for u, b in self.inequalities),
        )

    def vertex_sets(self) -> List[frozenset]:
        """Vertex indices tight at each inequality, in inequality order."""
        return [frozenset(j for j, v in enumerate(self.vertices) if dot(v, u) == b)
                for u, b in self.inequalities]

    def facets(self) -> List[Tuple[int, frozenset]]:
        """(inequality index, vertex indices) for inequalities that cut out facets."""
        k = self.affine_dimension
        result = []
        seen = set()
        for index, tight in enumerate(self.vertex_sets()):
            if tight in seen or len(tight) == len(self.vertices):
                continue
            if affine_dimension([self.vertices[j] for j in sorted(tight)]) == k - 1:
                seen.add(tight)
                result.append((index, tight))
        return result

    def to_dict(self) -> Dict:
        return {
            'dimension': self.dimension,
            'vertices': [[format_fraction(c) for c in v] for v in self.vertices],
            'inequalities': [
                {'normal': list(u), 'offset': format_fraction(b)} for u, b in self.inequalities
            ],
        }

    def __str__(self):
        verts = ', '.join('(' + ', '.join(format_fraction(c) for c in v) + ')' for v in self.vertices)
        return f"Polytope[d={self.dimension}]{{{verts}}}"


# ---- internal helpers -----------------------------------------------------

def _normalize_inequalities(dimension: int, inequalities: Sequence) -> Tuple[Inequality, ...]:
    result = []
    for normal, offset in inequalities:
        normal = tuple(int(c) for c in normal)
        if len(normal) != dimension:
            raise DimensionMismatch(f"Normal {normal} does not live in dimension {dimension}")
        result.append((normal, to_fraction(offset)))
    return tuple(result)


def _check_bounded(dimension: int, ineqs: Tuple[Inequality, ...]) -> None:
    """
    The recession cone {y : <y,u> >= 0} must be {0}. Its extreme rays are
    cut out by d-1 independent normals, so it is enough to test those lines.
    """
    normals = [u for u, _ in ineqs]
    if not normals or rank(normals, dimension) < dimension:
        raise UnboundedPolytope("Inequality normals do not span the ambient space")
    for combo in itertools.combinations(normals, dimension - 1):
        rows = list(combo)
        if rows and rank(rows, dimension) < dimension - 1:
            continue
        directions = nullspace(rows, dimension)
        if len(directions) != 1:
            continue
        r = directions[0]
        for candidate in (r, tuple(-c for c in r)):
            if all(dot(candidate, u) >= 0 for u in normals):
                raise UnboundedPolytope(f"Recession direction {candidate} found")


def _enumerate_vertices(dimension: int, ineqs: Tuple[Inequality, ...]) -> List[RationalPoint]:
    """
    Basic-solution enumeration: every vertex is the unique solution of d
    independent active constraints.
    """
    found = set()
    for combo in itertools.combinations(range(len(ineqs)), dimension):
        rows = [ineqs[i][0] for i in combo]
        rhs = [ineqs[i][1] for i in combo]
        x = solve_square(rows, rhs)
        if x is None or x in found:
            continue
        if all(dot(x, u) >= b for u, b in ineqs):
            found.add(x)
    return sorted(found)


def _hull_inequalities(dimension: int, pts: List[RationalPoint]) -> Tuple[Inequality, ...]:
    base = pts[0]
    diffs = [subtract(p, base) for p in pts[1:]]
    k = affine_dimension(pts)
    orthogonal = [primitive(w) for w in nullspace([d for d in diffs if any(d)], dimension)] if k < dimension else []

    ineqs: List[Inequality] = []
    for w in orthogonal:
        b = dot(base, w)
        ineqs.append((w, b))
        ineqs.append((tuple(-c for c in w), -b))

    if k >= 1:
        seen = set()
        for combo in itertools.combinations(pts, k):
            rows = list(orthogonal) + [subtract(p, combo[0]) for p in combo[1:]]
            normals = nullspace(rows, dimension)
            if len(normals) != 1:
                continue
            n = primitive(normals[0])
            level = dot(combo[0], n)
            values = [dot(p, n) for p in pts]
            if all(v >= level for v in values):
                candidate = (n, level)
            elif all(v <= level for v in values):
                candidate = (tuple(-c for c in n), -level)
            else:
                continue
            if candidate not in seen:
                seen.add(candidate)
                ineqs.append(candidate)
    return tuple(ineqs)


def _is_vertex(dimension: int, point: RationalPoint, ineqs: Tuple[Inequality, ...]) -> bool:
    if dimension == 0:
        return True
    active = [u for u, b in ineqs if dot(point, u) == b]
    return bool(active) and rank(active, dimension) == dimension


# ---- operations ---------------------------------------------------------------

def lattice_points(polytope: LatticePolytope, l: int = 1) -> List[LatticePoint]:
    """
    All integer points of the dilate l*P in lexicographic order.
    """
    if l < 1:
        raise ValueError("Dilation level must be a positive integer")
    ranges = []
    for axis in range(polytope.dimension):
        coords = [v[axis] * l for v in polytope.vertices]
        ranges.append(range(math.ceil(min(coords)), math.floor(max(coords)) + 1))
    scaled = [(u, b * l) for u, b in polytope.inequalities]
    points = []
    for candidate in itertools.product(*ranges):
        if all(sum(c * ui for c, ui in zip(candidate, u)) >= b for u, b in scaled):
            points.append(tuple(candidate))
    return points


def ehrhart_counts(polytope: LatticePolytope, l_max: int) -> List[int]:
    """Lattice point counts of l*P for l = 1..l_max."""
    return [len(lattice_points(polytope, l)) for l in range(1, l_max + 1)]


def triangulate(polytope: LatticePolytope) -> List[Tuple[RationalPoint, ...]]:
    """
    Pulling triangulation: cone from the lexicographically least vertex over
    the (recursively triangulated) facets that do not contain it.
    """
    verts = polytope.vertices
    k = polytope.affine_dimension
    facet_sets = [tight for _, tight in polytope.facets()]
    face = frozenset(range(len(verts)))
    simplices = _triangulate_face(face, k, verts, facet_sets)
    return [tuple(verts[i] for i in simplex) for simplex in simplices]


def _triangulate_face(face, dim, verts, facet_sets):
    ordered = sorted(face, key=lambda i: verts[i])
    if dim <= 0:
        return [(ordered[0],)]
    if dim == 1:
        return [(ordered[0], ordered[-1])]
    apex = ordered[0]
    subfaces = set()
    for facet in facet_sets:
        sub = face & facet
        if sub == face or len(sub) < dim:
            continue
        if affine_dimension([verts[i] for i in sorted(sub)]) == dim - 1:
            subfaces.add(frozenset(sub))
    simplices = []
    for sub in sorted(subfaces, key=lambda s: sorted(s)):
        if apex in sub:
            continue
        for simplex in _triangulate_face(sub, dim - 1, verts, facet_sets):
            simplices.append((apex,) + simplex)
    return simplices


def simplex_volume(simplex: Sequence[RationalPoint]) -> Fraction:
    d = len(simplex) - 1
    rows = [subtract(v, simplex[0]) for v in simplex[1:]]
    return abs(determinant(rows)) / math.factorial(d)


def polytope_volume(polytope: LatticePolytope) -> Fraction:
    """Exact Lebesgue volume of a full-dimensional polytope."""
    if not polytope.is_full_dimensional:
        raise DegeneratePolytope(
            f"Polytope has affine dimension {polytope.affine_dimension} in R^{polytope.dimension}"
        )
    return sum((simplex_volume(s) for s in triangulate(polytope)), Fraction(0))


def minkowski_sum(p: LatticePolytope, q: LatticePolytope) -> LatticePolytope:
    if p.dimension != q.dimension:
        raise DimensionMismatch(f"Cannot add polytopes of dimensions {p.dimension} and {q.dimension}")
    return LatticePolytope.from_vertices([add(a, b) for a in p.vertices for b in q.vertices])


def standard_simplex(d: int) -> LatticePolytope:
    origin = tuple(0 for _ in range(d))
    units = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    return LatticePolytope.from_vertices([origin] + units)


def unit_cube(d: int) -> LatticePolytope:
    return LatticePolytope.from_vertices(list(itertools.product((0, 1), repeat=d)))


# ---- monomial map -----------------------------------------------------------------

def monomial_map_matrix(polytope: LatticePolytope) -> Tuple[LatticePoint, ...]:
    """
    Rows b_j = m_j - m_0 for the lattice points m_0 < m_1 < ... of P, so that
    s -> (1, s^b_1, ..., s^b_n) is the character map up to the factor chi^m_0.
    """
    points = lattice_points(polytope, 1)
    if not points:
        raise EmptyPolytope("Polytope has no lattice points")
    base = points[0]
    return tuple(tuple(c - b for c, b in zip(m, base)) for m in points[1:])


def torus_character(exponent: Sequence[int], s: Sequence) -> Fraction:
    value = Fraction(1)
    for si, ei in zip(s, exponent):
        value *= Fraction(si) ** int(ei)
    return value


def character_map(points: Sequence[LatticePoint], s: Sequence) -> Tuple[Fraction, ...]:
    return tuple(torus_character(m, s) for m in points)


def monomial_map(matrix: Sequence[LatticePoint], s: Sequence) -> Tuple[Fraction, ...]:
    return (Fraction(1),) + tuple(torus_character(b, s) for b in matrix)


def projectively_equal(v: Sequence[Fraction], w: Sequence[Fraction]) -> bool:
    if len(v) != len(w):
        return False
    pivot: Optional[int] = next((i for i, x in enumerate(v) if x != 0), None)
    if pivot is None or w[pivot] == 0:
        return False
    ratio = Fraction(w[pivot]) / Fraction(v[pivot])
    return all(Fraction(wi) == ratio * Fraction(vi) for vi, wi in zip(v, w))
