"""
Fans, torus-invariant divisors and their support functions.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from toricvol.exceptions import (
    DegeneratePolytope,
    DimensionMismatch,
    IncompleteFan,
    NonCartier,
)

from .linalg import (
    LatticePoint,
    determinant,
    dot,
    is_primitive,
    rank,
    rational_point,
    solve_consistent,
)
from .polytope import LatticePolytope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone given by primitive ray generators."""
    rays: Tuple[LatticePoint, ...]

    def __post_init__(self):
        if not self.rays:
            raise ValueError("A cone needs at least one ray")
        dim = len(self.rays[0])
        for ray in self.rays:
            if len(ray) != dim:
                raise DimensionMismatch("Cone rays have inconsistent dimensions")
            if not is_primitive(ray):
                raise ValueError(f"Ray {ray} is not primitive")

    @property
    def dimension(self) -> int:
        return len(self.rays[0])

    @property
    def is_simplicial(self) -> bool:
        return rank(list(self.rays), self.dimension) == len(self.rays)

    def is_strict(self) -> bool:
        """
        A finitely generated cone contains no line iff some linear form is
        positive on every generator.
        """
        if self.is_simplicial:
            return True
        a = np.array(self.rays, dtype=float)
        result = linprog(
            c=np.zeros(self.dimension),
            A_ub=-a,
            b_ub=-np.ones(len(self.rays)),
            bounds=[(None, None)] * self.dimension,
            method='highs',
        )
        return result.status == 0

    def contains(self, u: Sequence) -> bool:
        """Exact membership through simplicial subcones (Caratheodory)."""
        point = rational_point(u)
        if not any(point):
            return True
        for k in range(1, min(len(self.rays), self.dimension) + 1):
            for combo in itertools.combinations(self.rays, k):
                if rank(list(combo), self.dimension) < k:
                    continue
                columns = [list(row) for row in zip(*combo)]
                coeffs = solve_consistent(columns, list(point), k)
                if coeffs is None:
                    continue
                if all(c >= 0 for c in coeffs):
                    return True
        return False


@dataclass(frozen=True)
class Fan:
    """
    Maximal cones of a fan, stored as index tuples into the deduplicated ray
    list. Completeness is asserted by the constructor, never decided.
    """
    rays: Tuple[LatticePoint, ...]
    cones: Tuple[Tuple[int, ...], ...]
    complete: bool = False

    def __post_init__(self):
        for cone in self.cones:
            for index in cone:
                if not 0 <= index < len(self.rays):
                    raise ValueError(f"Cone references unknown ray index {index}")

    @classmethod
    def from_cones(cls, cones: Sequence[Cone], complete: bool = False) -> 'Fan':
        rays: List[LatticePoint] = []
        indexed = []
        for cone in cones:
            ids = []
            for ray in cone.rays:
                ray = tuple(int(c) for c in ray)
                if ray not in rays:
                    rays.append(ray)
                ids.append(rays.index(ray))
            indexed.append(tuple(ids))
        return cls(rays=tuple(rays), cones=tuple(indexed), complete=complete)

    @property
    def dimension(self) -> int:
        return len(self.rays[0])

    def cone(self, index: int) -> Cone:
        return Cone(tuple(self.rays[i] for i in self.cones[index]))

    def maximal_cones(self) -> List[Cone]:
        return [self.cone(i) for i in range(len(self.cones))]


@dataclass(frozen=True)
class SupportFunction:
    """
    Piecewise-linear function on a fan: one integer linear form m_sigma per
    maximal cone, with psi(u_i) = -a_i on every ray.
    """
    fan: Fan
    pieces: Tuple[Tuple[Fraction, ...], ...]

    def evaluate(self, u: Sequence) -> Fraction:
        point = rational_point(u)
        for index, cone in enumerate(self.fan.maximal_cones()):
            if cone.contains(point):
                return dot(self.pieces[index], point)
        raise IncompleteFan(f"No cone of the fan contains {tuple(point)}")

    def ray_values(self) -> List[Fraction]:
        return [self.evaluate(ray) for ray in self.fan.rays]

    def is_continuous(self) -> bool:
        """Neighbouring forms agree on every shared ray, hence on the shared face."""
        for (i, a), (j, b) in itertools.combinations(enumerate(self.fan.cones), 2):
            for ray_index in set(a) & set(b):
                ray = self.fan.rays[ray_index]
                if dot(self.pieces[i], ray) != dot(self.pieces[j], ray):
                    return False
        return True

    def is_concave(self) -> bool:
        """Nef criterion: every m_sigma satisfies all ray inequalities."""
        ray_values = {}
        for c, cone in enumerate(self.fan.cones):
            for i in cone:
                ray_values[i] = dot(self.pieces[c], self.fan.rays[i])
        return all(dot(m, self.fan.rays[i]) >= value
                   for m in self.pieces for i, value in ray_values.items())


@dataclass(frozen=True)
class TorusDivisor:
    """D = sum a_i D_i over the rays u_i of a fan."""
    fan: Fan
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.fan.rays):
            raise DimensionMismatch(
                f"{len(self.coeffs)} coefficients given for {len(self.fan.rays)} rays"
            )

    def __add__(self, other: 'TorusDivisor') -> 'TorusDivisor':
        if other.fan != self.fan:
            raise DimensionMismatch("Divisors live on different fans")
        return TorusDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    @classmethod
    def from_polytope(cls, polytope: LatticePolytope) -> 'TorusDivisor':
        """The divisor on the normal fan of P whose polytope is P."""
        fan = normal_fan(polytope)
        coeffs = []
        for ray in fan.rays:
            level = min(dot(v, ray) for v in polytope.vertices)
            if level.denominator != 1:
                raise NonCartier(f"Polytope is not a lattice polytope along ray {ray}")
            coeffs.append(-int(level))
        return cls(fan, tuple(coeffs))

    def support_function(self) -> SupportFunction:
        pieces = []
        for index, cone in enumerate(self.fan.cones):
            rows = [self.fan.rays[i] for i in cone]
            rhs = [-self.coeffs[i] for i in cone]
            m = solve_consistent(rows, rhs, self.fan.dimension)
            if m is None:
                raise NonCartier(f"Cone {index} admits no linear form with psi(u_i) = -a_i")
            if len(cone) < self.fan.dimension or rank(rows, self.fan.dimension) < self.fan.dimension:
                logger.debug("Cone %s is not full-dimensional; linear form is not unique", index)
            if any(c.denominator != 1 for c in m):
                raise NonCartier(f"Cone {index} needs a non-integral form {m}")
            pieces.append(m)
        return SupportFunction(self.fan, tuple(pieces))

    def polytope(self) -> LatticePolytope:
        return polytope_from_divisor(self)


# ---- operations -----------------------------------------------------------------

def polytope_from_divisor(div: TorusDivisor) -> LatticePolytope:
    """
    Delta_D = {x : <x, u_i> >= -a_i for every ray u_i}.
    """
    if not div.fan.complete:
        raise IncompleteFan("Polytope of a divisor is only defined on a complete fan")
    div.support_function()
    inequalities = [(ray, -a) for ray, a in zip(div.fan.rays, div.coeffs)]
    return LatticePolytope.from_inequalities(div.fan.dimension, inequalities)


def support_function_eval(div: TorusDivisor, u: Sequence) -> Fraction:
    """psi_D(u) as the minimum of <v, u> over the vertices of Delta_D."""
    point = rational_point(u)
    polytope = polytope_from_divisor(div)
    return min(dot(v, point) for v in polytope.vertices)


def normal_fan(polytope: LatticePolytope) -> Fan:
    """Inner normal fan of a full-dimensional polytope; complete by construction."""
    if not polytope.is_full_dimensional:
        raise DegeneratePolytope("Normal fan needs a full-dimensional polytope")
    facets = polytope.facets()
    rays = tuple(polytope.inequalities[index][0] for index, _ in facets)
    cones = []
    for vertex_index in range(len(polytope.vertices)):
        cones.append(tuple(i for i, (_, tight) in enumerate(facets) if vertex_index in tight))
    return Fan(rays=rays, cones=tuple(cones), complete=True)


def projective_space_fan(d: int) -> Fan:
    """Rays e_1, ..., e_d, -(e_1 + ... + e_d); every d-subset spans a cone."""
    if d < 1:
        raise ValueError("Projective space needs d >= 1")
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    rays.append(tuple(-1 for _ in range(d)))
    cones = tuple(itertools.combinations(range(d + 1), d))
    return Fan(rays=tuple(rays), cones=cones, complete=True)


def hirzebruch_fan(a: int) -> Fan:
    rays = ((1, 0), (0, 1), (-1, int(a)), (0, -1))
    cones = ((0, 1), (1, 2), (2, 3), (3, 0))
    return Fan(rays=rays, cones=cones, complete=True)


@dataclass(frozen=True)
class ConeCheck:
    index: int
    rays: Tuple[LatticePoint, ...]
    determinant: Optional[int]
    smooth: bool
    strict: bool


@dataclass(frozen=True)
class FanReport:
    cones: Tuple[ConeCheck, ...]
    smooth: bool
    strict: bool
    complete: bool

    def as_rows(self):
        return [
            {
                'cone': c.index,
                'rays': ' '.join(str(list(r)) for r in c.rays),
                'determinant': c.determinant,
                'smooth': c.smooth,
                'strict': c.strict,
            }
            for c in self.cones
        ]


def validate_smooth_fan(fan: Fan) -> FanReport:
    """
    A maximal cone is smooth when its rays form a Z-basis, i.e. there are d
    of them with determinant +-1.
    """
    checks = []
    for index, cone in enumerate(fan.maximal_cones()):
        det = None
        if len(cone.rays) == cone.dimension:
            det = int(determinant(list(cone.rays)))
        checks.append(ConeCheck(
            index=index,
            rays=cone.rays,
            determinant=det,
            smooth=det is not None and abs(det) == 1,
            strict=cone.is_strict(),
        ))
    report = FanReport(
        cones=tuple(checks),
        smooth=all(c.smooth for c in checks),
        strict=all(c.strict for c in checks),
        complete=fan.complete,
    )
    if not report.smooth:
        logger.info("Fan is not smooth: %s",
                    [c.index for c in checks if not c.smooth])
    return report
