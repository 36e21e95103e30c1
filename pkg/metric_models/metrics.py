"""
Torus-invariant metrics in logarithmic coordinates.

A metric on O(D) is represented by the concave function g on R^d with
g(u) = log ||s(exp(-u))||. Oracles accept a single point of shape (d,)
or a batch of shape (n, d).
"""
import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from lattice_core.fan import TorusDivisor, polytope_from_divisor
from lattice_core.linalg import dot, rational_point
from lattice_core.polytope import LatticePolytope, minkowski_sum, standard_simplex
from toricvol.exceptions import (
    DimensionMismatch,
    DomainMismatch,
    EmptyPolytope,
    NotSmooth,
)

logger = logging.getLogger(__name__)


def _as_batch(u, dimension: int):
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise DimensionMismatch(f"Expected points of dimension {dimension}, got shape {np.shape(u)}")
    return arr, single


def _unbatch(values, single):
    return values[0] if single else values


def _face_vertices(points: Sequence, direction: Sequence) -> list:
    """Points minimizing <m, direction>, compared exactly."""
    levels = [dot(p, direction) for p in points]
    lowest = min(levels)
    return [i for i, level in enumerate(levels) if level == lowest]


class CanonicalSplit(NamedTuple):
    smooth: Optional['MetricModel']
    polytope: Optional[LatticePolytope]
    shift: float


class MetricModel(ABC):
    """
    Base class for metric models. Subclasses set dimension,
    reference_polytope, smooth and strictly_positive.
    """
    dimension: int
    reference_polytope: LatticePolytope
    smooth: bool = True
    strictly_positive: bool = False

    @abstractmethod
    def evaluate(self, u):
        """g(u)"""

    @abstractmethod
    def gradient(self, u):
        """grad g(u)"""

    @abstractmethod
    def hessian(self, u):
        """Hess g(u), symmetric negative semi-definite"""

    @abstractmethod
    def restrict_to_face(self, direction: Sequence) -> 'MetricModel':
        """
        The model whose polytope is the face of the reference polytope where
        <., direction> is minimal. g(u + t*direction) - t*b converges to it
        as t -> +infinity.
        """

    def constant_conjugate(self) -> Optional[float]:
        """The constant value of the conjugate on the polytope, for canonical-type models."""
        return None

    def canonical_split(self) -> Optional[CanonicalSplit]:
        """
        Write g = smooth + psi_Q - shift, where psi_Q is the support function
        of a polytope Q. None when the model has no such form.
        """
        return CanonicalSplit(self, None, 0.0) if self.smooth else None

    def support_function(self, u):
        """psi(u) = min over vertices <v, u> of the reference polytope."""
        arr, single = _as_batch(u, self.dimension)
        vertices = np.array(self.reference_polytope.vertices, dtype=float)
        return _unbatch(np.min(arr @ vertices.T, axis=1), single)

    def __call__(self, u):
        return self.evaluate(u)

    def describe(self) -> str:
        return type(self).__name__


class LogSumExpMetric(MetricModel):
    """
    g(u) = -(1/lam) * log sum_m w_m exp(-lam <m, u>)

    With unit weights, lam = 2 and the simplex vertices as points this is the
    Fubini-Study metric of projective space.
    """

    def __init__(self, points: Sequence, weights: Optional[Sequence[float]] = None,
                 sharpness: float = 2.0, reference_polytope: Optional[LatticePolytope] = None):
        self.points = tuple(rational_point(p) for p in points)
        if not self.points:
            raise EmptyPolytope("A log-sum-exp metric needs at least one point")
        self.dimension = len(self.points[0])
        if any(len(p) != self.dimension for p in self.points):
            raise DimensionMismatch("Metric points have inconsistent dimensions")

        weights = np.ones(len(self.points)) if weights is None else np.asarray(weights, dtype=float)
        if weights.shape != (len(self.points),):
            raise DimensionMismatch(f"{weights.size} weights given for {len(self.points)} points")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("Weights must be positive and finite")
        if not sharpness > 0:
            raise ValueError("Sharpness must be positive")

        hull = LatticePolytope.from_vertices(self.points)
        if reference_polytope is not None:
            if set(reference_polytope.vertices) != set(hull.vertices):
                raise DomainMismatch(
                    f"Convex hull of the points is {hull}, expected {reference_polytope}"
                )
            hull = reference_polytope

        self.weights = weights
        self.sharpness = float(sharpness)
        self.reference_polytope = hull
        self.smooth = True
        self.strictly_positive = hull.is_full_dimensional
        self._points = np.array(self.points, dtype=float)
        self._log_weights = np.log(weights)

    def _exponents(self, arr):
        return self._log_weights - self.sharpness * (arr @ self._points.T)

    def _probabilities(self, arr):
        z = self._exponents(arr)
        return np.exp(z - logsumexp(z, axis=1, keepdims=True))

    def evaluate(self, u):
        arr, single = _as_batch(u, self.dimension)
        return _unbatch(-logsumexp(self._exponents(arr), axis=1) / self.sharpness, single)

    def gradient(self, u):
        arr, single = _as_batch(u, self.dimension)
        return _unbatch(self._probabilities(arr) @ self._points, single)

    def hessian(self, u):
        # -lam times the covariance of the points under the Gibbs weights
        arr, single = _as_batch(u, self.dimension)
        p = self._probabilities(arr)
        centred = self._points[None, :, :] - (p @ self._points)[:, None, :]
        cov = np.einsum('nk,nki,nkj->nij', p, centred, centred)
        return _unbatch(-self.sharpness * cov, single)

    def restrict_to_face(self, direction):
        direction = rational_point(direction)
        if not any(direction):
            return self
        kept = _face_vertices(self.points, direction)
        return LogSumExpMetric(
            [self.points[i] for i in kept],
            self.weights[kept],
            self.sharpness,
        )

    def describe(self):
        return f"logsumexp(sharpness={self.sharpness:g}, points={len(self.points)})"


class CanonicalMetric(MetricModel):
    """g = psi_D. Not differentiable; the conjugate is 0 on the polytope."""

    def __init__(self, polytope: LatticePolytope, divisor: Optional[TorusDivisor] = None):
        self.reference_polytope = polytope
        self.divisor = divisor
        self.dimension = polytope.dimension
        self.smooth = False
        self.strictly_positive = False
        self._vertices = np.array(polytope.vertices, dtype=float)

    def evaluate(self, u):
        arr, single = _as_batch(u, self.dimension)
        return _unbatch(np.min(arr @ self._vertices.T, axis=1), single)

    def evaluate_exact(self, u) -> Fraction:
        point = rational_point(u)
        return min(dot(v, point) for v in self.reference_polytope.vertices)

    def gradient(self, u):
        raise NotSmooth("The canonical metric has no gradient oracle")

    def hessian(self, u):
        raise NotSmooth("The canonical metric has no Hessian oracle")

    def restrict_to_face(self, direction):
        direction = rational_point(direction)
        if not any(direction):
            return self
        vertices = self.reference_polytope.vertices
        kept = _face_vertices(vertices, direction)
        return CanonicalMetric(LatticePolytope.from_vertices([vertices[i] for i in kept]))

    def constant_conjugate(self):
        return 0.0

    def canonical_split(self):
        return CanonicalSplit(None, self.reference_polytope, 0.0)

    @property
    def is_trivial(self) -> bool:
        """Canonical metric of the zero divisor, i.e. g == 0."""
        return self.reference_polytope.vertices == (tuple(Fraction(0) for _ in range(self.dimension)),)

    def describe(self):
        return "canonical"


class ScaledMetric(MetricModel):
    """g - shift; the conjugate moves up by shift."""

    def __init__(self, base: MetricModel, shift: float):
        self.base = base
        self.shift = float(shift)
        self.dimension = base.dimension
        self.reference_polytope = base.reference_polytope
        self.smooth = base.smooth
        self.strictly_positive = base.strictly_positive

    def evaluate(self, u):
        return self.base.evaluate(u) - self.shift

    def gradient(self, u):
        return self.base.gradient(u)

    def hessian(self, u):
        return self.base.hessian(u)

    def restrict_to_face(self, direction):
        return ScaledMetric(self.base.restrict_to_face(direction), self.shift)

    def constant_conjugate(self):
        value = self.base.constant_conjugate()
        return None if value is None else value + self.shift

    def canonical_split(self):
        split = self.base.canonical_split()
        if split is None:
            return None
        return split._replace(shift=split.shift + self.shift)

    def describe(self):
        return f"{self.base.describe()} scaled by {self.shift:g}"


class SumMetric(MetricModel):
    """Tensor product of metrics: g = g1 + g2 on O(D1 + D2)."""

    def __init__(self, first: MetricModel, second: MetricModel):
        if first.dimension != second.dimension:
            raise DimensionMismatch(
                f"Cannot add metrics of dimensions {first.dimension} and {second.dimension}"
            )
        self.first = first
        self.second = second
        self.dimension = first.dimension
        self.reference_polytope = minkowski_sum(first.reference_polytope, second.reference_polytope)
        self.smooth = first.smooth and second.smooth
        self.strictly_positive = first.strictly_positive or second.strictly_positive

    def evaluate(self, u):
        return self.first.evaluate(u) + self.second.evaluate(u)

    def gradient(self, u):
        return self.first.gradient(u) + self.second.gradient(u)

    def hessian(self, u):
        return self.first.hessian(u) + self.second.hessian(u)

    def restrict_to_face(self, direction):
        return SumMetric(self.first.restrict_to_face(direction), self.second.restrict_to_face(direction))

    def constant_conjugate(self):
        a = self.first.constant_conjugate()
        b = self.second.constant_conjugate()
        if a is None or b is None:
            return None
        return a + b

    def canonical_split(self):
        a = self.first.canonical_split()
        b = self.second.canonical_split()
        if a is None or b is None:
            return None
        smooth = [s for s in (a.smooth, b.smooth) if s is not None]
        polytopes = [q for q in (a.polytope, b.polytope) if q is not None]
        return CanonicalSplit(
            smooth[0] if len(smooth) == 1 else (SumMetric(*smooth) if smooth else None),
            polytopes[0] if len(polytopes) == 1 else (minkowski_sum(*polytopes) if polytopes else None),
            a.shift + b.shift,
        )

    def describe(self):
        return f"({self.first.describe()}) + ({self.second.describe()})"


# ---- constructors ------------------------------------------------------------------

def log_sum_exp_metric(points, weights=None, sharpness: float = 2.0,
                       reference_polytope: Optional[LatticePolytope] = None) -> LogSumExpMetric:
    return LogSumExpMetric(points, weights, sharpness, reference_polytope)


def canonical_metric(div: TorusDivisor) -> CanonicalMetric:
    return CanonicalMetric(polytope_from_divisor(div), divisor=div)


def fubini_study(d: int) -> LogSumExpMetric:
    simplex = standard_simplex(d)
    return LogSumExpMetric(simplex.vertices, None, 2.0, simplex)


def sharpened_fubini_study(d: int, k: int) -> LogSumExpMetric:
    """Fubini-Study with sharpness 2k; converges uniformly to the canonical metric."""
    if k < 1:
        raise ValueError("Sharpening factor must be a positive integer")
    simplex = standard_simplex(d)
    return LogSumExpMetric(simplex.vertices, None, 2.0 * k, simplex)


def fubini_study_sharpening(m: MetricModel) -> Optional[int]:
    """k if m is the Fubini-Study metric of P^d sharpened by k (k = 1: plain), else None."""
    if not isinstance(m, LogSumExpMetric) or not np.all(m.weights == 1.0):
        return None
    if set(m.points) != set(standard_simplex(m.dimension).vertices) or len(m.points) != m.dimension + 1:
        return None
    k = m.sharpness / 2.0
    return int(k) if k == int(k) and k >= 1 else None


def scale_metric(m: MetricModel, shift: float) -> MetricModel:
    """g -> g - shift, so the conjugate shifts by +shift."""
    if shift == 0:
        return m
    if isinstance(m, ScaledMetric):
        return scale_metric(m.base, m.shift + shift)
    return ScaledMetric(m, shift)


def add_metrics(m1: MetricModel, m2: MetricModel) -> MetricModel:
    if m1.dimension != m2.dimension:
        raise DimensionMismatch(f"Cannot add metrics of dimensions {m1.dimension} and {m2.dimension}")
    if isinstance(m2, CanonicalMetric) and m2.is_trivial:
        return m1
    if isinstance(m1, CanonicalMetric) and m1.is_trivial:
        return m2
    return SumMetric(m1, m2)


# ---- sampled diagnostics ----------------------------------------------------------

def _sample_box(dimension, radius, samples, seed):
    rng = np.random.default_rng(seed)
    points = rng.uniform(-radius, radius, size=(samples, dimension))
    return np.vstack([np.zeros((1, dimension)), points])


def sup_distance(m1: MetricModel, m2: MetricModel, radius: float = 40.0,
                 samples: int = 2000, seed: int = 0) -> float:
    """Sampled sup |g1 - g2| over the box of the given radius."""
    if m1.dimension != m2.dimension:
        raise DimensionMismatch("Metrics live in different dimensions")
    box = _sample_box(m1.dimension, radius, samples, seed)
    return float(np.max(np.abs(m1.evaluate(box) - m2.evaluate(box))))


def support_deviation(m: MetricModel, radius: float = 40.0,
                      samples: int = 2000, seed: int = 0) -> float:
    """Sampled sup |g - psi| over the box; bounded in radius for a genuine metric."""
    box = _sample_box(m.dimension, radius, samples, seed)
    return float(np.max(np.abs(m.evaluate(box) - m.support_function(box))))


def concavity_defect(m: MetricModel, radius: float = 10.0,
                     samples: int = 1000, seed: int = 0) -> float:
    """Largest t*g(u) + (1-t)*g(v) - g(t*u + (1-t)*v) over random triples."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-radius, radius, size=(samples, m.dimension))
    v = rng.uniform(-radius, radius, size=(samples, m.dimension))
    t = rng.uniform(0.0, 1.0, size=(samples, 1))
    chord = t[:, 0] * m.evaluate(u) + (1 - t[:, 0]) * m.evaluate(v)
    return float(np.max(chord - m.evaluate(t * u + (1 - t) * v)))
