"""
The region Theta = {x in the polytope : g_check(x) >= 0}.
"""
import logging
from typing import Optional, Sequence

import numpy as np
from django.db import models

from metric_models.metrics import MetricModel

from .options import ConjugateOptions
from .solver import conjugate_batch, conjugate_eval

logger = logging.getLogger(__name__)


class ThetaMembership(models.TextChoices):
    IN = 'in', 'Inside'
    OUT = 'out', 'Outside'
    BOUNDARY = 'boundary', 'Boundary within tolerance'


def classify_value(value: float, tol: float) -> ThetaMembership:
    if value >= tol:
        return ThetaMembership.IN
    if value <= -tol:
        return ThetaMembership.OUT
    return ThetaMembership.BOUNDARY


def theta_membership(m: MetricModel, x: Sequence, tol: Optional[float] = None,
                     opts: Optional[ConjugateOptions] = None) -> ThetaMembership:
    opts = opts or ConjugateOptions.from_config()
    tol = opts.value_tolerance if tol is None else tol
    return classify_value(conjugate_eval(m, x, opts).value, tol)


class ThetaRegion:
    """Membership oracle for Theta inside the reference polytope of a metric."""

    def __init__(self, metric: MetricModel, tol: Optional[float] = None,
                 opts: Optional[ConjugateOptions] = None):
        self.metric = metric
        self.opts = opts or ConjugateOptions.from_config()
        self.tol = self.opts.value_tolerance if tol is None else tol

    @property
    def polytope(self):
        return self.metric.reference_polytope

    def membership(self, x: Sequence) -> ThetaMembership:
        return theta_membership(self.metric, x, self.tol, self.opts)

    def __contains__(self, x) -> bool:
        return self.membership(x) != ThetaMembership.OUT

    def sample_polytope(self, samples: int, seed: int = 0) -> np.ndarray:
        """Random points of the polytope as Dirichlet mixtures of its vertices."""
        rng = np.random.default_rng(seed)
        vertices = np.array(self.polytope.vertices, dtype=float)
        weights = rng.dirichlet(np.ones(len(vertices)), size=samples)
        return weights @ vertices

    def concavity_defect(self, samples: int = 1000, seed: int = 0) -> float:
        """
        Largest (g(x) + g(y))/2 - g((x + y)/2) over random pairs; g_check is
        concave so this stays below the solver tolerance, and Theta is convex.
        """
        x = self.sample_polytope(samples, seed)
        y = self.sample_polytope(samples, seed + 1)
        gx = conjugate_batch(self.metric, x, self.opts)
        gy = conjugate_batch(self.metric, y, self.opts)
        gm = conjugate_batch(self.metric, (x + y) / 2, self.opts)
        return float(np.max((gx + gy) / 2 - gm))

    def sampled_fraction(self, samples: int = 1000, seed: int = 0) -> float:
        """Fraction of random polytope points lying in Theta."""
        values = conjugate_batch(self.metric, self.sample_polytope(samples, seed), self.opts)
        return float(np.mean(values >= -self.tol))
