import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given
from hypothesis.strategies import floats

from lattice_core.fan import TorusDivisor, projective_space_fan
from lattice_core.polytope import standard_simplex
from metric_models.metrics import (
    CanonicalMetric,
    LogSumExpMetric,
    add_metrics,
    canonical_metric,
    concavity_defect,
    fubini_study,
    log_sum_exp_metric,
    scale_metric,
    sharpened_fubini_study,
    sup_distance,
    support_deviation,
)
from toricvol.exceptions import DimensionMismatch, DomainMismatch, NotSmooth


class LogSumExpMetricTest(SimpleTestCase):
    """Closed-form log-sum-exp oracles"""

    def setUp(self):
        self.fs1 = fubini_study(1)
        self.fs2 = fubini_study(2)

    def test_value_at_origin(self):
        self.assertAlmostEqual(self.fs1.evaluate([0.0]), -0.5 * math.log(2), places=12)
        self.assertAlmostEqual(self.fs2.evaluate([0.0, 0.0]), -0.5 * math.log(3), places=12)

    def test_asymptotics_match_support_function(self):
        self.assertAlmostEqual(self.fs1.evaluate([30.0]), 0.0, places=12)
        self.assertAlmostEqual(self.fs1.evaluate([-30.0]), -30.0, places=12)

    def test_single_point_is_linear(self):
        m = log_sum_exp_metric([(2, -1)])
        self.assertFalse(m.strictly_positive)
        for u in ([0.5, 1.0], [-3.0, 2.0]):
            self.assertAlmostEqual(m.evaluate(u), 2 * u[0] - u[1], places=12)

    def test_batch_shapes(self):
        u = np.zeros((5, 2))
        self.assertEqual(self.fs2.evaluate(u).shape, (5,))
        self.assertEqual(self.fs2.gradient(u).shape, (5, 2))
        self.assertEqual(self.fs2.hessian(u).shape, (5, 2, 2))
        with self.assertRaises(DimensionMismatch):
            self.fs2.evaluate([0.0, 0.0, 0.0])

    def test_gradient_at_origin_is_barycentre(self):
        np.testing.assert_allclose(self.fs1.gradient([0.0]), [0.5])
        np.testing.assert_allclose(self.fs2.gradient([0.0, 0.0]), [1 / 3, 1 / 3])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-4
        for m in (self.fs1, self.fs2, sharpened_fubini_study(2, 3),
                  log_sum_exp_metric([(0, 0), (2, 0), (0, 1), (1, 1)], [1.0, 0.5, 2.0, 3.0], 1.5)):
            for u in rng.uniform(-5, 5, size=(100, m.dimension)):
                fd = np.array([(m.evaluate(u + h * e) - m.evaluate(u - h * e)) / (2 * h)
                               for e in np.eye(m.dimension)])
                grad = m.gradient(u)
                self.assertLessEqual(np.max(np.abs(fd - grad)), 1e-5 * max(1.0, np.max(np.abs(grad))))

    def test_hessian_matches_gradient_differences(self):
        rng = np.random.default_rng(12)
        h = 1e-4
        for u in rng.uniform(-3, 3, size=(100, 2)):
            hess = self.fs2.hessian(u)
            fd = np.array([(self.fs2.gradient(u + h * e) - self.fs2.gradient(u - h * e)) / (2 * h)
                           for e in np.eye(2)])
            np.testing.assert_allclose(hess, hess.T, atol=1e-14)
            self.assertLessEqual(np.max(np.abs(fd - hess)), 1e-5 * max(1.0, np.max(np.abs(hess))))

    def test_negative_hessian_is_positive_definite(self):
        rng = np.random.default_rng(13)
        for u in rng.uniform(-3, 3, size=(100, 2)):
            np.linalg.cholesky(-self.fs2.hessian(u))

    def test_concavity(self):
        for m in (self.fs1, self.fs2, sharpened_fubini_study(1, 5)):
            self.assertLessEqual(concavity_defect(m, samples=1000, seed=3), 1e-9)

    def test_bounded_distance_to_support_function(self):
        deviations = [support_deviation(self.fs2, radius=r, samples=500, seed=1) for r in (10, 20, 40)]
        self.assertAlmostEqual(deviations[0], 0.5 * math.log(3), places=10)
        self.assertLessEqual(deviations[2], deviations[1] + 1e-12)
        self.assertLessEqual(deviations[1], deviations[0] + 1e-12)

    def test_points_must_span_the_reference_polytope(self):
        with self.assertRaises(DomainMismatch):
            LogSumExpMetric([(0,), (1,)], reference_polytope=standard_simplex(1).dilate(2))

    def test_interior_points_are_allowed(self):
        m = LogSumExpMetric([(0,), (1,), (2,)], reference_polytope=standard_simplex(1).dilate(2))
        self.assertTrue(m.strictly_positive)

    def test_rejects_bad_weights(self):
        with self.assertRaises(ValueError):
            LogSumExpMetric([(0,), (1,)], weights=[1.0, 0.0])

    def test_face_restriction(self):
        face = self.fs2.restrict_to_face((0, 1))
        self.assertEqual(set(face.points), {(0, 0), (1, 0)})
        self.assertIs(self.fs2.restrict_to_face((0, 0)), self.fs2)

    @given(floats(min_value=-200, max_value=200))
    def test_projective_line_sandwich(self, u):
        """psi - log(2)/2 <= g <= psi"""
        g = self.fs1.evaluate([u])
        psi = min(0.0, u)
        self.assertLessEqual(g, psi + 1e-12)
        self.assertGreaterEqual(g, psi - 0.5 * math.log(2) - 1e-12)


class CanonicalMetricTest(SimpleTestCase):

    def test_projective_line(self):
        m = canonical_metric(TorusDivisor(projective_space_fan(1), (0, 1)))
        self.assertEqual(m.evaluate([2.5]), 0.0)
        self.assertEqual(m.evaluate([-1.5]), -1.5)
        self.assertEqual(m.evaluate_exact([0]), 0)
        self.assertFalse(m.smooth)
        self.assertFalse(m.strictly_positive)

    def test_projective_plane(self):
        m = canonical_metric(TorusDivisor(projective_space_fan(2), (0, 0, 1)))
        np.testing.assert_allclose(m.evaluate([[1.0, 2.0], [-1.0, 3.0], [2.0, -4.0]]), [0.0, -1.0, -4.0])

    def test_no_derivatives(self):
        m = CanonicalMetric(standard_simplex(1))
        with self.assertRaises(NotSmooth):
            m.gradient([0.0])
        with self.assertRaises(NotSmooth):
            m.hessian([0.0])

    def test_conjugate_constant(self):
        self.assertEqual(CanonicalMetric(standard_simplex(2)).constant_conjugate(), 0.0)


class MetricAlgebraTest(SimpleTestCase):

    def setUp(self):
        self.fs1 = fubini_study(1)

    def test_zero_shift_is_identity(self):
        self.assertIs(scale_metric(self.fs1, 0), self.fs1)

    def test_shift_lowers_g(self):
        shifted = scale_metric(self.fs1, 1.0)
        for u in (-2.0, 0.0, 3.0):
            self.assertAlmostEqual(shifted.evaluate([u]), self.fs1.evaluate([u]) - 1.0, places=14)
        self.assertEqual(scale_metric(shifted, 0.5).shift, 1.5)

    def test_shifted_canonical_has_shifted_conjugate(self):
        m = scale_metric(CanonicalMetric(standard_simplex(1)), 0.25)
        self.assertEqual(m.constant_conjugate(), 0.25)

    def test_sum_of_projective_line_metrics(self):
        total = add_metrics(self.fs1, self.fs1)
        self.assertEqual(total.reference_polytope.vertices, ((0,), (2,)))
        for u in (-3.0, -0.2, 0.0, 1.7):
            self.assertAlmostEqual(total.evaluate([u]), -math.log1p(math.exp(-2 * u)), places=12)
        self.assertTrue(total.strictly_positive)

    def test_zero_divisor_is_neutral(self):
        zero = canonical_metric(TorusDivisor(projective_space_fan(1), (0, 0)))
        self.assertIs(add_metrics(self.fs1, zero), self.fs1)
        self.assertIs(add_metrics(zero, self.fs1), self.fs1)

    def test_sum_with_shifted_metric_is_pointwise(self):
        other = scale_metric(sharpened_fubini_study(1, 2), -0.3)
        total = add_metrics(self.fs1, other)
        u = np.random.default_rng(5).uniform(-4, 4, size=(10, 1))
        np.testing.assert_allclose(total.evaluate(u), self.fs1.evaluate(u) + other.evaluate(u))

    def test_sum_with_canonical_is_not_smooth_but_positive(self):
        total = add_metrics(self.fs1, CanonicalMetric(standard_simplex(1)))
        self.assertFalse(total.smooth)
        self.assertTrue(total.strictly_positive)
        split = scale_metric(total, 0.2).canonical_split()
        self.assertIs(split.smooth, self.fs1)
        self.assertEqual(split.polytope.vertices, standard_simplex(1).vertices)
        self.assertAlmostEqual(split.shift, 0.2)
        u = np.linspace(-3, 3, 7)[:, None]
        np.testing.assert_allclose(
            total.evaluate(u), self.fs1.evaluate(u) + np.minimum(0.0, u[:, 0]))

    def test_canonical_sums_split_into_one_polytope(self):
        canonical = CanonicalMetric(standard_simplex(1))
        split = add_metrics(canonical, scale_metric(canonical, -0.5)).canonical_split()
        self.assertIsNone(split.smooth)
        self.assertEqual(len(split.polytope.vertices), 2)
        self.assertAlmostEqual(split.shift, -0.5)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            add_metrics(self.fs1, fubini_study(2))

    def test_sharpened_family_converges_to_canonical(self):
        canonical = CanonicalMetric(standard_simplex(1))
        distances = [sup_distance(sharpened_fubini_study(1, k), canonical, radius=20, samples=500)
                     for k in (1, 2, 4, 8)]
        for k, distance in zip((1, 2, 4, 8), distances):
            self.assertAlmostEqual(distance, math.log(2) / (2 * k), places=10)
