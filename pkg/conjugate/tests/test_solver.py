import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from conjugate.options import ConjugateOptions
from conjugate.solver import (
    conjugate_batch,
    conjugate_eval,
    conjugate_grid,
    conjugate_max,
    fenchel_young_residual,
    sup_norm_monomial,
)
from conjugate.theta import ThetaMembership, ThetaRegion, theta_membership
from lattice_core.fan import TorusDivisor, projective_space_fan
from lattice_core.polytope import standard_simplex
from metric_models.metrics import (
    CanonicalMetric,
    add_metrics,
    canonical_metric,
    fubini_study,
    scale_metric,
)
from toricvol.exceptions import NoConvergence, NotInDomain, NotSmooth

F = Fraction


def half_entropy(*weights):
    """Conjugate of Fubini-Study: half the Shannon entropy of the barycentric weights."""
    return -0.5 * sum(w * math.log(w) for w in weights if w > 0)


class ConjugateEvalTest(SimpleTestCase):
    """Newton and face-restricted conjugates against closed forms"""

    def setUp(self):
        self.fs1 = fubini_study(1)
        self.fs2 = fubini_study(2)
        self.canonical = canonical_metric(TorusDivisor(projective_space_fan(1), (0, 1)))

    def test_midpoint_of_projective_line(self):
        result = conjugate_eval(self.fs1, (F(1, 2),))
        self.assertAlmostEqual(result.value, 0.5 * math.log(2), delta=1e-10)
        self.assertTrue(result.converged)
        self.assertLessEqual(result.residual, 1e-9)
        self.assertEqual(result.method, 'newton')
        self.assertAlmostEqual(float(result.minimizer[0]), 0.0, places=8)

    def test_entropy_on_the_line(self):
        for x in (0.01, 0.2, 0.5, 0.77, 0.999):
            self.assertAlmostEqual(conjugate_eval(self.fs1, (x,)).value, half_entropy(x, 1 - x), delta=1e-9)

    def test_endpoints_are_zero(self):
        for x in (0, 1):
            result = conjugate_eval(self.fs1, (F(x),))
            self.assertAlmostEqual(result.value, 0.0, delta=1e-14)
            self.assertTrue(result.at_infinity)
            self.assertEqual(result.method, 'vertex')

    def test_canonical_is_zero_on_the_polytope(self):
        for x in (F(0), F(1, 3), F(1)):
            result = conjugate_eval(self.canonical, (x,))
            self.assertEqual(result.value, 0.0)
            self.assertEqual(result.method, 'exact')

    def test_outside_the_polytope(self):
        with self.assertRaises(NotInDomain):
            conjugate_eval(self.fs1, (F(3, 2),))
        with self.assertRaises(NotInDomain):
            conjugate_eval(self.canonical, (-0.1,))

    def test_projective_plane_interior(self):
        for x in [(F(1, 3), F(1, 3)), (F(1, 5), F(1, 2)), (0.05, 0.9)]:
            x0 = 1 - float(x[0]) - float(x[1])
            self.assertAlmostEqual(conjugate_eval(self.fs2, x).value,
                                   half_entropy(float(x[0]), float(x[1]), x0), delta=1e-9)

    def test_projective_plane_edges(self):
        result = conjugate_eval(self.fs2, (F(1, 2), F(0)))
        self.assertAlmostEqual(result.value, 0.5 * math.log(2), delta=1e-10)
        self.assertEqual(result.method, 'face')
        hyp = conjugate_eval(self.fs2, (F(1, 4), F(3, 4)))
        self.assertAlmostEqual(hyp.value, half_entropy(0.25, 0.75), delta=1e-10)

    def test_sum_with_canonical_has_a_plateau(self):
        # g_check(x) is the max of the entropy conjugate over y in [0, 1] with x - y in [0, 1]
        m = add_metrics(self.fs1, CanonicalMetric(standard_simplex(1)))
        plateau = 0.5 * math.log(2)
        expected = {F(0): 0.0, F(1, 4): half_entropy(0.25, 0.75), F(1, 2): plateau, F(1): plateau,
                    F(5, 4): plateau, F(7, 4): half_entropy(0.75, 0.25), F(2): 0.0}
        for x, value in expected.items():
            with self.subTest(x=x):
                result = conjugate_eval(m, (x,))
                self.assertTrue(result.converged)
                self.assertAlmostEqual(result.value, value, delta=1e-7)
        self.assertEqual(conjugate_eval(m, (F(1),)).method, 'constrained')
        shifted = conjugate_eval(scale_metric(m, 0.3), (F(1),))
        self.assertAlmostEqual(shifted.value, plateau + 0.3, delta=1e-7)

    def test_shift_rule(self):
        rng = np.random.default_rng(21)
        points = rng.dirichlet(np.ones(3), size=20)[:, :2]
        base = conjugate_batch(self.fs2, points)
        for shift in (0.1, 1.0):
            shifted = conjugate_batch(scale_metric(self.fs2, shift), points)
            np.testing.assert_allclose(shifted, base + shift, atol=1e-8)

    def test_batch_agrees_with_scalar(self):
        rng = np.random.default_rng(22)
        points = np.vstack([rng.dirichlet(np.ones(3), size=30)[:, :2], [[0.0, 0.0], [0.5, 0.5], [0.0, 0.25]]])
        batch = conjugate_batch(self.fs2, points)
        for point, value in zip(points, batch):
            self.assertAlmostEqual(value, conjugate_eval(self.fs2, tuple(point)).value, delta=1e-9)

    def test_brute_force_oracle_on_the_line(self):
        """Newton against a dense u-grid minimization"""
        u = np.arange(-30.0, 30.0 + 5e-4, 1e-3)
        g = self.fs1.evaluate(u[:, None])
        xs = np.linspace(0.0, 1.0, 101)
        newton = conjugate_batch(self.fs1, xs[:, None])
        brute = np.array([np.min(x * u - g) for x in xs])
        self.assertLessEqual(np.max(np.abs(newton - brute)), 1e-4)

    def test_options_validation(self):
        with self.assertRaises(ValueError):
            ConjugateOptions(residual_tolerance=0)
        self.assertEqual(ConjugateOptions.from_config(max_iterations=5).max_iterations, 5)


class ConjugateMaxTest(SimpleTestCase):

    def test_projective_line(self):
        value, argmax = conjugate_max(fubini_study(1))
        self.assertAlmostEqual(value, 0.5 * math.log(2), places=12)
        np.testing.assert_allclose(argmax, [0.5])

    def test_projective_plane(self):
        m = fubini_study(2)
        value, argmax = conjugate_max(m)
        self.assertAlmostEqual(value, 0.5 * math.log(3), places=12)
        np.testing.assert_allclose(argmax, [1 / 3, 1 / 3])
        self.assertAlmostEqual(conjugate_eval(m, tuple(argmax)).value, value, delta=1e-9)

    def test_upper_envelope(self):
        m = fubini_study(2)
        points = np.random.default_rng(23).dirichlet(np.ones(3), size=200)[:, :2]
        self.assertLessEqual(np.max(conjugate_batch(m, points)), conjugate_max(m)[0] + 1e-10)

    def test_canonical_is_rejected(self):
        with self.assertRaises(NotSmooth):
            conjugate_max(CanonicalMetric(standard_simplex(1)))

    def test_sum_with_canonical(self):
        m = add_metrics(fubini_study(1), CanonicalMetric(standard_simplex(1)))
        value, point = conjugate_max(m)
        self.assertAlmostEqual(value, 0.5 * math.log(2), places=12)
        np.testing.assert_allclose(point, [0.5])
        self.assertAlmostEqual(conjugate_eval(m, tuple(point)).value, value, delta=1e-7)


class SupNormTest(SimpleTestCase):

    def setUp(self):
        self.fs1 = fubini_study(1)

    def test_examples(self):
        self.assertAlmostEqual(sup_norm_monomial(self.fs1, (1,), 2), 0.5, delta=1e-10)
        self.assertAlmostEqual(sup_norm_monomial(self.fs1, (0,), 1), 1.0, delta=1e-12)
        canonical = CanonicalMetric(standard_simplex(2))
        for e in [(0, 0), (1, 2), (3, 0)]:
            self.assertEqual(sup_norm_monomial(canonical, e, 3), 1.0)

    def test_sampled_sup_of_the_middle_monomial(self):
        """||z|| / (1 + |z|^2) on C peaks at 1/2"""
        r = np.linspace(0.0, 10.0, 100001)
        self.assertAlmostEqual(np.max(r / (1 + r ** 2)), sup_norm_monomial(self.fs1, (1,), 2), places=8)

    def test_multiplicativity(self):
        for e, l in [((1,), 3), ((2,), 5), ((0,), 2)]:
            base = sup_norm_monomial(self.fs1, e, l)
            for k in range(1, 6):
                scaled = sup_norm_monomial(self.fs1, tuple(k * c for c in e), k * l)
                self.assertAlmostEqual(scaled, base ** k, delta=1e-10)

    def test_outside_dilate(self):
        with self.assertRaises(NotInDomain):
            sup_norm_monomial(self.fs1, (3,), 2)

    def test_rejects_bad_level(self):
        with self.assertRaises(ValueError):
            sup_norm_monomial(self.fs1, (0,), 0)


class FenchelYoungTest(SimpleTestCase):

    def test_inequality(self):
        m = fubini_study(2)
        rng = np.random.default_rng(24)
        xs = rng.dirichlet(np.ones(3), size=20)[:, :2]
        us = rng.uniform(-4, 4, size=(20, 2))
        for x, u in zip(xs, us):
            self.assertGreaterEqual(fenchel_young_residual(m, tuple(x), u), -1e-8)

    def test_equality_at_the_gradient(self):
        m = fubini_study(2)
        for u in ([0.3, -1.2], [2.0, 0.5], [0.0, 0.0]):
            x = tuple(m.gradient(np.array(u)))
            self.assertLessEqual(abs(fenchel_young_residual(m, x, u)), 1e-6)

    def test_canonical_at_origin(self):
        m = CanonicalMetric(standard_simplex(1))
        self.assertEqual(fenchel_young_residual(m, (F(1, 3),), [0.0]), 0.0)


class ThetaTest(SimpleTestCase):

    def setUp(self):
        self.fs1 = fubini_study(1)

    def test_membership_examples(self):
        self.assertEqual(theta_membership(self.fs1, (F(1, 2),)), ThetaMembership.IN)
        self.assertEqual(theta_membership(CanonicalMetric(standard_simplex(1)), (F(1, 2),)),
                         ThetaMembership.BOUNDARY)
        self.assertEqual(theta_membership(scale_metric(self.fs1, -1), (F(1, 2),)), ThetaMembership.OUT)

    def test_vertices_sit_on_the_boundary(self):
        region = ThetaRegion(self.fs1, tol=1e-9)
        self.assertEqual(region.membership((F(0),)), ThetaMembership.BOUNDARY)
        self.assertIn((F(1, 4),), region)

    def test_concavity_and_convexity(self):
        for m in (fubini_study(2), scale_metric(fubini_study(2), -0.3)):
            self.assertLessEqual(ThetaRegion(m).concavity_defect(samples=500, seed=4), 1e-8)

    def test_shrunken_region(self):
        full = ThetaRegion(fubini_study(2)).sampled_fraction(samples=300)
        shrunk = ThetaRegion(scale_metric(fubini_study(2), -0.3)).sampled_fraction(samples=300)
        self.assertEqual(full, 1.0)
        self.assertLess(shrunk, 1.0)
        self.assertGreater(shrunk, 0.0)

    def test_grid_table(self):
        frame = conjugate_grid(self.fs1, resolution=4)
        self.assertEqual(list(frame.columns), ['x1', 'conjugate', 'converged', 'in_theta'])
        self.assertEqual(len(frame), 5)
        self.assertTrue(frame['converged'].all())
        for x, value in zip(frame['x1'], frame['conjugate']):
            self.assertAlmostEqual(value, half_entropy(x, 1 - x), delta=1e-9)
        self.assertEqual(len(conjugate_grid(fubini_study(2), resolution=4)), 15)

    def test_grid_flags_unconverged_points(self):
        # one Newton step settles only the vertices and grad g(0) = 1/2
        frame = conjugate_grid(self.fs1, resolution=4, opts=ConjugateOptions(max_iterations=1))
        self.assertEqual(list(frame['converged']), [True, False, True, False, True])
        self.assertTrue(np.isfinite(frame['conjugate']).all())

    def test_batch_status_without_failures_matches_plain_batch(self):
        points = np.array([[0.2, 0.3], [0.0, 0.5], [0.1, 0.1]])
        values, converged = conjugate_batch(fubini_study(2), points, return_status=True)
        np.testing.assert_allclose(values, conjugate_batch(fubini_study(2), points))
        self.assertTrue(converged.all())

    def test_batch_without_status_raises_on_failure(self):
        with self.assertRaises(NoConvergence):
            conjugate_batch(self.fs1, [[0.25]], ConjugateOptions(max_iterations=1))
