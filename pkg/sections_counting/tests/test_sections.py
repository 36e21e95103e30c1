import math

import numpy as np
from django.test import SimpleTestCase

from lattice_core.fan import TorusDivisor, projective_space_fan
from lattice_core.polytope import lattice_points
from metric_models.metrics import canonical_metric, fubini_study, scale_metric, sharpened_fubini_study
from sections_counting.ellipsoid import CountMethod
from sections_counting.gromov import gromov_constant, gromov_ratio_table
from sections_counting.options import CountingOptions
from sections_counting.sections import (
    build_section_space,
    count_small_sections,
    log_sup_norm_bound_gap,
    small_section_lattice,
)
from toricvol.exceptions import NotSmooth


def line_divisor(a):
    return TorusDivisor(projective_space_fan(1), (0, a))


class SectionSpaceTest(SimpleTestCase):
    """Monomial bases with their sup and L2 norms"""

    def test_projective_line_level_one(self):
        space = build_section_space(fubini_study(1), 1)
        self.assertEqual(space.basis, ((0,), (1,)))
        np.testing.assert_allclose(space.sup_norms, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose([n.value for n in space.l2_diag], [0.5, 0.5], atol=1e-12)

    def test_quadrature_matches_the_fast_path(self):
        m = fubini_study(1)
        fast = build_section_space(m, 3)
        slow = build_section_space(m, 3, CountingOptions(use_closed_form=False))
        np.testing.assert_allclose(slow.log_l2_diag, fast.log_l2_diag, atol=1e-5)

    def test_canonical_line_has_unit_sup_norms(self):
        space = build_section_space(canonical_metric(line_divisor(1)), 3)
        self.assertEqual(space.basis, ((0,), (1,), (2,), (3,)))
        np.testing.assert_array_equal(space.sup_norms, np.ones(4))
        self.assertFalse(space.has_l2)
        with self.assertRaises(NotSmooth):
            space.log_l2_diag

    def test_projective_plane_level_one(self):
        space = build_section_space(fubini_study(2), 1)
        self.assertEqual(len(space), 3)
        np.testing.assert_allclose(space.sup_norms, np.ones(3), atol=1e-12)
        np.testing.assert_allclose([n.value for n in space.l2_diag], [1 / 3] * 3, atol=1e-12)

    def test_basis_matches_lattice_points(self):
        m = fubini_study(2)
        for l in (1, 2, 4):
            space = build_section_space(m, l, with_l2=False)
            self.assertEqual(list(space.basis), lattice_points(m.reference_polytope, l))

    def test_l2_below_squared_sup_norm(self):
        for m in (fubini_study(1), sharpened_fubini_study(1, 3)):
            for l in (1, 4, 9):
                self.assertLessEqual(log_sup_norm_bound_gap(build_section_space(m, l)), 1e-9)
        space = build_section_space(scale_metric(fubini_study(1), 0.2), 3)
        self.assertLessEqual(log_sup_norm_bound_gap(space), 1e-6)

    def test_frame_export(self):
        frame = build_section_space(fubini_study(1), 2).to_frame()
        self.assertEqual(list(frame.columns), ['l', 'e', 'sup_norm', 'a_e', 'in_theta', 'a_e_is_bound'])
        self.assertEqual(list(frame['e']), ['0', '1', '2'])
        self.assertTrue(frame['in_theta'].all())

    def test_rejects_bad_level(self):
        with self.assertRaises(ValueError):
            build_section_space(fubini_study(1), 0)


class SmallSectionLatticeTest(SimpleTestCase):

    def test_boundary_points_are_included(self):
        self.assertEqual(small_section_lattice(fubini_study(1), 1), [(0,), (1,)])

    def test_lifted_metric_has_no_small_sections(self):
        self.assertEqual(small_section_lattice(scale_metric(fubini_study(1), -1.0), 1), [])
        self.assertEqual(small_section_lattice(scale_metric(fubini_study(1), -1.0), 5), [])

    def test_canonical_metric_keeps_everything(self):
        m = canonical_metric(line_divisor(2))
        for l in (1, 3):
            self.assertEqual(small_section_lattice(m, l), lattice_points(m.reference_polytope, l))

    def test_two_characterizations_agree(self):
        """g_check(e/l) > 0 exactly when ||chi^e||_sup < 1"""
        for m in (fubini_study(1), scale_metric(fubini_study(1), -0.2)):
            for l in range(1, 7):
                space = build_section_space(m, l, with_l2=False)
                for value, sup in zip(space.conjugates, space.sup_norms):
                    if value > 1e-9:
                        self.assertLess(sup, 1.0)
                    elif value < -1e-9:
                        self.assertGreater(sup, 1.0)

    def test_shifted_metric_drops_the_vertices(self):
        # half the entropy at 1/6 is 0.225 > 0.2, at the vertices it is 0
        kept = small_section_lattice(scale_metric(fubini_study(1), -0.2), 6)
        self.assertEqual(kept, [(1,), (2,), (3,), (4,), (5,)])


class SmallSectionCountTest(SimpleTestCase):

    def test_level_one_count(self):
        result = count_small_sections(build_section_space(fubini_study(1), 1))
        self.assertEqual(result.exact, 9)
        self.assertEqual(result.method, CountMethod.EXACT)
        self.assertTrue(result.brackets_exact())
        self.assertAlmostEqual(result.log_lower, math.log(9), places=12)

    def test_large_level_falls_back_to_bounds(self):
        result = count_small_sections(build_section_space(fubini_study(1), 60), budget=1000)
        self.assertIsNone(result.exact)
        self.assertLessEqual(result.log_lower, result.log_upper)
        self.assertTrue(result.certified)

    def test_exact_counts_sit_in_the_sandwich(self):
        for l in (2, 3, 4):
            result = count_small_sections(build_section_space(fubini_study(1), l))
            self.assertIsNotNone(result.exact)
            self.assertTrue(result.brackets_exact())


class GromovRatioTest(SimpleTestCase):

    def test_small_levels(self):
        table = gromov_ratio_table(fubini_study(1), 2)
        self.assertAlmostEqual(table.loc[0, 'max_ratio'], math.sqrt(2), places=10)
        self.assertAlmostEqual(table.loc[1, 'max_ratio'], math.sqrt(3), places=10)

    def test_middle_monomial_ratio(self):
        space = build_section_space(fubini_study(1), 2)
        ratio = space.sup_norms[1] / math.sqrt(space.l2_diag[1].value)
        self.assertAlmostEqual(ratio, 0.5 * math.sqrt(6), places=8)

    def test_default_ratio_runs_over_every_monomial(self):
        # at l = 2 the vertices beat the middle monomial: sqrt(3) against sqrt(6) / 2
        row = gromov_ratio_table(fubini_study(1), 2).iloc[1]
        self.assertIn(row['argmax'], ('0', '2'))
        self.assertAlmostEqual(row['max_ratio'], math.sqrt(3), places=10)

    def test_interior_only(self):
        table = gromov_ratio_table(fubini_study(1), 3, interior_only=True)
        self.assertEqual(list(table['l']), [2, 3])
        self.assertEqual(table.loc[0, 'argmax'], '1')
        self.assertAlmostEqual(table.loc[0, 'max_ratio'], 0.5 * math.sqrt(6), places=8)
        everything = gromov_ratio_table(fubini_study(1), 3)
        self.assertTrue(np.all(table['max_ratio'].to_numpy() < everything['max_ratio'].to_numpy()[1:]))

    def test_constant_stays_below_two(self):
        table = gromov_ratio_table(fubini_study(1), 50)
        self.assertLessEqual(gromov_constant(table), 2.0)
        tail = table['ratio_over_sqrt_l'].to_numpy()[4:]
        self.assertTrue(np.all(np.diff(tail) <= 1e-12))

    def test_canonical_metric_has_no_l2_norm(self):
        with self.assertRaises(NotSmooth):
            gromov_ratio_table(canonical_metric(line_divisor(1)), 3)
