from fractions import Fraction

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given
from hypothesis import strategies as st

from cli.problem_config import (
    build_metric,
    metric_family,
    parse_options,
    parse_polynomial_field,
    parse_problem_config,
    parse_variety,
)
from lattice_core.polytope import standard_simplex
from metric_models.metrics import CanonicalMetric, LogSumExpMetric, ScaledMetric, SumMetric

F = Fraction


class VarietyConfigTest(SimpleTestCase):

    def test_projective_space_defaults_to_hyperplane_class(self):
        variety = parse_variety({'projective_space': 2})
        self.assertEqual(variety.polytope.vertices, standard_simplex(2).vertices)
        self.assertIsNotNone(variety.divisor)

    def test_explicit_fan(self):
        variety = parse_variety({'fan': {'rays': [[1], [-1]], 'cones': [[0], [1]], 'complete': True},
                                 'coeffs': [0, 2]})
        self.assertEqual(variety.polytope.vertices, ((F(0),), (F(2),)))

    def test_hirzebruch(self):
        variety = parse_variety({'hirzebruch': 1, 'coeffs': [0, 0, 1, 1]})
        self.assertEqual(set(variety.polytope.vertices),
                         {(F(0), F(0)), (F(1), F(0)), (F(2), F(1)), (F(0), F(1))})

    def test_polytope_with_rational_vertices(self):
        variety = parse_variety({'polytope': {'vertices': [['0'], ['1/2']]}})
        self.assertEqual(variety.polytope.vertices, ((F(0),), (F(1, 2),)))
        self.assertIsNone(variety.divisor)

    def test_rejections(self):
        bad = [
            {'polytope': {'vertices': [[0.5]]}},
            {'projective_space': 1, 'hirzebruch': 0},
            {'hirzebruch': 1},
            {'projective_space': 1, 'coeffs': [0, '1/2']},
            {'projective_space': 2, 'coeffs': [0, 1]},
            {'fan': {'rays': [[1], [-1]], 'cones': [[0], [1]]}, 'coeffs': [0, 1]},
            {'projective_space': 2, 'coeffs': [0, 0, -1]},
            [1, 2],
        ]
        for data in bad:
            with self.subTest(data=data):
                with self.assertRaises(ValidationError):
                    parse_variety(data)


class MetricConfigTest(SimpleTestCase):

    def test_types(self):
        line = parse_variety({'projective_space': 1})
        self.assertIsInstance(build_metric({'type': 'fubini_study'}, line), LogSumExpMetric)
        self.assertIsInstance(build_metric({'type': 'canonical'}, line), CanonicalMetric)
        self.assertEqual(build_metric({'type': 'sharpened', 'k': 3}, line).sharpness, 6.0)
        scaled = build_metric({'type': 'scaled', 'base': {'type': 'fubini_study'}, 'shift': '1/10'}, line)
        self.assertIsInstance(scaled, ScaledMetric)
        self.assertAlmostEqual(scaled.shift, 0.1)
        weighted = build_metric({'type': 'logsumexp', 'weights': [1, 2.5]}, line)
        self.assertEqual(list(weighted.weights), [1.0, 2.5])

    def test_sum_terms_carry_their_own_varieties(self):
        m = build_metric({'type': 'sum', 'terms': [
            {'type': 'fubini_study', 'd': 1},
            {'type': 'canonical', 'variety': {'projective_space': 1}},
        ]})
        self.assertIsInstance(m, SumMetric)
        self.assertEqual(m.reference_polytope.vertices, ((F(0),), (F(2),)))

    def test_metric_must_match_the_variety(self):
        config = parse_problem_config({'variety': {'hirzebruch': 1, 'coeffs': [0, 0, 1, 1]},
                                       'metric': {'type': 'fubini_study'}})
        with self.assertRaises(ValidationError):
            config.metric()

    def test_rejections(self):
        line = parse_variety({'projective_space': 1})
        for spec in [{'type': 'spline'}, {'type': 'sharpened'}, {'type': 'logsumexp', 'weights': [1, -1]},
                     {'type': 'sum', 'terms': [{'type': 'fubini_study'}]}, {'type': 'canonical'}]:
            with self.subTest(spec=spec):
                with self.assertRaises(ValidationError):
                    build_metric(spec, line if spec['type'] != 'canonical' else None)

    def test_family(self):
        family = metric_family({'type': 'fubini_study', 'd': 1})
        self.assertEqual([family(k).sharpness for k in (1, 2, 5)], [2.0, 4.0, 10.0])
        lse = metric_family({'type': 'logsumexp', 'points': [[0], [1]], 'sharpness': 3})
        self.assertEqual(lse(2).sharpness, 6.0)
        with self.assertRaises(ValidationError):
            metric_family({'type': 'canonical'})


class OptionsAndPolynomialTest(SimpleTestCase):

    def test_options(self):
        self.assertEqual(parse_options({'tol': '1/1000', 'l_list': [1, 4], 'seed': 0, 'extra': 1}),
                         {'tol': 0.001, 'l_list': (1, 4), 'seed': 0})
        for data in [{'lmax': 0}, {'tol': -1}, {'budget': 2.5}, {'l_list': 3}, {'seed': True}]:
            with self.subTest(data=data):
                with self.assertRaises(ValidationError):
                    parse_options(data)

    def test_polynomial_pairs(self):
        coeffs, variables = parse_polynomial_field([[[1, 0], 1], [[0, 1], 1], [[0, 0], 1]])
        self.assertEqual(coeffs, {(1, 0): 1, (0, 1): 1, (0, 0): 1})
        self.assertEqual(variables, ('X', 'Y'))
        self.assertEqual(parse_polynomial_field([[1, 1], [0, 2]])[0], {(1,): 1, (0,): 2})

    def test_polynomial_rejections(self):
        for data in ['X +* 2', 'X/3', [[1, 0.5]], [[1, 0]], []]:
            with self.subTest(data=data):
                with self.assertRaises(ValidationError):
                    parse_polynomial_field(data)


class DigestTest(SimpleTestCase):

    def test_overrides_change_the_digest(self):
        config = parse_problem_config({'variety': {'projective_space': 1}, 'metric': {'type': 'fubini_study'}})
        self.assertEqual(len(config.digest), 12)
        self.assertEqual(config.with_overrides(tol=None).digest, config.digest)
        self.assertNotEqual(config.with_overrides(tol=1e-3).digest, config.digest)
        self.assertEqual(config.with_overrides(tol=1e-3).option('tol'), 1e-3)

    @given(st.permutations(['lmax', 'budget', 'seed', 'resolution']), st.integers(1, 50))
    def test_digest_ignores_key_order(self, keys, value):
        ordered = {key: value for key in sorted(keys)}
        shuffled = {key: value for key in keys}
        self.assertEqual(parse_problem_config({'options': ordered}).digest,
                         parse_problem_config({'options': shuffled}).digest)
