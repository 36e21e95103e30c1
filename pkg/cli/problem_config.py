"""
Problem configs for the toricvol management commands.

A config is a JSON object with up to four keys:

    variety     {"fan": {"rays", "cones", "complete"}, "coeffs"}
                {"projective_space": d, "coeffs"?}
                {"hirzebruch": a, "coeffs"}
                {"polytope": {"vertices"}}
    metric      {"type": "canonical" | "fubini_study" | "logsumexp" |
                 "sharpened" | "scaled" | "sum", ...}
    options     tol, lmax, l_list, k_list, budget, seed, resolution,
                degree, coeff_bound
    polynomial  "X^2 - 3*X*Y + 1" or [[exponent, coefficient], ...]

Lattice data must be exact: integers or "p/q" strings. Floats are only
accepted for weights, shifts, sharpness and tolerances. Unknown keys are
ignored, so the JSON written by `polytope --json` reads back as a config.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Integral, Real
from typing import Any, Callable, Dict, Optional, Tuple

from django.core.exceptions import ValidationError

from arithvol.mahler import DEFAULT_VARIABLES, Coefficients, normalize_coefficients, parse_polynomial
from lattice_core.fan import Fan, TorusDivisor, hirzebruch_fan, polytope_from_divisor, projective_space_fan
from lattice_core.linalg import rational_point, to_fraction
from lattice_core.polytope import LatticePolytope
from metric_models.metrics import (
    CanonicalMetric,
    MetricModel,
    add_metrics,
    canonical_metric,
    fubini_study,
    log_sum_exp_metric,
    scale_metric,
    sharpened_fubini_study,
)
from toricvol.config import ComputationConfig
from toricvol.exceptions import ToricVolumeError

logger = logging.getLogger(__name__)

VARIETY_KINDS = ('fan', 'projective_space', 'hirzebruch', 'polytope')
METRIC_TYPES = ('canonical', 'fubini_study', 'logsumexp', 'sharpened', 'scaled', 'sum')
OPTION_KEYS = ('tol', 'lmax', 'l_list', 'k_list', 'budget', 'seed', 'resolution', 'degree', 'coeff_bound')


@dataclass(frozen=True)
class Variety:
    """Polytope of the divisor; `divisor` is None for bare rational or degenerate polytopes."""
    polytope: LatticePolytope
    divisor: Optional[TorusDivisor] = None

    @property
    def dimension(self) -> int:
        return self.polytope.dimension


@dataclass(frozen=True)
class ProblemConfig:
    raw: Dict[str, Any] = field(default_factory=dict)
    variety: Optional[Variety] = None
    metric_spec: Optional[Dict[str, Any]] = None
    options: Dict[str, Any] = field(default_factory=dict)
    polynomial: Optional[Coefficients] = None
    variables: Tuple[str, ...] = ()

    @property
    def digest(self) -> str:
        """sha256 prefix of the canonical JSON form, flag overrides included."""
        length = int(ComputationConfig.get('OUTPUT.hash_length', 12))
        text = json.dumps(self.raw, sort_keys=True, separators=(',', ':'), default=str)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()[:length]

    def with_overrides(self, **overrides) -> 'ProblemConfig':
        given = {k: v for k, v in overrides.items() if v is not None}
        if not given:
            return self
        merged = dict(self.options)
        merged.update(parse_options(given))
        raw = dict(self.raw)
        raw['options'] = {**(self.raw.get('options') or {}), **given}
        return replace(self, raw=raw, options=merged)

    def option(self, name: str, default=None):
        return self.options.get(name, default)

    def require_variety(self) -> Variety:
        if self.variety is None:
            raise ValidationError({'variety': 'This command needs a variety.'})
        return self.variety

    def metric(self) -> MetricModel:
        if self.metric_spec is None:
            raise ValidationError({'metric': 'This command needs a metric.'})
        m = build_metric(self.metric_spec, self.variety)
        if self.variety is not None and set(m.reference_polytope.vertices) != set(self.variety.polytope.vertices):
            raise ValidationError({
                'metric': f"Metric lives on {m.reference_polytope}, but the variety gives {self.variety.polytope}"
            })
        return m

    def require_polynomial(self) -> Tuple[Coefficients, Tuple[str, ...]]:
        if self.polynomial is None:
            raise ValidationError({'polynomial': 'This command needs a polynomial.'})
        return self.polynomial, self.variables


# ---- field parsers -------------------------------------------------------------------

def _integer(value, name: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise ValidationError({name: f"Expected an integer, got {value!r}."})
    if minimum is not None and value < minimum:
        raise ValidationError({name: f"Must be at least {minimum}."})
    return int(value)


def _number(value, name: str) -> float:
    if isinstance(value, bool):
        raise ValidationError({name: f"Expected a number, got {value!r}."})
    if isinstance(value, Real):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ValidationError({name: f"Expected a number, got {value!r}."})


def _integer_list(values, name: str, minimum: Optional[int] = None) -> Tuple[int, ...]:
    if not isinstance(values, (list, tuple)):
        raise ValidationError({name: "Expected a list of integers."})
    return tuple(_integer(v, name, minimum) for v in values)


def _exact_points(values, name: str):
    if not isinstance(values, (list, tuple)) or not values:
        raise ValidationError({name: "Expected a non-empty list of points."})
    try:
        points = [rational_point(p) for p in values]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError({name: f'Coordinates must be integers or "p/q" strings ({exc}).'})
    if len({len(p) for p in points}) != 1:
        raise ValidationError({name: "Points have inconsistent dimensions."})
    return points


def _lattice_vectors(values, name: str) -> Tuple[Tuple[int, ...], ...]:
    points = _exact_points(values, name)
    if any(c.denominator != 1 for p in points for c in p):
        raise ValidationError({name: "Expected integer vectors."})
    return tuple(tuple(int(c) for c in p) for p in points)


def _coefficients(values, name: str, count: int) -> Tuple[int, ...]:
    if not isinstance(values, (list, tuple)):
        raise ValidationError({name: "Expected a list of integer coefficients."})
    try:
        coeffs = [to_fraction(v) for v in values]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError({name: f"Invalid coefficient ({exc})."})
    if any(c.denominator != 1 for c in coeffs):
        raise ValidationError({name: "Divisor coefficients must be integers."})
    if len(coeffs) != count:
        raise ValidationError({name: f"{len(coeffs)} coefficients given for {count} rays."})
    return tuple(int(c) for c in coeffs)


# ---- sections ------------------------------------------------------------------------

def _divisor_variety(fan: Fan, coeffs) -> Variety:
    divisor = TorusDivisor(fan, _coefficients(coeffs, 'variety.coeffs', len(fan.rays)))
    return Variety(polytope_from_divisor(divisor), divisor)


def _polytope_variety(data) -> Variety:
    if not isinstance(data, dict) or 'vertices' not in data:
        raise ValidationError({'variety.polytope': 'Expected {"vertices": [...]}.'})
    polytope = LatticePolytope.from_vertices(_exact_points(data['vertices'], 'variety.polytope.vertices'))
    divisor = None
    if polytope.is_full_dimensional and polytope.is_lattice:
        divisor = TorusDivisor.from_polytope(polytope)
    return Variety(polytope, divisor)


def parse_variety(data) -> Variety:
    if not isinstance(data, dict):
        raise ValidationError({'variety': 'Expected an object.'})
    kinds = [k for k in VARIETY_KINDS if k in data]
    if len(kinds) != 1:
        raise ValidationError({'variety': f"Give exactly one of {', '.join(VARIETY_KINDS)}."})
    kind = kinds[0]
    try:
        if kind == 'polytope':
            return _polytope_variety(data['polytope'])
        if kind == 'projective_space':
            d = _integer(data['projective_space'], 'variety.projective_space', 1)
            return _divisor_variety(projective_space_fan(d), data.get('coeffs', [0] * d + [1]))
        if kind == 'hirzebruch':
            if 'coeffs' not in data:
                raise ValidationError({'variety.coeffs': 'Hirzebruch surfaces need divisor coefficients.'})
            return _divisor_variety(hirzebruch_fan(_integer(data['hirzebruch'], 'variety.hirzebruch', 0)),
                                    data['coeffs'])
        spec = data['fan']
        if not isinstance(spec, dict) or 'rays' not in spec or 'cones' not in spec:
            raise ValidationError({'variety.fan': 'Expected {"rays": [...], "cones": [...]}.'})
        if 'coeffs' not in data:
            raise ValidationError({'variety.coeffs': 'A fan needs divisor coefficients.'})
        cones = tuple(_integer_list(c, 'variety.fan.cones', 0) for c in spec['cones'])
        fan = Fan(_lattice_vectors(spec['rays'], 'variety.fan.rays'), cones, bool(spec.get('complete', False)))
        return _divisor_variety(fan, data['coeffs'])
    except (ToricVolumeError, ValueError) as exc:
        raise ValidationError({'variety': str(exc)})


def _metric_dimension(spec: Dict, variety: Optional[Variety]) -> int:
    if 'd' in spec:
        return _integer(spec['d'], 'metric.d', 1)
    if variety is None:
        raise ValidationError({'metric.d': 'Give d or a variety.'})
    return variety.dimension


def build_metric(spec, variety: Optional[Variety] = None) -> MetricModel:
    """Metric model from its spec; nested specs may carry their own "variety"."""
    if not isinstance(spec, dict) or spec.get('type') not in METRIC_TYPES:
        raise ValidationError({'metric.type': f"Must be one of {', '.join(METRIC_TYPES)}."})
    if 'variety' in spec:
        variety = parse_variety(spec['variety'])
    kind = spec['type']
    try:
        if kind == 'canonical':
            if variety is None:
                raise ValidationError({'metric': 'The canonical metric needs a variety.'})
            if variety.divisor is not None:
                return canonical_metric(variety.divisor)
            return CanonicalMetric(variety.polytope)
        if kind == 'fubini_study':
            return fubini_study(_metric_dimension(spec, variety))
        if kind == 'sharpened':
            return sharpened_fubini_study(_metric_dimension(spec, variety), _integer(spec.get('k'), 'metric.k', 1))
        if kind == 'logsumexp':
            reference = variety.polytope if variety is not None else None
            points = spec.get('points') or (reference.vertices if reference is not None else None)
            if points is None:
                raise ValidationError({'metric.points': 'Give points or a variety.'})
            weights = spec.get('weights')
            if weights is not None:
                if not isinstance(weights, (list, tuple)):
                    raise ValidationError({'metric.weights': 'Expected a list of numbers.'})
                weights = [_number(w, 'metric.weights') for w in weights]
            return log_sum_exp_metric(_exact_points(points, 'metric.points'), weights,
                                      _number(spec.get('sharpness', 2.0), 'metric.sharpness'), reference)
        if kind == 'scaled':
            return scale_metric(build_metric(spec.get('base'), variety), _number(spec.get('shift'), 'metric.shift'))
        terms = spec.get('terms')
        if not isinstance(terms, list) or len(terms) < 2:
            raise ValidationError({'metric.terms': 'A sum needs at least two metric specs.'})
        # summands live on their own polytopes
        total = build_metric(terms[0])
        for term in terms[1:]:
            total = add_metrics(total, build_metric(term))
        return total
    except (ToricVolumeError, ValueError) as exc:
        raise ValidationError({'metric': str(exc)})


def metric_family(spec, variety: Optional[Variety] = None) -> Callable[[int], MetricModel]:
    """k -> the k-th member of a sharpening family, for the sequence experiment."""
    if not isinstance(spec, dict):
        raise ValidationError({'metric': 'Expected an object.'})
    if spec.get('type') in ('fubini_study', 'sharpened'):
        return lambda k: build_metric({**spec, 'type': 'sharpened', 'k': k}, variety)
    if spec.get('type') == 'logsumexp':
        sharpness = _number(spec.get('sharpness', 2.0), 'metric.sharpness')
        return lambda k: build_metric({**spec, 'sharpness': sharpness * k}, variety)
    raise ValidationError({'metric.type': 'Sequences need a fubini_study, sharpened or logsumexp metric.'})


def parse_options(data) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ValidationError({'options': 'Expected an object.'})
    parsed = {}
    for key, value in data.items():
        if key not in OPTION_KEYS:
            logger.debug("Ignoring unknown option %s", key)
            continue
        name = f'options.{key}'
        if key == 'tol':
            parsed[key] = _number(value, name)
            if parsed[key] <= 0:
                raise ValidationError({name: 'Must be positive.'})
        elif key in ('l_list', 'k_list'):
            parsed[key] = _integer_list(value, name, 1)
        elif key == 'seed':
            parsed[key] = _integer(value, name, 0)
        elif key == 'coeff_bound':
            parsed[key] = _integer(value, name, 0)
        else:
            parsed[key] = _integer(value, name, 1)
    return parsed


def parse_polynomial_field(data) -> Tuple[Coefficients, Tuple[str, ...]]:
    if isinstance(data, str):
        try:
            return parse_polynomial(data)
        except Exception as exc:
            raise ValidationError({'polynomial': f"Cannot read {data!r}: {exc}"})
    if not isinstance(data, list) or not data:
        raise ValidationError({'polynomial': 'Expected a string or a list of [exponent, coefficient] pairs.'})
    pairs = []
    for item in data:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ValidationError({'polynomial': f"Expected [exponent, coefficient], got {item!r}."})
        exponent, coefficient = item
        exponent = [exponent] if isinstance(exponent, Integral) else exponent
        pairs.append((_integer_list(exponent, 'polynomial'), _integer(coefficient, 'polynomial')))
    try:
        coeffs = normalize_coefficients(pairs)
    except (ToricVolumeError, ValueError) as exc:
        raise ValidationError({'polynomial': str(exc)})
    d = len(next(iter(coeffs)))
    return coeffs, DEFAULT_VARIABLES[:d]


def parse_problem_config(data) -> ProblemConfig:
    if not isinstance(data, dict):
        raise ValidationError('A problem config must be a JSON object.')
    variety = parse_variety(data['variety']) if data.get('variety') is not None else None
    metric_spec = data.get('metric')
    if metric_spec is not None and not isinstance(metric_spec, dict):
        raise ValidationError({'metric': 'Expected an object.'})
    options = parse_options(data.get('options') or {})
    polynomial, variables = None, ()
    if data.get('polynomial') is not None:
        polynomial, variables = parse_polynomial_field(data['polynomial'])
    return ProblemConfig(raw=data, variety=variety, metric_spec=metric_spec, options=options,
                         polynomial=polynomial, variables=variables)


def load_problem_config(path: Optional[str]) -> ProblemConfig:
    """Read and validate a JSON config; no path gives the empty config."""
    if not path:
        return ProblemConfig()
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ValidationError(f"Cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"Config {path} is not valid JSON: {exc}")
    logger.info("Loaded config %s", path)
    return parse_problem_config(data)
