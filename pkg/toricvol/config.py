"""
Computation configuration for toricvol.
Defaults live here; a project can override any dotted key through
settings.TORICVOL_CONFIG.
"""
import logging

from django.conf import settings

logger = logging.getLogger(__name__)


class ComputationConfig:
    """Configuration manager for numerical defaults"""

    DEFAULT_CONFIG = {
        'CONJUGATE': {
            'residual_tolerance': 1e-9,
            'value_tolerance': 1e-8,
            'max_iterations': 200,
            'divergence_radius': 1e3,
            'max_condition': 1e12,
            'armijo_c1': 1e-4,
            'max_backtracks': 60,
            'boundary_tolerance': 1e-12,
        },
        'QUADRATURE': {
            'rel_tolerance': 1e-6,
            'abs_tolerance': 1e-12,
            'order': 16,
            'max_depth': 12,
            'initial_radius': 8.0,
            'max_radius': 1024.0,
            'sign_refinement_depth': 6,
        },
        'COUNTING': {
            'budget': 10_000_000,
            'theta_tolerance': 1e-9,
            'use_closed_form': True,
        },
        'POSITIVITY': {
            'tolerance': 1e-9,
        },
        'MAHLER': {
            'tolerance': 1e-8,
            'initial_points': 64,
            'max_points_1d': 2 ** 20,
            'max_points_nd': 2 ** 10,
        },
        'SAMPLING': {
            'seed': 0,
            'radius': 40.0,
            'samples': 2000,
        },
        'OUTPUT': {
            'float_format': '%.10g',
            'hash_length': 12,
            'oracle_tolerance': 1e-3,
        },
    }

    @classmethod
    def _overrides(cls):
        # Library use without Django setup falls back to the defaults
        if not settings.configured:
            return {}
        return getattr(settings, 'TORICVOL_CONFIG', {}) or {}

    @classmethod
    def get(cls, key, default=None):
        """Get configuration value with fallback to default"""
        keys = key.split('.')
        for source in (cls._overrides(), cls.DEFAULT_CONFIG):
            value = source
            try:
                for k in keys:
                    value = value[k]
                return value
            except (KeyError, TypeError):
                continue
        return default

    @classmethod
    def section(cls, name):
        """Merged view of one top-level section"""
        merged = dict(cls.DEFAULT_CONFIG.get(name, {}))
        merged.update(cls._overrides().get(name, {}))
        return merged
