"""
Django settings for the toricvol project.

toricvol has no database and serves no HTTP requests; Django provides the
management-command front end, settings, logging and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = config(
    'SECRET_KEY',
    default='django-insecure-toricvol-local-only'
)

DEBUG = config('DEBUG', default=True, cast=bool)

ENVIRONMENT = config('ENVIRONMENT', default='development')

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'lattice_core',
    'metric_models',
    'conjugate',
    'quadrature',
    'sections_counting',
    'arithvol',
    'cli',
]

MIDDLEWARE = []

# No persistence: every computation is a pure function of its config
DATABASES = {}

TIME_ZONE = 'UTC'
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ═══════════════════════════════════════════════════════════════
# NUMERICAL DEFAULTS
# ═══════════════════════════════════════════════════════════════
#
# Read by toricvol.config.ComputationConfig. Anything not listed here
# falls back to ComputationConfig.DEFAULT_CONFIG.
#
TORICVOL_CONFIG = {
    'CONJUGATE': {
        'residual_tolerance': config('TORICVOL_RESIDUAL_TOL', default=1e-9, cast=float),
        'value_tolerance': config('TORICVOL_VALUE_TOL', default=1e-8, cast=float),
    },
    'QUADRATURE': {
        'rel_tolerance': config('TORICVOL_QUAD_REL_TOL', default=1e-6, cast=float),
    },
    'COUNTING': {
        'budget': config('TORICVOL_COUNT_BUDGET', default=10_000_000, cast=int),
    },
    'SAMPLING': {
        'seed': config('TORICVOL_SEED', default=0, cast=int),
    },
}

LOG_LEVEL = config('LOG_LEVEL', default='INFO')
LOG_FILE = config('LOG_FILE', default=os.path.join(BASE_DIR, 'toricvol.log'))

_app_handlers = ['console'] + (['file'] if not DEBUG else [])

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': LOG_FILE,
            'formatter': 'verbose',
            'delay': True,
        },
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': _app_handlers,
            'level': 'INFO',
            'propagate': False,
        },
        **{
            app: {
                'handlers': _app_handlers,
                'level': LOG_LEVEL,
                'propagate': False,
            }
            for app in ('toricvol', 'lattice_core', 'metric_models', 'conjugate',
                        'quadrature', 'sections_counting', 'arithvol', 'cli')
        },
    },
}
