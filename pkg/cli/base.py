"""
Shared base for the toricvol management commands.

Exit codes: 1 for config errors, 2 when a self-check misses its
tolerance, 3 for numerical failures.
"""
import logging

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from toricvol.exceptions import ToleranceViolation, ToricVolumeError

from .output import render_csv, write_text
from .problem_config import ProblemConfig, load_problem_config

logger = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_TOLERANCE = 2
EXIT_NUMERICAL = 3


def _validation_message(exc: ValidationError) -> str:
    if hasattr(exc, 'error_dict'):
        return '; '.join(f"{field}: {' '.join(messages)}" for field, messages in exc.message_dict.items())
    return ' '.join(exc.messages)


class ToricCommand(BaseCommand):
    """
    Subclasses implement run(config, options) and return a DataFrame to
    print as CSV, or a string to print as is.
    """
    requires_system_checks = []
    requires_migrations_checks = False

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, help='Path to the JSON problem config')
        parser.add_argument('--out', type=str, help='Write the output to this file instead of stdout')
        parser.add_argument('--tol', type=float, help='Tolerance override')
        parser.add_argument('--seed', type=int, help='Seed for any sampling')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, config: ProblemConfig, options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = load_problem_config(options.get('config')).with_overrides(
                tol=options.get('tol'),
                seed=options.get('seed'),
                lmax=options.get('lmax'),
                budget=options.get('budget'),
                resolution=options.get('resolution'),
            )
            result = self.run(config, options)
        except ValidationError as exc:
            raise CommandError(f"Invalid config: {_validation_message(exc)}", returncode=EXIT_CONFIG)
        except ToleranceViolation as exc:
            raise CommandError(f"Tolerance violation: {exc}", returncode=EXIT_TOLERANCE)
        except (ToricVolumeError, np.linalg.LinAlgError, FloatingPointError) as exc:
            logger.error("%s failed: %s", self.__module__.rsplit('.', 1)[-1], exc)
            raise CommandError(f"Numerical failure: {exc}", returncode=EXIT_NUMERICAL)
        except ValueError as exc:
            raise CommandError(f"Invalid input: {exc}", returncode=EXIT_CONFIG)

        if result is None:
            return
        text = result if isinstance(result, str) else render_csv(result, config.digest)
        write_text(text, options.get('out'), self.stdout)
