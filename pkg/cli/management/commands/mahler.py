import pandas as pd

from arithvol.mahler import exhaustive_small_polynomial_search, format_polynomial, mahler_measure, parseval_check
from arithvol.options import MahlerOptions
from cli.base import ToricCommand
from cli.problem_config import parse_polynomial_field


class Command(ToricCommand):
    help = 'Mahler measure of an integer polynomial, or the small-polynomial search'

    def add_command_arguments(self, parser):
        parser.add_argument('polynomial', nargs='?', help='Polynomial such as "X + 2" (overrides the config)')
        parser.add_argument('--method', choices=['jensen', 'trapezoid'], default='jensen')
        parser.add_argument(
            '--search',
            action='store_true',
            help='Scan every polynomial with coefficients in [-coeff_bound, coeff_bound] up to the given degree',
        )

    def run(self, config, options):
        opts = MahlerOptions.from_config(tolerance=config.option('tol'))
        if options.get('search'):
            bound = config.option('coeff_bound', 2)
            return exhaustive_small_polynomial_search((-bound, bound), config.option('degree', 2), opts=opts)

        if options.get('polynomial'):
            coeffs, variables = parse_polynomial_field(options['polynomial'])
        else:
            coeffs, variables = config.require_polynomial()
        parseval = parseval_check(coeffs)
        return pd.DataFrame([{
            'polynomial': format_polynomial(coeffs, variables or None),
            'mahler': mahler_measure(coeffs, opts, options['method']),
            'method': options['method'],
            'l2_mass': parseval.l2_mass,
            'is_unit_monomial': parseval.is_unit_monomial,
        }])
