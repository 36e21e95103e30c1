"""
Print the polytope of a divisor: vertices, lattice points and volume.
"""
import json

from cli.base import ToricCommand
from lattice_core.fan import validate_smooth_fan
from lattice_core.linalg import format_fraction
from lattice_core.polytope import lattice_points, polytope_volume


def _point(p) -> str:
    return '(' + ', '.join(format_fraction(c) for c in p) + ')'


class Command(ToricCommand):
    help = 'Show the vertices, lattice points and volume of the polytope of a divisor'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--json',
            action='store_true',
            help='Emit JSON that reads back as a polytope config',
        )

    def run(self, config, options):
        variety = config.require_variety()
        polytope = variety.polytope
        points = lattice_points(polytope, 1)
        volume = polytope_volume(polytope) if polytope.is_full_dimensional else 0

        if options.get('json'):
            payload = {
                'variety': {'polytope': polytope.to_dict()},
                'lattice_points': [list(p) for p in points],
                'volume': format_fraction(volume),
            }
            return json.dumps(payload, indent=2, sort_keys=True) + '\n'

        lines = [
            str(polytope),
            f'vertices: {len(polytope.vertices)}',
        ]
        lines += [f'  {_point(v)}' for v in polytope.vertices]
        lines.append(f'lattice points: {len(points)}')
        lines += [f'  {_point(p)}' for p in points]
        lines.append(f'volume: {format_fraction(volume)}')
        if not polytope.is_full_dimensional:
            lines.append(f'affine dimension: {polytope.affine_dimension}')
        if variety.divisor is not None:
            report = validate_smooth_fan(variety.divisor.fan)
            lines.append(f"fan: {'smooth' if report.smooth else 'not smooth'}, "
                         f"{'complete' if report.complete else 'incomplete'}")
        return '\n'.join(lines) + '\n'
