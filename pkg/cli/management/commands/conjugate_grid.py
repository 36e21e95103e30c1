from cli.base import ToricCommand
from conjugate.solver import conjugate_grid


class Command(ToricCommand):
    help = 'Tabulate the Legendre-Fenchel conjugate on a grid over the polytope'

    def add_command_arguments(self, parser):
        parser.add_argument('--resolution', type=int, help='Grid steps per axis (default 20)')

    def run(self, config, options):
        return conjugate_grid(config.metric(), config.option('resolution', 20))
