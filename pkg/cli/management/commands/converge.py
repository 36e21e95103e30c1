"""
Normalized log-counts of small sections at growing levels l, bracketed by
the ellipsoid box bounds, next to the volume formula.
"""
from arithvol.experiments import convergence_frame, volume_convergence_experiment
from cli.base import ToricCommand
from sections_counting.options import CountingOptions

DEFAULT_LMAX = 64


def default_levels(lmax: int):
    """1, 2, 4, ... below lmax, then lmax itself."""
    levels = []
    l = 1
    while l < lmax:
        levels.append(l)
        l *= 2
    levels.append(lmax)
    return levels


class Command(ToricCommand):
    help = 'Compare small-section counts at growing levels with the volume formula'

    def add_command_arguments(self, parser):
        parser.add_argument('--lmax', type=int, help=f'Largest level (default {DEFAULT_LMAX})')
        parser.add_argument('--budget', type=int, help='Node budget of one exact ellipsoid count')

    def run(self, config, options):
        m = config.metric()
        lmax = config.option('lmax')
        levels = config.option('l_list')
        if levels is None:
            levels = default_levels(lmax or DEFAULT_LMAX)
        elif lmax is not None:
            levels = [l for l in levels if l <= lmax]

        rows = volume_convergence_experiment(m, levels, CountingOptions.from_config(budget=config.option('budget')))
        frame = convergence_frame(rows)
        if not frame.empty:
            frame['width'] = [row.width for row in rows]
            frame['brackets'] = [row.brackets() for row in rows]
        self.stderr.write(self.style.SUCCESS(f"{len(rows)} levels counted for {m.describe()}"))
        return frame
