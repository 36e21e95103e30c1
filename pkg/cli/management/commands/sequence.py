"""
Volumes along a sharpening family m_k, which tends uniformly to the
canonical metric of the same polytope.
"""
import math

from django.core.exceptions import ValidationError

from arithvol.experiments import metric_sequence_experiment
from arithvol.volume import sharpened_volume_closed_form
from cli.base import ToricCommand
from cli.problem_config import metric_family
from metric_models.metrics import CanonicalMetric, fubini_study_sharpening

DEFAULT_K_LIST = (1, 2, 4, 8)


class Command(ToricCommand):
    help = 'Volumes of a sequence of metrics converging to the canonical metric'

    def run(self, config, options):
        if config.metric_spec is None:
            raise ValidationError({'metric': 'This command needs a metric.'})
        family = metric_family(config.metric_spec, config.variety)
        k_list = config.option('k_list', DEFAULT_K_LIST)
        limit = CanonicalMetric(family(1).reference_polytope)

        frame = metric_sequence_experiment(family, limit, k_list, seed=config.option('seed'))
        closed = []
        for k in k_list:
            sharpening = fubini_study_sharpening(family(k))
            closed.append(float(sharpened_volume_closed_form(limit.dimension, sharpening))
                          if sharpening else math.nan)
        frame['closed_form'] = closed
        return frame
