import math

import pandas as pd

from arithvol.volume import arithmetic_volume_result, sharpened_volume_closed_form
from cli.base import ToricCommand
from metric_models.metrics import fubini_study_sharpening
from quadrature.options import QuadratureOptions
from toricvol.config import ComputationConfig
from toricvol.exceptions import NoConvergence, ToleranceViolation


class Command(ToricCommand):
    help = 'Compute the arithmetic volume (d+1)! * integral of the conjugate over Theta'

    def run(self, config, options):
        m = config.metric()
        result = arithmetic_volume_result(m, QuadratureOptions.from_config(rel_tolerance=config.option('tol')))
        if not result.converged:
            raise NoConvergence(f"Volume quadrature for {m.describe()} missed its tolerance",
                                {'value': result.value, 'error': result.error})

        k = fubini_study_sharpening(m)
        closed_form = float(sharpened_volume_closed_form(m.dimension, k)) if k else math.nan
        if k:
            allowed = max(10 * result.error, ComputationConfig.get('OUTPUT.oracle_tolerance', 1e-3))
            if abs(result.value - closed_form) > allowed:
                raise ToleranceViolation(
                    f"Volume {result.value:.8f} is {abs(result.value - closed_form):.2e} away "
                    f"from the closed form {closed_form:.8f}"
                )

        self.stderr.write(self.style.SUCCESS(f"volume {result.value:.6f} ± {result.error:.1e}"))
        return pd.DataFrame([{
            'metric': m.describe(),
            'dimension': m.dimension,
            'volume': result.value,
            'error': result.error,
            'converged': result.converged,
            'is_lower_bound': result.is_lower_bound,
            'method': result.method,
            'closed_form': closed_form,
        }])
