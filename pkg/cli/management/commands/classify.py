from arithvol.positivity import classify_positivity
from cli.base import ToricCommand
from toricvol.exceptions import ToleranceViolation


class Command(ToricCommand):
    help = 'Classify a metrized divisor as ample, nef and big'

    def run(self, config, options):
        report = classify_positivity(config.metric(), config.option('tol'))
        if not report.consistent:
            raise ToleranceViolation(
                f"Bigness criteria disagree: g(0) = {report.origin_value:.3e}, "
                f"max conjugate = {report.max_conjugate:.3e}"
            )

        frame = report.to_frame()
        for flag, value in report.summary().items():
            frame.loc[len(frame)] = [flag, float('nan'), 'yes' if value else 'no']
        self.stderr.write(self.style.SUCCESS(
            ', '.join(f"{flag}={'yes' if value else 'no'}" for flag, value in report.summary().items())
        ))
        return frame
