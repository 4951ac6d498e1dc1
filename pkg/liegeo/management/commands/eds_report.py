from dataclasses import asdict

from liegeo.eds_engine import involutivity_report
from liegeo.exceptions import InvalidRunConfig

from ._base import LiegeoCommand


class Command(LiegeoCommand):
    help = "Polar space and integral element dimensions of the Lie-minimal system at random points."
    uses_input = False

    def add_command_arguments(self, parser):
        parser.add_argument("--samples", type=int, default=100)
        parser.add_argument("--seed", type=int, default=0)

    def validate(self, options):
        super().validate(options)
        if options["samples"] < 1:
            raise InvalidRunConfig(f"--samples must be positive, got {options['samples']}")

    def run(self, **options):
        report = involutivity_report(options["samples"], options["seed"])
        return dict(asdict(report), is_involutive=report.is_involutive)
