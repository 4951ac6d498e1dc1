from liegeo.cauchy_solver import evaluate_surface, prolong, window_grid
from liegeo.exceptions import InvalidRunConfig
from liegeo.serializers import cauchy_from_dict, read_json

from ._base import LiegeoCommand, parse_window


class Command(LiegeoCommand):
    help = (
        "Write the Euclidean projection of a surface as an OBJ mesh. The input is a surface grid, "
        "a built-in patch, or Cauchy data evaluated on --window."
    )
    uses_surface = True

    def add_command_arguments(self, parser):
        parser.add_argument("--order", type=int, help="Series order for Cauchy data input.")

    def validate(self, options):
        super().validate(options)
        if not options["out"]:
            raise InvalidRunConfig("--out is required")

    def run(self, **options):
        if options.get("input") and options["input"].lower().endswith(".json"):
            payload = read_json(options["input"])
            if "k0" in payload:
                if not options["window"]:
                    raise InvalidRunConfig("Cauchy data needs --window")
                data, order = cauchy_from_dict(payload)
                j = prolong(data, options["order"] or order)
                s = evaluate_surface(j, *window_grid(*parse_window(options["window"]))).surface
                self.write_mesh(options["out"], s)
                return None
        s = self.legendre_surface(options)
        self.write_mesh(options["out"], s)
        return None
