import logging
from pathlib import Path

from liegeo import conf
from liegeo.cauchy_solver import evaluate_surface, prolong, verify_solution, window_grid
from liegeo.serializers import grid_columns, legendre_grid_to_dict, read_cauchy, write_csv, write_json

from ._base import LiegeoCommand, parse_window

logger = logging.getLogger(__name__)


class Command(LiegeoCommand):
    help = "Solve the Cauchy problem for Lie-minimal surfaces by power series and verify the jet."

    def add_command_arguments(self, parser):
        parser.add_argument("--order", type=int, help="Series order; defaults to the input's order, then LIEGEO_SERIES_ORDER.")
        parser.add_argument("--window", help="u0,u1,v0,v1,nu,nv grid on which to evaluate the surface.")
        parser.add_argument("--export", metavar="PATH", help="Write the evaluated grid as .csv, .json (a Legendre grid) or .obj (needs --window).")
        parser.add_argument("--verify-tol", type=float, default=1e-10)

    def run(self, **options):
        data, order = read_cauchy(options["input"])
        order = options["order"] or order or conf.get("SERIES_ORDER")
        j = prolong(data, order)
        verification = verify_solution(j)
        violations = verification.violations(options["verify_tol"])
        if violations:
            logger.warning(f"{len(violations)} equations exceed {options['verify_tol']:g}, first {violations[0]}")
        report = {
            "order": j.order,
            "data": data.as_dict(),
            "solution": j.series(),
            "verification": {
                "equations": verification.equations(),
                "max_residual": verification.max_residual,
                "violations": violations,
            },
        }
        if options["window"]:
            patch = evaluate_surface(j, *window_grid(*parse_window(options["window"])))
            report["trust"] = patch.trust
            export = options["export"]
            suffix = Path(export).suffix.lower() if export else ""
            if suffix == ".csv":
                s = patch.surface
                write_csv(export, grid_columns(s.u, s.v, dict(
                    patch.invariants.as_dict(), a=patch.coframe.a, b=patch.coframe.b, phi0=s.phi0, phi1=s.phi1,
                )))
            elif suffix == ".json":
                write_json(export, legendre_grid_to_dict(patch.surface))
            elif export:
                self.write_mesh(export, patch.surface)
        return report
