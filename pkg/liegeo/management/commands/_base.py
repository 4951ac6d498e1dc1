"""
Shared option handling, error mapping and run recording of the liegeo
management commands.
"""

import json
import logging
from pathlib import Path
import time

from django.core.management.base import BaseCommand, CommandError

from liegeo import conf
from liegeo.exceptions import InvalidRunConfig, LiegeoError
from liegeo.models import Run
from liegeo.serializers import dumps, read_surface, write_csv, write_json, write_obj
from liegeo.surface_invariants import EuclideanSurfaceGrid, extract_invariants, lift_euclidean, reduce_to_normal_frame
from liegeo.surfaces import SURFACES

logger = logging.getLogger(__name__)

# BaseCommand and call_command options that are not part of a run's configuration
FRAMEWORK_OPTIONS = (
    "verbosity", "settings", "pythonpath", "traceback", "no_color", "force_color", "skip_checks",
    "stdout", "stderr", "record",
)


def parse_window(raw):
    """
    "u0,u1,v0,v1,nu,nv" -> (u0, u1, v0, v1, nu, nv).
    """
    parts = raw.split(",")
    if len(parts) != 6:
        raise InvalidRunConfig(f"--window expects u0,u1,v0,v1,nu,nv, got {raw!r}")
    try:
        u0, u1, v0, v1 = (float(x) for x in parts[:4])
        nu, nv = (int(x) for x in parts[4:])
    except ValueError:
        raise InvalidRunConfig(f"--window has a non-numeric entry: {raw!r}")
    if nu < 2 or nv < 2:
        raise InvalidRunConfig("--window needs at least 2 nodes in each direction")
    if not (u1 > u0 and v1 > v0):
        raise InvalidRunConfig("--window ranges must be increasing")
    return u0, u1, v0, v1, nu, nv


class LiegeoCommand(BaseCommand):
    """
    Subclasses implement `run(**options)` returning a JSON-encodable report.
    LiegeoError subclasses leave the command with exit status 2 (invalid
    input) or 3 (numerical failure).
    """
    requires_system_checks = []
    uses_input = True
    uses_surface = False

    @property
    def command_name(self):
        return type(self).__module__.rsplit(".", 1)[-1]

    def add_arguments(self, parser):
        if self.uses_input:
            parser.add_argument("--in", dest="input", metavar="PATH", help="Input JSON (or CSV grid).")
        if self.uses_surface:
            parser.add_argument("--surface", choices=sorted(SURFACES), help="Use a built-in analytic surface patch.")
            parser.add_argument("--window", help="u0,u1,v0,v1,nu,nv of the built-in patch.")
        parser.add_argument("--out", metavar="PATH", help="Write the result here instead of stdout.")
        parser.add_argument("--tol", type=float, help="Override LIEGEO_TOL for this run.")
        parser.add_argument("--record", action="store_true", help="Persist the run in the database.")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def validate(self, options):
        if options.get("tol") is not None and not options["tol"] > 0:
            raise InvalidRunConfig(f"--tol must be positive, got {options['tol']}")
        if options.get("order") is not None and options["order"] < 2:
            raise InvalidRunConfig(f"--order must be at least 2, got {options['order']}")
        path = options.get("input")
        if path is not None and not Path(path).is_file():
            raise InvalidRunConfig(f"input file {path} does not exist")
        if self.uses_surface and (path is None) == (options.get("surface") is None):
            raise InvalidRunConfig("give exactly one of --in and --surface")
        if self.uses_input and not self.uses_surface and path is None:
            raise InvalidRunConfig("--in is required")

    def handle(self, *args, **options):
        started = time.perf_counter()
        config = {name: value for name, value in options.items() if name not in FRAMEWORK_OPTIONS}
        try:
            self.validate(options)
            with conf.override(TOL=options.get("tol")):
                report = self.run(**options)
        except LiegeoError as error:
            logger.info(f"{self.command_name}: failed with {error.code} after {time.perf_counter() - started:.2f}s")
            if options["record"]:
                self.record(config, None, error)
            where = "" if error.location is None else f" at {error.location}"
            raise CommandError(f"{error.code}{where}: {error.message}", returncode=error.exit_code)
        logger.info(f"{self.command_name}: ok in {time.perf_counter() - started:.2f}s")
        if options["record"]:
            self.record(config, report)
        self.emit(report, options.get("out"))

    def run(self, **options):
        raise NotImplementedError("subclasses of LiegeoCommand must provide a run() method")

    def emit(self, report, out=None):
        if report is None:
            return
        if out is None:
            self.stdout.write(dumps(report), ending="")
        elif Path(out).suffix.lower() == ".csv":
            write_csv(out, report)
        else:
            write_json(out, report)

    def record(self, config, report, error=None):
        run = Run.objects.create(
            command=self.command_name,
            config=json.loads(dumps(config)),
            report=None if report is None else json.loads(dumps(report)),
            status=Run.Status.OK if error is None else Run.Status.FAILED,
            exit_code=0 if error is None else error.exit_code,
            error_code="" if error is None else error.code,
        )
        logger.debug(f"recorded run {run.pk}")
        return run

    # inputs

    def surface(self, options):
        """
        The input grid: a file (Euclidean or Legendre) or a built-in patch.
        """
        if options.get("surface"):
            kwargs = {}
            if options.get("window"):
                u0, u1, v0, v1, nu, nv = parse_window(options["window"])
                kwargs = dict(nu=nu, nv=nv, u_range=(u0, u1), v_range=(v0, v1))
            try:
                return SURFACES[options["surface"]](**kwargs)
            except ValueError as error:
                raise InvalidRunConfig(str(error))
        return read_surface(options["input"])

    def legendre_surface(self, options):
        grid = self.surface(options)
        if isinstance(grid, EuclideanSurfaceGrid):
            return lift_euclidean(grid)
        return grid

    def invariant_pipeline(self, options):
        """
        (surface, normal frame, Blaschke coframe, invariants) of the input.
        """
        s = self.legendre_surface(options)
        frame, cof = reduce_to_normal_frame(s, tol=options.get("tol"))
        inv = extract_invariants(frame, cof, tol=options.get("tol"))
        logger.debug(f"{self.command_name}: invariants on a {s.shape[0]}x{s.shape[1]} grid")
        return s, frame, cof, inv

    def write_mesh(self, path, legendre_grid):
        if Path(path).suffix.lower() != ".obj":
            raise InvalidRunConfig(f"meshes are written as .obj, got {path}")
        points, normals = legendre_grid.points()
        write_obj(path, points, normals)
