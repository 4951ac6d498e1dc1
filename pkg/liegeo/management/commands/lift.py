from pathlib import Path

from liegeo.exceptions import InvalidRunConfig
from liegeo.serializers import grid_columns, legendre_grid_to_dict
from liegeo.surface_invariants import EuclideanSurfaceGrid, lift_euclidean

from ._base import LiegeoCommand


class Command(LiegeoCommand):
    help = "Lift a curvature-line Euclidean surface grid to its Legendre surface."
    uses_surface = True

    def run(self, **options):
        grid = self.surface(options)
        if not isinstance(grid, EuclideanSurfaceGrid):
            raise InvalidRunConfig(f"{options['input']} already holds a Legendre surface")
        s = lift_euclidean(grid)
        if options["out"] and Path(options["out"]).suffix.lower() == ".csv":
            return grid_columns(s.u, s.v, {"phi0": s.phi0, "phi1": s.phi1})
        return dict(legendre_grid_to_dict(s), residuals=s.residuals())
