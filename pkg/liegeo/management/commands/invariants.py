from pathlib import Path

from liegeo.serializers import grid_columns
from liegeo.surface_invariants import pfaffian_residuals, structure_residuals, zero_curvature_residual

from ._base import LiegeoCommand


class Command(LiegeoCommand):
    help = "Reduce a surface to its normal frame and report the invariants q, p, r with residual norms."
    uses_surface = True

    def add_command_arguments(self, parser):
        parser.add_argument("--margin", type=int, default=2, help="Boundary layers left out of residual norms.")

    def run(self, **options):
        s, frame, cof, inv = self.invariant_pipeline(options)
        if options["out"] and Path(options["out"]).suffix.lower() == ".csv":
            return grid_columns(s.u, s.v, dict(inv.as_dict(), a=cof.a, b=cof.b))
        margin = options["margin"]
        return {
            "u": s.u,
            "v": s.v,
            "invariants": inv.as_dict(),
            "coframe": {"a": cof.a, "b": cof.b, "orientation": cof.orientation},
            "residuals": {
                "pfaffian": pfaffian_residuals(frame, margin),
                "invariants": inv.residuals,
                "structure": structure_residuals(inv, cof, margin),
                "zero_curvature": zero_curvature_residual(inv, cof),
            },
        }
