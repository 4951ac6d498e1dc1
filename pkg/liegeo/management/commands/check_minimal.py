import logging

import numpy as np

from liegeo.surface_invariants import (
    el_residuals,
    gauss_map,
    lie_area,
    mean_curvature_vanishes,
    shape_and_mean_curvature,
)

from ._base import LiegeoCommand

logger = logging.getLogger(__name__)


class Command(LiegeoCommand):
    help = "Evaluate the Euler-Lagrange system and the mean curvature of the Gauss map."
    uses_surface = True

    def add_command_arguments(self, parser):
        parser.add_argument("--margin", type=int, default=2, help="Boundary layers left out of the residuals.")

    def run(self, **options):
        _, frame, cof, inv = self.invariant_pipeline(options)
        margin = options["margin"]
        el = el_residuals(inv, cof, tol=options["tol"], margin=margin)
        shape = shape_and_mean_curvature(inv, cof, tol=options["tol"])
        gauss = gauss_map(frame, tol=options["tol"])
        H = np.abs(shape.H[margin:shape.H.shape[0] - margin, margin:shape.H.shape[1] - margin])
        harmonic = mean_curvature_vanishes(shape, el, margin)
        if harmonic != el.is_minimal:
            logger.warning(f"mean curvature and Euler-Lagrange residuals disagree at threshold {el.threshold:.3e}")
        if not el.is_minimal:
            logger.debug(f"not minimal: max R1 {el.max_R1:.3e}, max R2 {el.max_R2:.3e}")
        return {
            "is_minimal": el.is_minimal,
            "max_R1": el.max_R1,
            "max_R2": el.max_R2,
            "threshold": el.threshold,
            "consistency": el.consistency,
            "max_mean_curvature": float(np.max(H)),
            "mean_curvature_vanishes": harmonic,
            "mean_curvature_discrepancy": shape.discrepancy,
            "lie_area": lie_area(cof),
            "gauss_map": {"deviation": gauss.deviation, "relative_deviation": gauss.relative_deviation},
            "orientation": cof.orientation,
        }
