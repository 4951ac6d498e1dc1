from liegeo.legendre_curves import PolarizationSection, directrix, frenet_frame, is_linearly_full, is_polarization
from liegeo.serializers import read_curve

from ._base import LiegeoCommand


class Command(LiegeoCommand):
    help = "Frenet frame, line element and curvatures k0..k3 of a Legendre curve polarized by V0."

    def run(self, **options):
        c = read_curve(options["input"])
        p = PolarizationSection.first_vector(c)
        data = frenet_frame(c, p)
        report = {
            "t": data.t,
            "mu": data.mu,
            "curvatures": data.curvatures(),
            "frames": data.frames.reshape(len(data.t), 36),
            "linearly_full": is_linearly_full(c),
            "polarization": is_polarization(p).mask,
            "fatness_rank": directrix(p).fatness_rank,
        }
        if data.series is not None:
            report["series"] = data.series
        return report
