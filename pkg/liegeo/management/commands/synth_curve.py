import numpy as np

from liegeo.exceptions import InvalidRunConfig
from liegeo.legendre_curves import CURVATURES, curve_from_curvatures, frenet_series
from liegeo.serializers import curve_to_dict, read_json
from liegeo.series import PowerSeries

from ._base import LiegeoCommand


def _coefficients(value, name):
    """
    A number or a list of Taylor coefficients at t = 0.
    """
    try:
        coef = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError):
        raise InvalidRunConfig(f"{name} must be a number or a list of coefficients")
    if coef.ndim != 1 or not np.all(np.isfinite(coef)):
        raise InvalidRunConfig(f"{name} must be a number or a list of coefficients")
    return PowerSeries(coef)


class Command(LiegeoCommand):
    help = (
        "Integrate the Frenet system of prescribed curvatures. The input holds k0..k3 and mu as "
        "numbers or polynomial coefficients, optional R0, and t0, t1, samples."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--order", type=int, help="Return the curve as a power series of this order instead of samples.")

    def run(self, **options):
        payload = read_json(options["input"])
        try:
            k = [_coefficients(payload[name], name) for name in CURVATURES]
        except KeyError as error:
            raise InvalidRunConfig(f"curvature input lacks {error.args[0]!r}")
        mu = _coefficients(payload.get("mu", 1.0), "mu")
        frame0 = payload.get("R0")
        if frame0 is not None and frame0 != "identity":
            frame0 = np.asarray(frame0, dtype=float).reshape(6, 6)
        else:
            frame0 = None

        if options["order"] is not None:
            order = options["order"]
            ks = [PowerSeries(x.coef, order=order) for x in k]
            curve, R = frenet_series(ks, PowerSeries(mu.coef, order=order), frame0, order)
            return dict(curve_to_dict(curve), frames=R)

        samples = int(payload.get("samples", 1001))
        if samples < 3:
            raise InvalidRunConfig("samples must be at least 3")
        t = np.linspace(float(payload.get("t0", 0.0)), float(payload.get("t1", 1.0)), samples)
        curve, data = curve_from_curvatures(k, mu, t, frame0)
        return dict(curve_to_dict(curve), frames=data.frames.reshape(samples, 36))
