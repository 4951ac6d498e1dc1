from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
import logging
import os

from django.conf import settings

logger = logging.getLogger(__name__)

DEFAULTS = {
    "TOL": 1e-9,
    "RANK_RTOL": 1e-9,
    "STALK_RTOL": 1e-8,
    "DEGENERACY_RTOL": 1e-6,
    "CURVATURE_LINE_RTOL": 1e-2,
    "ISOTROPY_RTOL": 1e-6,
    "CONTACT_RTOL": 1e-2,
    "SIGN_JUMP": 0.5,
    "SERIES_ORDER": 6,
    "TRUST_RTOL": 1e-3,
    "EL_SAFETY": 10.0,
    "JET_DEGREE": 14,
    "JET_HALF_WIDTH": 0.2,
    "THREADS": 1,
}


# per-invocation values set by `override`, visible to worker threads
_overrides = {}


def get(name):
    """
    Return the `LIEGEO_<name>` setting, falling back to the packaged default.
    """
    if name in _overrides:
        return _overrides[name]
    return getattr(settings, f"LIEGEO_{name}", DEFAULTS[name])


@contextmanager
def override(**values):
    """
    Temporarily replace settings, e.g. `with conf.override(TOL=1e-6): ...`.
    """
    unknown = set(values) - set(DEFAULTS)
    if unknown:
        raise KeyError(f"unknown liegeo settings: {', '.join(sorted(unknown))}")
    saved = dict(_overrides)
    _overrides.update({name: value for name, value in values.items() if value is not None})
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(saved)


def tol(override=None):
    return get("TOL") if override is None else override


def threads():
    """
    Thread-pool cap. The LIEGEO_THREADS environment variable wins over settings.
    """
    raw = os.environ.get("LIEGEO_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"ignoring non-integer LIEGEO_THREADS={raw!r}")
    return max(1, int(get("THREADS")))


def thread_map(function, items):
    """
    `map` over a thread pool of at most `threads()` workers, in order.
    """
    items = list(items)
    workers = min(threads(), max(1, len(items)))
    if workers == 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))
