import contextvars
from contextlib import contextmanager

DEGREE_CAP = 64

# numeric tolerances
RANK_TOL = 1e-9
HERMITIAN_TOL = 1e-12
PSC_FAIL_TOL = 1e-7
INEXACT_TOL = 1e-10
SUBHARMONIC_TOL = 1e-9
MATCH_TOL = 1e-9
LIMIT_TOL = 1e-9
BOUND_SLACK = 1e-12

NEIGHBORHOOD_RADIUS = 2.0

TAU_SMALL = 0.1
Q_EXPONENT = 0.1
Q_SAMPLES = 512

WINDOW = 3
JMAX = 64
SUBHARMONIC_SAMPLES = 4096
SUBHARMONIC_RADII = 64

PROBE_MARGIN = 1e-3
PROBE_POINTS = 100

# Max number of per-j stages scheduled at once
BATCH_SIZE = 8

SEED = 100

_degree_cap = contextvars.ContextVar("degree_cap", default=DEGREE_CAP)


def get_degree_cap() -> int:
    return _degree_cap.get()


@contextmanager
def degree_cap(cap: int):
    if cap < 0:
        raise ValueError("degree cap must be nonnegative")
    token = _degree_cap.set(cap)
    try:
        yield cap
    finally:
        _degree_cap.reset(token)
