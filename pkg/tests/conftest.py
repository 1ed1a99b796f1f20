"""Shared fixtures: metrics and solution families reused across test modules."""

import numpy as np
import pytest

from aclab.elliptic import SolveOptions, continuation, shooting_scan, default_alpha_grid, symmetric_solution
from aclab.geometry import SphereMetric


@pytest.fixture(scope="session")
def metric257():
    return SphereMetric(n=3, r=3.0, N=257)


@pytest.fixture(scope="session")
def metric513():
    return SphereMetric(n=3, r=3.0, N=513)


@pytest.fixture(scope="session")
def metric1025():
    return SphereMetric(n=3, r=3.0, N=1025)


@pytest.fixture(scope="session")
def metric_short257():
    return SphereMetric(n=3, r=1.5, N=257)


@pytest.fixture(scope="session")
def tight_opts():
    return SolveOptions(tolerance=1e-12)


@pytest.fixture(scope="session")
def v_family_1025(metric1025):
    """Symmetric solutions at eps = 1.2, 0.6, 0.3 on the N=1025 grid."""
    opts = SolveOptions(tolerance=1e-10)
    records = continuation(metric1025, (1.2, 0.6, 0.3), opts)
    return dict(zip((1.2, 0.6, 0.3), records))


@pytest.fixture(scope="session")
def v06_257(metric257, tight_opts):
    return symmetric_solution(metric257, 0.6, tight_opts)


@pytest.fixture(scope="session")
def v06_short(metric_short257, tight_opts):
    return symmetric_solution(metric_short257, 0.6, tight_opts)


@pytest.fixture(scope="session")
def census06_257(metric257, tight_opts):
    """Shooting census at eps = 0.6 on the r=3 metric."""
    return shooting_scan(metric257, 0.6, default_alpha_grid(400), tight_opts)
