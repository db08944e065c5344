import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qdiv.sampling import random_density

settings.register_profile(
    "qdiv", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("qdiv")

PLUS = np.full((2, 2), 0.5)
SIGMA_Q = np.diag([2 / 3, 1 / 3])
P_C = np.diag([0.5, 0.5])
Q_C = np.diag([1 / 3, 2 / 3])


@pytest.fixture
def qubit_pair():
    """Noncommuting pair (|+><+|, diag(2/3, 1/3))."""
    return PLUS.copy(), SIGMA_Q.copy()


@pytest.fixture
def classical_pair():
    return P_C.copy(), Q_C.copy()


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=5)


@st.composite
def state_pairs(draw, min_dim=2, max_dim=5, full_rank=True, mix=0.0):
    """Hilbert-Schmidt random pairs; ``mix`` blends both with the maximally mixed state."""
    d = draw(st.integers(min_value=min_dim, max_value=max_dim))
    s1, s2 = draw(seeds), draw(seeds)
    rank = None if full_rank else draw(st.integers(min_value=1, max_value=d))
    rho = random_density(d, rank=rank, seed=s1)
    sigma = random_density(d, seed=s2)
    if mix:
        rho = (1 - mix) * rho + mix * np.eye(d) / d
        sigma = (1 - mix) * sigma + mix * np.eye(d) / d
    return rho, sigma


alphas = st.sampled_from([0.5, 0.6, 0.75, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0])


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion that ran."""
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: (int(k.rstrip("b")), k)):
        terminalreporter.write_line(results[key])
