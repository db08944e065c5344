import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import comb, logsumexp

from qdiv import kernels

from .conftest import seeds

BACKENDS = kernels.backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    if os.environ.get("QDIV_PURE_PYTHON"):
        assert kernels.BACKEND == "python"


def test_pure_python_switch():
    env = dict(os.environ, QDIV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qdiv; print(qdiv.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_log_binom_moments_oracle(name):
    k = BACKENDS[name]
    lam = np.array([0.0, 0.3, 1.0])
    w = np.array([0.2, 0.5, 0.3])
    with np.errstate(divide="ignore"):
        got = np.asarray(k.log_binom_moments(np.log(w), np.log(lam), np.log1p(-lam), 6))
    expected = [np.log(np.sum(w * lam**j * (1 - lam) ** (6 - j))) for j in range(7)]
    np.testing.assert_allclose(got, expected, rtol=1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_enumerate_types_counts(name):
    k = BACKENDS[name]
    for n, m in ((0, 3), (5, 1), (7, 3), (12, 4)):
        t = np.asarray(k.enumerate_types(n, m))
        assert t.shape == (comb(n + m - 1, m - 1, exact=True), m)
        assert np.all(t.sum(axis=1) == n) and t.min() >= 0
        assert len({tuple(r) for r in t}) == len(t)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_greedy_fill_examples(name):
    k = BACKENDS[name]
    lp, lq = np.log([0.5, 0.3, 0.2]), np.log([0.1, 0.3, 0.6])
    # budget 0.25: take class 0 fully, then half of class 1
    ls, lu, idx, gamma = k.greedy_fill(lp, lq, math.log(0.25))
    assert idx == 1 and gamma == pytest.approx(0.5)
    assert math.exp(ls) == pytest.approx(0.65)
    assert math.exp(lu) == pytest.approx(0.25)
    ls, lu, idx, gamma = k.greedy_fill(lp, lq, 0.0)
    assert idx == -1 and math.exp(ls) == pytest.approx(1.0)


@needs_ext
@given(seeds, st.integers(0, 60), st.integers(1, 12))
def test_backends_agree_moments(seed, n, atoms):
    rng = np.random.default_rng(seed)
    lam = rng.random(atoms)
    w = rng.random(atoms) + 1e-3
    args = (np.log(w), np.log(lam), np.log1p(-lam), n)
    a = np.asarray(BACKENDS["python"].log_binom_moments(*args))
    b = np.asarray(BACKENDS["cython"].log_binom_moments(*args))
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)
    ref = [logsumexp(np.log(w) + j * np.log(lam) + (n - j) * np.log1p(-lam)) for j in range(n + 1)]
    np.testing.assert_allclose(b, ref, rtol=1e-12, atol=1e-12)


@needs_ext
@given(seeds, st.integers(1, 200), st.floats(-30.0, 0.0))
def test_backends_agree_greedy(seed, m, log_budget):
    rng = np.random.default_rng(seed)
    lp = np.log(rng.dirichlet(np.ones(m)))
    lq = np.log(rng.dirichlet(np.ones(m)))
    order = np.argsort(-(lp - lq))
    lp, lq = np.ascontiguousarray(lp[order]), np.ascontiguousarray(lq[order])
    a = BACKENDS["python"].greedy_fill(lp, lq, log_budget)
    b = BACKENDS["cython"].greedy_fill(lp, lq, log_budget)
    assert a[2] == b[2]
    np.testing.assert_allclose([a[0], a[1], a[3]], [b[0], b[1], b[3]], rtol=1e-12, atol=1e-14)


@needs_ext
@given(st.integers(0, 15), st.integers(1, 5))
def test_backends_agree_types(n, m):
    a = np.asarray(BACKENDS["python"].enumerate_types(n, m))
    b = np.asarray(BACKENDS["cython"].enumerate_types(n, m))
    np.testing.assert_array_equal(a, b)
