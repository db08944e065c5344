import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdiv import algebra as al
from qdiv.algebra import Subalgebra, SubalgebraChain
from qdiv.divergences import FdState, sandwiched_d, sandwiched_q
from qdiv.errors import DimMismatch, NotProjection, TooLarge, ValidationError
from qdiv.linalg import loewner_leq
from qdiv.sampling import random_density, random_hermitian, random_unitary

from .conftest import PLUS, SIGMA_Q, seeds


def random_subalgebra(seed):
    rng = np.random.default_rng(seed)
    pattern = [((1, 4),), ((1, 2), (1, 2)), ((2, 2),), ((1, 1), (1, 1), (2, 1)), ((1, 1), (1, 3)), ((4, 1),)]
    return Subalgebra(4, random_unitary(4, rng), pattern[rng.integers(len(pattern))])


def test_expectation_examples():
    x = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    np.testing.assert_allclose(al.conditional_expectation(x, Subalgebra.diagonal(2)).entries, np.diag([1, 3]))
    np.testing.assert_allclose(al.conditional_expectation(x, Subalgebra.scalars(2)).entries, 2 * np.eye(2))


def test_expectation_partial_trace_m2_tensor_1():
    N = Subalgebra(4, np.eye(4), ((2, 2),))
    x = random_hermitian(4, 0)
    # id (x) normalized partial trace, tensored back with 1_2
    red = np.einsum("ikjk->ij", x.reshape(2, 2, 2, 2)) / 2
    np.testing.assert_allclose(al.conditional_expectation(x, N).entries, np.kron(red, np.eye(2)), atol=1e-14)
    # trace self-adjointness on the matrix-unit basis of M_4
    units = [np.outer(np.eye(4)[i], np.eye(4)[j]) for i in range(4) for j in range(4)]
    for a in units:
        for b in units:
            Ea = al.conditional_expectation(0.5 * (a + a.T), N).entries
            Eb = al.conditional_expectation(0.5 * (b + b.T), N).entries
            assert np.isclose(np.trace(Ea @ (0.5 * (b + b.T))), np.trace((0.5 * (a + a.T)) @ Eb), atol=1e-14)


@given(seeds)
def test_expectation_properties(seed):
    N = random_subalgebra(seed)
    rng = np.random.default_rng(seed)
    x = random_hermitian(4, rng)
    Ex = al.conditional_expectation(x, N).entries
    np.testing.assert_allclose(al.conditional_expectation(np.eye(4), N).entries, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(al.conditional_expectation(Ex, N).entries, Ex, atol=1e-9)
    assert np.trace(Ex).real == pytest.approx(np.trace(x).real, abs=1e-9)
    rho = random_density(4, seed=rng)
    assert np.linalg.eigvalsh(al.conditional_expectation(rho, N).entries)[0] >= -1e-12
    # bimodule property on matrix units of N
    units = N.matrix_units()
    for a in units[:3]:
        for b in units[-3:]:
            lhs = a @ x @ b
            Elhs = al.conditional_expectation(0.5 * (lhs + lhs.conj().T), N).entries
            rhs = a @ Ex @ b
            assert np.abs(Elhs - 0.5 * (rhs + rhs.conj().T)).max() <= 1e-9


def test_restriction_examples():
    rho = random_density(3, seed=3)
    full = al.restrict_state(rho, Subalgebra.full(3))
    np.testing.assert_allclose(full.dense(), rho, atol=1e-14)
    diag = al.restrict_state(PLUS, Subalgebra.diagonal(2))
    np.testing.assert_allclose(diag.dense(), np.eye(2) / 2, atol=1e-15)
    scalar = al.restrict_state(rho, Subalgebra.scalars(3))
    assert scalar.algebra == (1,) and scalar.weight == pytest.approx(1.0)


@given(seeds, st.sampled_from([0.5, 0.75, 2.0, 3.0]))
def test_restriction_intrinsic_equals_ambient_and_dpi(seed, alpha):
    N = random_subalgebra(seed)
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(4, seed=rng), random_density(4, seed=rng)
    intrinsic = sandwiched_d(al.restrict_state(rho, N), al.restrict_state(sigma, N), alpha)
    ambient = sandwiched_d(al.restrict_ambient(rho, N), al.restrict_ambient(sigma, N), alpha)
    assert intrinsic == pytest.approx(ambient, abs=1e-9)
    assert intrinsic <= sandwiched_d(rho, sigma, alpha) + 1e-9
    # the restricted functional agrees with rho on N
    r = al.restrict_ambient(rho, N).dense()
    for u in N.matrix_units():
        assert np.trace(r @ u) == pytest.approx(np.trace(rho @ u), abs=1e-10)


def test_corner_examples():
    rho = random_density(3, seed=5)
    one = al.corner_restrict(rho, np.eye(3))
    np.testing.assert_allclose(one.blocks[0].entries, rho, atol=1e-14)
    assert one.blocks[1].entries[0, 0] == pytest.approx(0.0, abs=1e-14)
    zero = al.corner_restrict(rho, np.zeros((3, 3)))
    assert zero.algebra == (1,) and zero.weight == pytest.approx(1.0)
    with pytest.raises(NotProjection):
        al.corner_restrict(rho, np.diag([0.5, 1, 0]))


@given(seeds, st.integers(1, 3), st.sampled_from([0.5, 0.75, 1.5, 2.0, 3.0]))
def test_corner_decomposition(seed, rank, alpha):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(4, seed=rng), random_density(4, seed=rng)
    U = random_unitary(4, rng)[:, :rank]
    lhs, rhs = al.corner_decomposition_terms(rho, sigma, U @ U.conj().T, alpha)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_pinch_examples():
    out = al.pinch(PLUS, SIGMA_Q)
    np.testing.assert_allclose(out.dense(), np.eye(2) / 2, atol=1e-15)
    rho = np.diag([0.2, 0.8])
    np.testing.assert_allclose(al.pinch(rho, SIGMA_Q).dense(), rho)
    r = random_density(3, seed=1)
    np.testing.assert_allclose(al.pinch(r, np.eye(3) / 3).dense(), r, atol=1e-14)


@given(seeds)
def test_pinching_inequalities(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(4, seed=rng)
    U = random_unitary(4, rng)
    sigma = U @ np.diag([0.4, 0.2, 0.2, 0.2]) @ U.conj().T
    p = al.pinch(rho, sigma).dense()
    v = al.distinct_eigenvalue_count(sigma)
    assert v == 2
    assert np.linalg.norm(p @ sigma - sigma @ p) <= 1e-9
    assert loewner_leq(rho, v * p, 1e-9)
    for alpha in (1.5, 2.0, 3.0):
        assert sandwiched_q(p, sigma, alpha) >= sandwiched_q(rho, sigma, alpha) / v**alpha - 1e-9


def test_tensor_power_state():
    rho, sigma = PLUS, SIGMA_Q
    assert al.tensor_power_state(rho, 1).dense() == pytest.approx(rho)
    r2, s2 = al.tensor_power_state(rho, 2), al.tensor_power_state(sigma, 2)
    assert r2.dim == 4
    assert sandwiched_q(r2, s2, 2) == pytest.approx(sandwiched_q(rho, sigma, 2) ** 2, rel=1e-9)
    half = FdState([0.5 * PLUS])
    assert al.tensor_power_state(half, 3).weight == pytest.approx(0.125)
    with pytest.raises(TooLarge):
        al.tensor_power_state(rho, 15)


def test_martingale_examples():
    chain = SubalgebraChain(2, [Subalgebra.scalars(2), Subalgebra.diagonal(2), Subalgebra.full(2)])
    seq = al.martingale_sequence(PLUS, SIGMA_Q, chain, 2)
    assert seq[0] == pytest.approx(0.0, abs=1e-12)
    assert seq[1] == pytest.approx(np.log(1.125), abs=1e-12)
    assert seq[2] == pytest.approx(0.7819179210, abs=1e-9)
    assert seq[0] < seq[1] < seq[2]
    assert al.martingale_sequence(PLUS, PLUS, chain, 2) == pytest.approx([0, 0, 0], abs=1e-12)
    rep = SubalgebraChain(2, [Subalgebra.diagonal(2), Subalgebra.diagonal(2)])
    a, b = al.martingale_sequence(PLUS, SIGMA_Q, rep, 2)
    assert a == b


@given(seeds, st.integers(0, 2), st.sampled_from([0.5, 2.0]))
def test_martingale_monotone(seed, variant, alpha):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(4, seed=rng), random_density(4, seed=rng)
    chain = al.nested_chain_m4(random_unitary(4, rng), variant)
    seq = al.martingale_sequence(rho, sigma, chain, alpha)
    assert np.all(np.diff(seq) >= -1e-10)
    assert seq[-1] == pytest.approx(sandwiched_d(rho, sigma, alpha), abs=1e-9)


def test_chain_validation_and_json():
    with pytest.raises(ValidationError):
        SubalgebraChain(2, [Subalgebra.full(2), Subalgebra.diagonal(2)])
    with pytest.raises(DimMismatch):
        SubalgebraChain(2, [Subalgebra.full(3)])
    chain = al.nested_chain_m4(random_unitary(4, 1), 1)
    back = SubalgebraChain.from_json(chain.to_json())
    for a, b in zip(chain.links, back.links):
        assert a.pattern == b.pattern
        np.testing.assert_allclose(a.basis_change, b.basis_change)


def test_subalgebra_validation():
    with pytest.raises(ValidationError):
        Subalgebra(2, np.eye(2), ((1, 1),))
    with pytest.raises(ValidationError):
        Subalgebra(2, np.array([[1, 1], [0, 1]]), ((2, 1),))
