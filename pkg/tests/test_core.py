import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomphase.core import (
    canonical_gauge,
    check_hermitian,
    check_unitary,
    degeneracy_blocks,
    eig_hermitian,
    inner_product,
    pancharatnam_phase,
    rays_equal,
    spin_operators,
    state,
    wrap_phase,
)
from geomphase.errors import ContractViolation, UndefinedPhaseError

from conftest import random_hermitian, random_state

SPINS = [0.5, 1, 1.5, 2, 2.5, 3]


def test_state_normalizes():
    v = state([3.0, 4.0j])
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert v.dtype == complex


def test_state_rejects_zero_and_empty():
    with pytest.raises(ContractViolation):
        state([0.0, 0.0])
    with pytest.raises(ContractViolation):
        state([])


def test_wrap_phase_branch():
    assert wrap_phase(np.pi) == np.pi
    assert wrap_phase(-np.pi) == np.pi
    assert abs(wrap_phase(3 * np.pi / 2) + np.pi / 2) < 1e-15
    x = np.linspace(-20, 20, 1001)
    w = wrap_phase(x)
    assert np.all((w > -np.pi) & (w <= np.pi))
    assert np.allclose(np.exp(1j * w), np.exp(1j * x))


def test_inner_product_examples():
    assert inner_product([1, 0], [0, 1]) == 0
    a = state([1, 1j])
    assert abs(inner_product(a, a) - 1) < 1e-15
    assert abs(inner_product(state([1, 1]), [1, 0]) - 1 / np.sqrt(2)) < 1e-15


def test_inner_product_conjugates_first_argument():
    assert inner_product([1j, 0], [1, 0]) == -1j


def test_inner_product_dimension_mismatch():
    with pytest.raises(ContractViolation):
        inner_product([1, 0], [1, 0, 0])


def test_pancharatnam_phase_examples(rng):
    a = random_state(rng, 3)
    assert abs(pancharatnam_phase(a, np.exp(1j * np.pi / 3) * a) - np.pi / 3) < 1e-12
    assert pancharatnam_phase(a, 2.5 * a) == 0.0
    with pytest.raises(UndefinedPhaseError):
        pancharatnam_phase([1, 0], [0, 1])


def test_pancharatnam_phase_exact_zero_for_real_positive_overlap():
    a = state([1.0, 0.0])
    b = state([1.0, 1.0])
    assert pancharatnam_phase(a, b) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_pancharatnam_phase_antisymmetric(dim, seed):
    r = np.random.default_rng(seed)
    a, b = random_state(r, dim), random_state(r, dim)
    if abs(np.vdot(a, b)) < 1e-6:
        return
    assert abs(wrap_phase(pancharatnam_phase(a, b) + pancharatnam_phase(b, a))) < 1e-12


def test_spin_half_sz():
    _, _, sz = spin_operators(0.5)
    assert np.allclose(sz, np.diag([0.5, -0.5]))


@pytest.mark.parametrize("s", SPINS)
def test_spin_commutator_and_casimir(s):
    sx, sy, sz = spin_operators(s)
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-12
    assert np.max(np.abs(sy @ sz - sz @ sy - 1j * sx)) < 1e-12
    casimir = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(len(sz)))) < 1e-10


def test_spin_one_eigenvalues():
    _, _, sz = spin_operators(1)
    assert np.allclose(np.diag(sz), [1, 0, -1])


@pytest.mark.parametrize("s", [0.3, -0.5, 1.25])
def test_spin_rejects_non_half_integer(s):
    with pytest.raises(ContractViolation):
        spin_operators(s)


def test_spin_operators_match_pauli():
    sx, sy, sz = spin_operators(0.5)
    assert np.allclose(2 * sx, [[0, 1], [1, 0]])
    assert np.allclose(2 * sy, [[0, -1j], [1j, 0]])


def test_check_hermitian_and_unitary():
    with pytest.raises(ContractViolation):
        check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ContractViolation):
        check_unitary(np.array([[1, 1], [0, 1]]))
    check_unitary(np.array([[0, 1j], [1j, 0]]))


def test_eig_hermitian_examples():
    f = eig_hermitian(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(f.eigenvalues, [1, 2, 3])
    assert np.allclose(np.abs(f.vectors), np.eye(3))
    sx, _, _ = spin_operators(0.5)
    assert np.allclose(eig_hermitian(sx).eigenvalues, [-0.5, 0.5])


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        eig_hermitian(np.array([[1, 2], [0, 1]]))


def test_spectral_frame_invariants_on_random_matrices(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 9))
        H = random_hermitian(rng, d)
        f = eig_hermitian(H)
        V = f.vectors
        assert np.all(np.diff(f.eigenvalues) >= 0)
        assert np.max(np.abs(V.conj().T @ V - np.eye(d))) < 1e-10
        assert np.max(np.linalg.norm(H @ V - V * f.eigenvalues, axis=0)) < 1e-9
        assert np.max(np.abs((V * f.eigenvalues) @ V.conj().T - H)) < 1e-9
        assert sorted(i for b in f.blocks for i in b) == list(range(d))


def test_degeneracy_blocks_cluster_by_tolerance():
    assert degeneracy_blocks([0.0, 1e-12, 1.0, 1.0 + 1e-11, 2.0]) == ((0, 1), (2, 3), (4,))
    assert degeneracy_blocks([0.0, 1e-6, 1.0]) == ((0,), (1,), (2,))


def test_canonical_gauge_largest_component_real_positive(rng):
    v = random_state(rng, 5) * np.exp(1.3j)
    c = canonical_gauge(v)
    k = np.argmax(np.abs(c))
    assert c[k].imag == 0 and c[k].real > 0
    assert rays_equal(c, v)


def test_canonical_gauge_is_ray_function(rng):
    v = random_state(rng, 4)
    a = canonical_gauge(v)
    b = canonical_gauge(np.exp(2.1j) * v)
    assert np.max(np.abs(a - b)) < 1e-14


def test_rays_equal_examples():
    a = state([1, 0])
    assert rays_equal(a, np.exp(0.7j) * a)
    assert not rays_equal(a, [0, 1])
    eps = 1e-3
    assert not rays_equal(a, [np.sqrt(1 - eps**2), eps])
    with pytest.raises(ContractViolation):
        rays_equal(a, [1, 0, 0])


def test_rays_equal_is_equivalence(rng):
    for _ in range(50):
        a = random_state(rng, 3)
        b = np.exp(1j * rng.uniform(0, 2 * np.pi)) * a
        c = np.exp(1j * rng.uniform(0, 2 * np.pi)) * b
        assert rays_equal(a, a)
        assert rays_equal(a, b) and rays_equal(b, a)
        assert rays_equal(a, c)
        other = random_state(rng, 3)
        assert rays_equal(a, other) == rays_equal(other, a)
