import numpy as np
import pytest
from scipy.linalg import expm

from geomphase.core import spin_operators
from geomphase.errors import ContractViolation
from geomphase.evolution import (
    HamiltonianFamily,
    ParameterPath,
    PhaseDecomposition,
    Trajectory,
    dynamical_phase,
    evolve,
    propagator,
)
from geomphase.systems import constant_family, cone_path, spin_field_family

from conftest import random_hermitian, random_state


def const_path(T, closed=True):
    return ParameterPath(np.array([0.0, T]), np.zeros((2, 1)), closed=closed)


def smooth_family(rng, dim):
    A, B, C = (random_hermitian(rng, dim) for _ in range(3))

    def H(p):
        t = p[0]
        return A + np.sin(t) * B + np.cos(2 * t) * C

    return HamiltonianFamily(H, dim)


def line_path(T, n=2):
    t = np.linspace(0.0, T, n)
    return ParameterPath(t, t[:, None])


def test_zero_hamiltonian_keeps_state(rng):
    psi = random_state(rng, 3)
    traj = evolve(constant_family(np.zeros((3, 3))), const_path(2.0), psi, 50)
    assert np.allclose(traj.states, psi)
    assert dynamical_phase(traj) == 0.0
    assert np.allclose(propagator(constant_family(np.zeros((3, 3))), const_path(2.0), 5), np.eye(3))


def test_identity_hamiltonian_global_phase(rng):
    psi = random_state(rng, 2)
    traj = evolve(constant_family(np.eye(2)), const_path(np.pi), psi, 10)
    assert np.allclose(traj.final, np.exp(-1j * np.pi) * psi, atol=1e-12)


def test_spin_half_along_z_matches_exponential_oracle():
    kappa_b, T = 1.7, 2.3
    sz = spin_operators(0.5)[2]
    traj = evolve(constant_family(kappa_b * sz), const_path(T), [1, 0], 7)
    assert np.allclose(traj.final, np.exp(-0.5j * kappa_b * T) * np.array([1, 0]), atol=1e-12)
    assert np.allclose(traj.final, expm(-1j * kappa_b * sz * T) @ [1, 0], atol=1e-12)


def test_constant_field_propagator_matches_oracle(rng):
    b = rng.normal(size=3)
    S = np.stack(spin_operators(0.5))
    fam = spin_field_family(0.5, coupling=0.8)
    path = ParameterPath(np.array([0.0, 3.0]), np.array([b, b]))
    U = propagator(fam, path, 13)
    oracle = expm(-1j * 0.8 * np.tensordot(b, S, axes=1) * 3.0)
    assert np.max(np.abs(U - oracle)) < 1e-10
    assert np.max(np.abs(U.conj().T @ U - np.eye(2))) < 1e-10


def test_propagator_consistent_with_evolve(rng):
    fam = smooth_family(rng, 4)
    path = line_path(2.0, 9)
    psi = random_state(rng, 4)
    assert np.max(np.abs(propagator(fam, path, 300) @ psi - evolve(fam, path, psi, 300).final)) < 1e-10


def test_propagator_group_property(rng):
    fam = smooth_family(rng, 3)
    path = line_path(2.0)
    left, right = path.split(0.8)
    U = propagator(fam, path, 1000)
    # the same grid: 400 steps on [0, 0.8] and 600 on [0.8, 2]
    assert np.max(np.abs(propagator(fam, right, 600) @ propagator(fam, left, 400) - U)) < 1e-10


def test_steps_must_be_positive(rng):
    with pytest.raises(ContractViolation):
        evolve(constant_family(np.eye(2)), const_path(1.0), [1, 0], 0)


def test_non_hermitian_family_rejected():
    fam = HamiltonianFamily(lambda p: np.array([[0, 1], [0, 0]]), 2)
    with pytest.raises(ContractViolation):
        evolve(fam, const_path(1.0), [1, 0], 3)


def test_dimension_mismatch_rejected():
    with pytest.raises(ContractViolation):
        evolve(constant_family(np.eye(2)), const_path(1.0), [1, 0, 0], 3)


def test_path_validation():
    with pytest.raises(ContractViolation):
        ParameterPath(np.array([0.0, 0.0]), np.zeros((2, 1)))
    with pytest.raises(ContractViolation):
        ParameterPath(np.array([0.0, 1.0]), np.array([[0.0], [1.0]]), closed=True)


def test_dynamical_phase_of_eigenstate():
    E, T = 0.7, 5.0
    traj = evolve(constant_family(np.diag([E, -E])), const_path(T), [1, 0], 20)
    assert abs(dynamical_phase(traj) + E * T) < 1e-9


def test_dynamical_phase_keeps_winding():
    traj = evolve(constant_family(np.diag([3.0, 0.0])), const_path(10.0), [1, 0], 20)
    assert abs(dynamical_phase(traj) + 30.0) < 1e-9


def test_dynamical_phase_adiabatic_cone_sweep():
    kappa_b, T = 1.0, 200.0
    path = cone_path(np.pi / 3, 360).rescaled(T)
    fam = spin_field_family(0.5, kappa_b)
    w, v = np.linalg.eigh(fam(path.points[0]))
    traj = evolve(fam, path, v[:, 1], 20000)
    expected = -kappa_b * T / 2
    assert abs(dynamical_phase(traj) - expected) < 1e-3 * abs(expected)


def test_dynamical_phase_matches_fine_quadrature(rng):
    fam = smooth_family(rng, 3)
    psi = random_state(rng, 3)
    coarse = dynamical_phase(evolve(fam, line_path(1.0), psi, 200))
    fine = dynamical_phase(evolve(fam, line_path(1.0), psi, 3200))
    assert abs(coarse - fine) < 1e-4


def test_norm_drift_over_many_steps(rng):
    fam = smooth_family(rng, 5)
    traj = evolve(fam, line_path(20.0), random_state(rng, 5), 10000)
    assert np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1.0)) < 1e-9


def test_midpoint_rule_second_order(rng):
    fam = smooth_family(rng, 3)
    psi = random_state(rng, 3)
    path = line_path(3.0)
    ref = evolve(fam, path, psi, 6400).final
    errs = [np.linalg.norm(evolve(fam, path, psi, n).final - ref) for n in (100, 200, 400)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.9)


def test_time_reversal_returns_initial_state(rng):
    fam = smooth_family(rng, 4)
    path = line_path(2.0, 5)
    psi = random_state(rng, 4)
    fwd = evolve(fam, path, psi, 400).final
    # backward in time along the same path is forward evolution with -H
    neg = HamiltonianFamily(lambda p: -fam(p), 4)
    back = evolve(neg, path.reversed(), fwd, 400).final
    assert np.linalg.norm(back - psi) < 1e-8


def test_trajectory_length_validation():
    with pytest.raises(ContractViolation):
        Trajectory(np.zeros(2), np.zeros((3, 2)), np.zeros(2))


def test_phase_decomposition_identity_and_winding():
    d = PhaseDecomposition.from_parts(-12.0, 7.5)
    assert d.identity_defect() < 1e-12
    assert d.winding == 1
    assert abs(d.geometric_principal - (7.5 - 2 * np.pi)) < 1e-12
