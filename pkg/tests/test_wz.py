import numpy as np
import pytest
from scipy.linalg import expm

from geomphase.berry import berry_phase_adiabatic_numeric, berry_phase_discrete, build_frames
from geomphase.errors import ContractViolation, DegeneracySplittingError, NonAdiabaticLeakageError
from geomphase.evolution import HamiltonianFamily, ParameterPath
from geomphase.systems import cone_path, constant_family, loop_path, quadrupole_family, spin_field_family
from geomphase.wz import (
    build_degenerate_frames,
    operator_distance,
    polar_factor,
    wz_holonomy_adiabatic_oracle,
    wz_holonomy_discrete,
)

from conftest import random_unitary

THETA = np.pi / 3


@pytest.fixture(scope="module")
def quad_frames():
    return build_degenerate_frames(quadrupole_family(1.5), cone_path(THETA, 720), 0)


def test_polar_factor_is_nearest_unitary(rng):
    M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    W, s = polar_factor(M)
    assert np.allclose(W.conj().T @ W, np.eye(3))
    P = W.conj().T @ M
    assert np.allclose(P, P.conj().T) and np.all(np.linalg.eigvalsh((P + P.conj().T) / 2) > 0)


def test_constant_family_identity_holonomy():
    fam = constant_family(np.diag([0.0, 0.0, 1.0]))
    path = loop_path(np.eye(3))
    frames = build_degenerate_frames(fam, path, 0)
    assert frames.block_dim == 2
    assert np.allclose(wz_holonomy_discrete(frames).entries, np.eye(2))
    osc = wz_holonomy_adiabatic_oracle(fam, path, 0, 10.0, 50)
    assert np.max(np.abs(osc.entries - np.eye(2))) < 1e-9


def test_quadrupole_equator_has_two_double_blocks():
    fam = quadrupole_family(1.5)
    path = cone_path(np.pi / 2, 90)
    for block in (0, 1):
        frames = build_degenerate_frames(fam, path, block)
        assert frames.block_dim == 2
    w = np.linalg.eigvalsh(fam.many(path.points))
    assert np.allclose(w, [0.25, 0.25, 2.25, 2.25])


def test_block_selection_by_energy():
    fam = quadrupole_family(1.5)
    frames = build_degenerate_frames(fam, cone_path(THETA, 60), 2.2)
    assert frames.block_index == 1


def test_splitting_block_detected():
    sz = np.diag([1.0, 0.0, 0.0])
    sx = np.zeros((3, 3))
    sx[1, 2] = sx[2, 1] = 1.0

    def H(p):
        return sz + p[0] * sx

    fam = HamiltonianFamily(H, 3)
    t = np.linspace(0, 1, 11)
    path = ParameterPath(t, np.concatenate([np.zeros(5), np.full(6, 0.3)])[:, None])
    with pytest.raises(DegeneracySplittingError) as info:
        build_degenerate_frames(fam, path, 0)
    assert info.value.sample_index == 5


def test_holonomy_unitary(quad_frames):
    D = wz_holonomy_discrete(quad_frames)
    assert D.unitarity_defect() < 1e-8
    upper = build_degenerate_frames(quadrupole_family(1.5), cone_path(THETA, 720), 1)
    assert wz_holonomy_discrete(upper).unitarity_defect() < 1e-8


def test_quadrupole_eigenphases_match_rotating_frame_oracle(quad_frames):
    # in the frame co-rotating with the field, the low block of (n.S)^2 picks up exp(-i 2 pi M),
    # M the restriction of S_z to the block; the holonomy is -exp(i 2 pi M) up to the trivial sign
    c, s = np.cos(THETA), np.sin(THETA)
    M = np.array([[c / 2, -s], [-s, -c / 2]])
    oracle = np.sort(np.angle(np.linalg.eigvals(-expm(2j * np.pi * M))))
    D = wz_holonomy_discrete(quad_frames)
    assert np.allclose(D.eigenphases, oracle, atol=1e-4)


def test_upper_block_is_diagonal_in_m():
    fam = quadrupole_family(1.5)
    frames = build_degenerate_frames(fam, cone_path(THETA, 720), 1)
    phases = wz_holonomy_discrete(frames).eigenphases
    omega = 2 * np.pi * (1 - np.cos(THETA))
    expected = np.sort(np.angle(np.exp(1j * np.array([-1.5, 1.5]) * omega)))
    assert np.allclose(phases, expected, atol=1e-4)


def test_abelian_reduction(rng):
    fam = spin_field_family(1)
    path = cone_path(THETA, 720)
    berry = build_frames(fam, path)
    for lv in range(3):
        D = wz_holonomy_discrete(build_degenerate_frames(fam, path, lv))
        assert D.entries.shape == (1, 1)
        b = berry_phase_discrete(berry, lv).phase
        assert abs(D.entries[0, 0] - np.exp(1j * b)) < 1e-9


def test_gauge_covariance(rng, quad_frames):
    D = wz_holonomy_discrete(quad_frames).entries
    for _ in range(10):
        omega = random_unitary(rng, 2)
        rotated = quad_frames.with_initial_rotation(omega)
        Dr = wz_holonomy_discrete(rotated).entries
        assert operator_distance(Dr, omega.conj().T @ D @ omega) < 1e-9


def test_loop_reversal_gives_adjoint():
    fam = quadrupole_family(1.5)
    path = cone_path(THETA, 720)
    fwd = build_degenerate_frames(fam, path, 0)
    rev = build_degenerate_frames(fam, path.reversed(), 0)
    assert np.allclose(fwd.bases[0], rev.bases[0])
    D = wz_holonomy_discrete(fwd).entries
    Dr = wz_holonomy_discrete(rev).entries
    assert operator_distance(Dr, D.conj().T) < 1e-8


def test_reparameterization_invariance(quad_frames):
    fam = quadrupole_family(1.5)
    D = wz_holonomy_discrete(quad_frames).entries
    for a in (0.1, -0.15, 0.2):
        path = cone_path(THETA, 720, warp=lambda u, a=a: u + a * np.sin(2 * np.pi * u) / (2 * np.pi))
        Dw = wz_holonomy_discrete(build_degenerate_frames(fam, path, 0)).entries
        assert operator_distance(D, Dw) < 1e-5


def test_open_path_rejected():
    fam = quadrupole_family(1.5)
    t = np.linspace(0, 1, 5)
    path = ParameterPath(t, np.stack([np.ones(5), t, np.ones(5)], axis=1))
    with pytest.raises(ContractViolation):
        wz_holonomy_discrete(build_degenerate_frames(fam, path, 0))


def test_oracle_converges_to_discrete(quad_frames):
    fam = quadrupole_family(1.5)
    path = cone_path(THETA, 720)
    D = wz_holonomy_discrete(quad_frames).entries
    dists = []
    for T in (50, 150, 500):
        O = wz_holonomy_adiabatic_oracle(fam, path, 0, T, 100 * T)
        assert O.unitarity_defect() < 1e-8
        dists.append(operator_distance(O.entries, D))
    assert dists[0] > dists[1] > dists[2]
    assert dists[2] < 5e-2


def test_oracle_d1_matches_adiabatic_berry():
    fam = spin_field_family(0.5)
    path = cone_path(THETA, 720)
    O = wz_holonomy_adiabatic_oracle(fam, path, 1, 500.0, 50000)
    dec = berry_phase_adiabatic_numeric(fam, path, 1, 500.0, 50000)
    assert abs(O.entries[0, 0] - np.exp(1j * dec.geometric)) < 1e-2


def test_oracle_leakage_detected():
    with pytest.raises(NonAdiabaticLeakageError) as info:
        wz_holonomy_adiabatic_oracle(quadrupole_family(1.5), cone_path(np.pi / 2, 200), 0, 3.0, 400)
    assert info.value.defect > 0.05


def test_oracle_initial_basis_must_span_block():
    fam = quadrupole_family(1.5)
    with pytest.raises(ContractViolation):
        wz_holonomy_adiabatic_oracle(fam, cone_path(THETA, 50), 0, 5.0, 50, initial_basis=np.eye(4)[:, :2])
