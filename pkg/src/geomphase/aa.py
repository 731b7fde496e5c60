"""Geometric phases of cyclic evolutions, adiabatic or not.

A state evolves cyclically on [0, T] exactly when it is an eigenvector of
the propagator U(0, T).  Its geometric phase is

    beta = arg <psi(0)|psi(T)> - sum_k arg <psi(t_k)|psi(t_{k+1})>,

the discrete form of arg <psi(0)|psi(T)> + integral <psi| i d/dt |psi> dt.
The sum is invariant under any rephasing psi(t) -> exp(i chi(t)) psi(t), so beta
depends only on the path of rays.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import schur

from .berry import AngleFit, berry_phase_discrete, build_frames, geometric_angles_from_levels
from .core import check_unitary, canonical_gauge, wrap_phase
from .errors import ContractViolation, GeometricPhaseError, NonCyclicError
from .evolution import PhaseDecomposition, evolve, pancharatnam_increments

__all__ = [
    "CYCLICITY_TOL",
    "CyclicState",
    "ConvergenceRow",
    "GeometricAngles",
    "find_cyclic_states",
    "aa_phase",
    "aa_vs_berry_convergence",
    "geometric_angles",
]

CYCLICITY_TOL = 1e-6
SWEEP_CYCLICITY_TOL = 1e-2


@dataclass(frozen=True)
class CyclicState:
    state: np.ndarray
    total_phase: float
    fidelity: float


def find_cyclic_states(U):
    """Orthonormal eigenbasis of the unitary U with eigenphases.

    Uses the complex Schur form, which for a normal matrix is diagonal
    and yields an orthonormal basis even inside degenerate eigenspaces.
    """
    U = check_unitary(U)
    T, Z = schur(U, output="complex")
    out = []
    for k in range(U.shape[0]):
        v = canonical_gauge(Z[:, k])
        out.append(CyclicState(v, float(np.angle(T[k, k])), float(abs(np.vdot(v, U @ v)))))
    return out


def aa_phase(trajectory, cyclicity_tol=CYCLICITY_TOL):
    """Aharonov-Anandan decomposition of a (nearly) cyclic trajectory.

    The dynamical part is the discrete -integral <psi| i d/dt |psi> dt,
    which for Schrodinger trajectories approximates -integral <H> dt; the
    geometric part is the gauge-invariant beta.  Raises NonCyclicError
    when 1 - |<psi(0)|psi(T)>| exceeds ``cyclicity_tol``.
    """
    states = np.asarray(trajectory.states)
    if len(states) < 2:
        raise ContractViolation("trajectory needs at least two samples")
    closing = np.vdot(states[0], states[-1])
    fidelity = float(abs(closing))
    if 1.0 - fidelity > cyclicity_tol:
        raise NonCyclicError(fidelity, cyclicity_tol)
    inc, mags = pancharatnam_increments(states)
    if mags.min() < 0.1:
        raise ContractViolation("trajectory is too coarsely sampled for phase tracking")
    dynamical = float(np.sum(inc))
    beta = wrap_phase(np.angle(closing) - dynamical)
    return PhaseDecomposition.from_parts(dynamical, beta, fidelity=fidelity)


@dataclass(frozen=True)
class ConvergenceRow:
    sweep_time: float
    steps: int
    beta: Optional[float]
    berry_reference: float
    deviation: Optional[float]
    fidelity: Optional[float]
    flagged: bool
    note: str = ""


def aa_vs_berry_convergence(
    family, path, level, sweep_times, steps_per_time=20.0, cyclicity_tol=SWEEP_CYCLICITY_TOL
):
    """|beta(T) - b| for adiabatic sweeps of increasing duration T.

    ``b`` is the discrete Berry phase of ``level`` on ``path``.  Rows whose
    evolution is not cyclic within ``cyclicity_tol`` are flagged rather
    than raised.
    """
    if not path.closed:
        raise ContractViolation("convergence study requires a closed path")
    frames = build_frames(family, path, levels=[level])
    b = berry_phase_discrete(frames, level).phase
    initial = frames.rays[0, 0]
    rows = []
    for T in sweep_times:
        steps = max(1, int(np.ceil(steps_per_time * T)))
        traj = evolve(family, path.rescaled(T), initial, steps)
        try:
            beta = aa_phase(traj, cyclicity_tol).geometric
        except GeometricPhaseError as exc:
            fid = float(abs(np.vdot(traj.initial, traj.final)))
            rows.append(ConvergenceRow(float(T), steps, None, b, None, fid, True, type(exc).__name__))
            continue
        dev = abs(wrap_phase(beta - b))
        fid = float(abs(np.vdot(traj.initial, traj.final)))
        rows.append(ConvergenceRow(float(T), steps, beta, b, dev, fid, False))
    return rows


@dataclass(frozen=True)
class GeometricAngles:
    """Per-eigenstate AA phases of a cyclic basis, with the optional single-angle fit."""

    phases: tuple
    decompositions: tuple
    quantum_numbers: Optional[tuple]
    fit: Optional[AngleFit]


def geometric_angles(U, trajectories, generator=None, cyclicity_tol=CYCLICITY_TOL):
    """Geometric phases of a complete set of cyclic states of U.

    With a ``generator`` J (for spin systems, the spin component along the
    effective rotation axis) each state is labelled by n = <psi|J|psi>,
    rounded to the nearest half-integer, and the phases are fitted to
    beta_n = -n * alpha.
    """
    U = check_unitary(U)
    d = U.shape[0]
    if len(trajectories) != d:
        raise ContractViolation(f"need a complete basis of {d} cyclic trajectories, got {len(trajectories)}")
    V = np.array([np.asarray(t.initial) for t in trajectories])
    if np.max(np.abs(V.conj() @ V.T - np.eye(d))) > 1e-8:
        raise ContractViolation("initial states are not orthonormal")
    for v in V:
        Uv = U @ v
        if abs(abs(np.vdot(v, Uv)) - 1.0) > 1e-8:
            raise ContractViolation("an initial state is not an eigenvector of U")
    decs = tuple(aa_phase(t, cyclicity_tol) for t in trajectories)
    phases = tuple(dec.geometric for dec in decs)
    if generator is None:
        return GeometricAngles(phases, decs, None, None)
    J = np.asarray(generator, dtype=complex)
    ns = tuple(float(np.round(2.0 * np.vdot(v, J @ v).real) / 2.0) for v in V)
    fit = geometric_angles_from_levels(phases, ns)
    return GeometricAngles(phases, decs, ns, fit)
