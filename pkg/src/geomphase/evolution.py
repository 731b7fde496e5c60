"""Unitary integration of i d/dt |psi> = H(R(t)) |psi> (hbar = 1).

The integrator is the exponential midpoint rule: every step applies the
exact unitary exp(-i H(R(t_mid)) dt), built from the eigendecomposition
of the midpoint Hamiltonian.  Parameter paths are piecewise linear
between their samples.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import check_hermitian, wrap_phase
from .errors import ContractViolation

__all__ = [
    "HamiltonianFamily",
    "ParameterPath",
    "Trajectory",
    "PhaseDecomposition",
    "evolve",
    "propagator",
    "step_unitaries",
    "dynamical_phase",
    "pancharatnam_increments",
]

_HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class HamiltonianFamily:
    """A deterministic map from parameter points R to Hermitian matrices H(R).

    ``batch`` is an optional vectorized evaluator taking an (N, p) array of
    points and returning (N, dim, dim); it only exists for speed and must
    agree with ``evaluator``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    dim: int
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, point):
        H = np.asarray(self.evaluator(np.asarray(point, dtype=float)), dtype=complex)
        if H.shape != (self.dim, self.dim):
            raise ContractViolation(f"family returned shape {H.shape}, expected {(self.dim, self.dim)}")
        return check_hermitian(H, atol=_HERMITIAN_TOL)

    def many(self, points):
        """Evaluate H at every row of ``points``; returns (N, dim, dim)."""
        points = np.asarray(points, dtype=float)
        if self.batch is None:
            return np.array([self(p) for p in points], dtype=complex).reshape(-1, self.dim, self.dim)
        Hs = np.asarray(self.batch(points), dtype=complex)
        if Hs.shape != (len(points), self.dim, self.dim):
            raise ContractViolation(f"batch evaluator returned shape {Hs.shape}")
        scale = max(1.0, float(np.max(np.abs(Hs)))) if Hs.size else 1.0
        if Hs.size and np.max(np.abs(Hs - np.conj(np.swapaxes(Hs, -1, -2)))) > _HERMITIAN_TOL * scale:
            raise ContractViolation("family returned a non-Hermitian operator")
        return Hs


@dataclass(frozen=True)
class ParameterPath:
    """Sampled path R(t), linearly interpolated between samples."""

    times: np.ndarray
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if len(t) != len(p) or len(t) < 2:
            raise ContractViolation("a path needs at least two samples with matching times")
        if np.any(np.diff(t) <= 0):
            raise ContractViolation("path sample times must be strictly ascending")
        if self.closed and np.max(np.abs(p[0] - p[-1])) > 1e-12:
            raise ContractViolation("closed path must end where it starts")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])

    def __len__(self):
        return len(self.times)

    def at(self, t):
        """Parameter point(s) at time(s) t."""
        t = np.asarray(t, dtype=float)
        cols = [np.interp(t, self.times, self.points[:, j]) for j in range(self.points.shape[1])]
        return np.stack(cols, axis=-1)

    def rescaled(self, duration, start=0.0):
        """Same samples, with times mapped linearly onto [start, start + duration]."""
        u = (self.times - self.times[0]) / self.duration
        return ParameterPath(start + duration * u, self.points, self.closed)

    def reversed(self):
        """The same geometric path traversed backwards over the same time span."""
        t = self.times[0] + self.times[-1] - self.times[::-1]
        return ParameterPath(t, self.points[::-1].copy(), self.closed)

    def split(self, t):
        """Two paths covering [t0, t] and [t, t_end]; t must lie strictly inside."""
        if not self.times[0] < t < self.times[-1]:
            raise ContractViolation("split time must lie strictly inside the path")
        left_t = np.concatenate([self.times[self.times < t], [t]])
        right_t = np.concatenate([[t], self.times[self.times > t]])
        mid = self.at(t)[None, :]
        left = ParameterPath(left_t, np.vstack([self.points[self.times < t], mid]))
        right = ParameterPath(right_t, np.vstack([mid, self.points[self.times > t]]))
        return left, right


@dataclass(frozen=True)
class Trajectory:
    """States psi(t_k) and energies <psi|H|psi> on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.energies)):
            raise ContractViolation("times, states and energies must have equal length")

    @property
    def initial(self):
        return self.states[0]

    @property
    def final(self):
        return self.states[-1]

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class PhaseDecomposition:
    """Total phase split into dynamical and geometric parts.

    ``total``, ``dynamical`` and ``geometric`` are accumulated (unwrapped)
    angles; ``winding`` counts the whole 2*pi turns in ``geometric``.
    ``fidelity`` records how closely the evolution returned to its start,
    when that is meaningful.
    """

    total: float
    dynamical: float
    geometric: float
    winding: int = field(init=False)
    fidelity: Optional[float] = None

    def __post_init__(self):
        turns = (self.geometric - wrap_phase(self.geometric)) / (2.0 * np.pi)
        object.__setattr__(self, "winding", int(round(turns)))

    @classmethod
    def from_parts(cls, dynamical, geometric, fidelity=None):
        return cls(dynamical + geometric, dynamical, geometric, fidelity=fidelity)

    @property
    def geometric_principal(self):
        return wrap_phase(self.geometric)

    @property
    def total_principal(self):
        return wrap_phase(self.total)

    def identity_defect(self):
        """Distance of total - dynamical - geometric from the nearest multiple of 2*pi."""
        return abs(wrap_phase(self.total - self.dynamical - self.geometric))


def _grid(path, steps):
    if int(steps) != steps or steps < 1:
        raise ContractViolation(f"steps must be a positive integer, got {steps!r}")
    return np.linspace(path.times[0], path.times[-1], int(steps) + 1)


def step_unitaries(family, path, steps):
    """Midpoint step propagators exp(-i H(R(t_mid)) dt), shape (steps, d, d)."""
    t = _grid(path, steps)
    dt = (t[-1] - t[0]) / steps
    Hs = family.many(path.at(0.5 * (t[:-1] + t[1:])))
    w, v = np.linalg.eigh(Hs)
    return np.einsum("kij,kj,klj->kil", v, np.exp(-1j * w * dt), v.conj())


def evolve(family, path, initial, steps):
    """Integrate the Schrodinger equation along ``path`` from ``initial``."""
    psi = np.asarray(initial, dtype=complex).reshape(-1)
    if psi.shape != (family.dim,):
        raise ContractViolation(f"initial state has dim {psi.size}, family has dim {family.dim}")
    t = _grid(path, steps)
    Us = step_unitaries(family, path, steps)
    states = np.empty((len(t), family.dim), dtype=complex)
    states[0] = psi
    for k in range(len(Us)):
        psi = Us[k] @ psi
        states[k + 1] = psi
    Hs = family.many(path.at(t))
    energies = np.einsum("ki,kij,kj->k", states.conj(), Hs, states).real
    return Trajectory(times=t, states=states, energies=energies)


def propagator(family, path, steps):
    """Ordered product U(t_N, t_0) of the midpoint step unitaries."""
    Us = step_unitaries(family, path, steps)
    U = np.eye(family.dim, dtype=complex)
    for Uk in Us:
        U = Uk @ U
    return U


def dynamical_phase(trajectory):
    """-integral of <psi|H|psi> dt by the trapezoidal rule, not reduced mod 2*pi."""
    if len(trajectory) < 2:
        raise ContractViolation("dynamical phase needs a trajectory with at least two samples")
    e = trajectory.energies
    dt = np.diff(trajectory.times)
    return float(-np.sum(0.5 * (e[1:] + e[:-1]) * dt))


def pancharatnam_increments(states):
    """arg <psi_k|psi_{k+1}> for consecutive rows of ``states``."""
    states = np.asarray(states)
    ov = np.einsum("ki,ki->k", states[:-1].conj(), states[1:])
    return np.angle(ov), np.abs(ov)
