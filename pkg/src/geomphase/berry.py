"""Berry phases of non-degenerate levels transported around closed loops.

Three independent routes are provided:

* ``berry_phase_discrete``: the gauge-invariant product of overlaps of
  consecutive eigenvectors (a discrete Pancharatnam connection),
* ``berry_phase_connection``: quadrature of the connection one-form
  <n| i d |n> with centered differences of gauge-fixed frames,
* ``berry_phase_adiabatic_numeric``: slow Schrodinger evolution with the
  dynamical phase -integral E_n dt stripped off.

Levels are addressed by their position in the ascending spectrum at the
first path sample; ``systems.spin_level_index`` converts magnetic quantum
numbers of spin families.
"""

from dataclasses import dataclass, replace

import numpy as np

from .core import DEGENERACY_ATOL, DEGENERACY_RTOL, canonical_gauge, degeneracy_blocks, wrap_phase
from .errors import (
    ContractViolation,
    DegeneracyError,
    NonAdiabaticLeakageError,
    StructureViolationError,
    UndersampledLoopError,
)
from .evolution import PhaseDecomposition, ParameterPath, evolve

__all__ = [
    "GAUGES",
    "FrameField",
    "BerryPhaseResult",
    "AngleFit",
    "build_frames",
    "berry_phase_discrete",
    "berry_phase_connection",
    "berry_phase_adiabatic_numeric",
    "geometric_angles_from_levels",
]

GAUGES = ("parallel-transport", "canonical")
MATCH_MIN_OVERLAP = 0.1
STEP_MIN_OVERLAP = 0.1
DEFAULT_LEAKAGE_TOL = 0.05
STRUCTURE_TOL = 0.1


@dataclass(frozen=True)
class FrameField:
    """Level-tracked eigenvectors along a path.

    Each eigenvector is stored as a ray representative in the canonical
    gauge, ``rays[k, j]``, plus a gauge angle ``gauge_phases[k, j]``; the
    gauge-fixed vector is ``rays * exp(i * gauge_phases)``.  Column j
    tracks level ``levels[j]`` and ``energies[k, j]`` is its eigenvalue.
    """

    path: ParameterPath
    levels: tuple
    energies: np.ndarray
    rays: np.ndarray
    gauge_phases: np.ndarray
    gauge: str
    min_overlap: float

    @classmethod
    def from_vectors(cls, path, levels, energies, vectors, gauge="arbitrary"):
        """Build a frame field from explicit eigenvectors of shape (N, L, d)."""
        vectors = np.asarray(vectors, dtype=complex)
        rays = canonical_gauge(vectors)
        phases = np.angle(np.einsum("kli,kli->kl", rays.conj(), vectors))
        ov = np.abs(np.einsum("kli,kli->kl", rays[:-1].conj(), rays[1:]))
        min_ov = float(ov.min()) if ov.size else 1.0
        return cls(path, tuple(levels), np.asarray(energies, dtype=float), rays, phases, gauge, min_ov)

    @property
    def vectors(self):
        return self.rays * np.exp(1j * self.gauge_phases)[..., None]

    def column(self, level):
        try:
            return self.levels.index(level)
        except ValueError:
            raise ContractViolation(f"level {level} was not tracked; tracked levels are {self.levels}") from None

    def level_vectors(self, level):
        return self.vectors[:, self.column(level)]

    def rephased(self, phases):
        """Copy with vector k of every level multiplied by exp(i phases[k])."""
        phases = np.asarray(phases, dtype=float)
        if phases.ndim == 1:
            phases = phases[:, None]
        return replace(self, gauge_phases=self.gauge_phases + phases, gauge="arbitrary")


@dataclass(frozen=True)
class BerryPhaseResult:
    level: int
    loop: ParameterPath
    phase: float
    method: str

    @property
    def principal(self):
        return wrap_phase(self.phase)


@dataclass(frozen=True)
class AngleFit:
    """Single geometric angle alpha fitted to per-level phases phase_n = -n * alpha."""

    alpha: float
    levels: tuple
    phases: tuple
    residuals: tuple
    period: float

    @property
    def max_residual(self):
        return max(abs(r) for r in self.residuals) if self.residuals else 0.0


def _match(prev, vecs):
    """Greedy maximal-overlap assignment of tracked vectors to new eigenvectors."""
    M = np.abs(prev.conj() @ vecs.T)  # (tracked, d)
    order = np.dstack(np.unravel_index(np.argsort(-M, axis=None), M.shape))[0]
    assign = -np.ones(M.shape[0], dtype=int)
    used = set()
    for i, j in order:
        if assign[i] < 0 and j not in used:
            assign[i] = j
            used.add(j)
            if len(used) == M.shape[0]:
                break
    best = M[np.arange(M.shape[0]), assign]
    return assign, best


def build_frames(family, path, gauge="parallel-transport", levels=None):
    """Eigenframes of ``family`` at every sample of ``path``.

    Levels are matched sample to sample by maximal overlap.  With the
    parallel-transport gauge every vector is rephased so that its overlap
    with its predecessor is real and positive; the canonical gauge keeps
    the largest component of each vector real and positive instead.
    """
    if gauge not in GAUGES:
        raise ContractViolation(f"unknown gauge {gauge!r}; choose from {GAUGES}")
    Hs = family.many(path.points)
    w, v = np.linalg.eigh(Hs)
    vecs = canonical_gauge(np.swapaxes(v, -1, -2))  # (N, d, d): row j = eigenvector j
    if levels is None:
        levels = tuple(range(family.dim))
    levels = tuple(int(x) for x in levels)
    if any(not 0 <= lv < family.dim for lv in levels):
        raise ContractViolation(f"levels {levels} out of range for dim {family.dim}")

    N, L = len(path), len(levels)
    rays = np.empty((N, L, family.dim), dtype=complex)
    energies = np.empty((N, L))
    idx = np.array(levels)
    min_ov = 1.0
    for k in range(N):
        if k > 0:
            idx, best = _match(rays[k - 1], vecs[k])
            min_ov = min(min_ov, float(best.min()))
            if best.min() < MATCH_MIN_OVERLAP:
                raise UndersampledLoopError(
                    f"level matching failed at sample {k}: best overlap {best.min():.3f}"
                )
        blocks = degeneracy_blocks(w[k])
        for j, i in enumerate(idx):
            if any(len(b) > 1 and i in b for b in blocks):
                raise DegeneracyError(k, levels[j])
        rays[k] = vecs[k][idx]
        energies[k] = w[k][idx]
    phases = np.zeros((N, L))
    if gauge == "parallel-transport":
        steps = np.angle(np.einsum("kli,kli->kl", rays[:-1].conj(), rays[1:]))
        phases[1:] = -np.cumsum(steps, axis=0)
    return FrameField(path, levels, energies, rays, phases, gauge, min_ov)


def _require_closed(frames):
    if not frames.path.closed:
        raise ContractViolation("Berry phase requires a closed path")


def berry_phase_discrete(frames, level):
    """-arg prod_k <n_k|n_{k+1}>, closing the product on the sample-0 vector.

    Only the canonical ray representatives enter, so the result does not
    depend on the gauge of ``frames`` at all; the sum of per-step phases
    keeps the winding of the canonical gauge.
    """
    _require_closed(frames)
    u = frames.rays[:-1, frames.column(level)]
    ov = np.einsum("ki,ki->k", u.conj(), np.roll(u, -1, axis=0))
    mags = np.abs(ov)
    if mags.min() < STEP_MIN_OVERLAP:
        k = int(np.argmin(mags))
        raise UndersampledLoopError(f"overlap {mags[k]:.3f} between samples {k} and {k + 1} is too small")
    return BerryPhaseResult(level, frames.path, float(-np.sum(np.angle(ov))), "discrete-product")


def berry_phase_connection(frames, level):
    """Loop integral of <n| i d/dlambda |n> using centered finite differences.

    Works in the gauge stored in ``frames``.  A closure mismatch
    u_N = exp(i delta) u_0, present in the parallel-transport gauge, is
    spread evenly over the loop to obtain a single-valued gauge first.
    """
    _require_closed(frames)
    u = frames.level_vectors(level)
    n = len(u) - 1
    mags = np.abs(np.einsum("ki,ki->k", u[:-1].conj(), u[1:]))
    if mags.min() < STEP_MIN_OVERLAP:
        raise UndersampledLoopError(f"consecutive overlap {mags.min():.3f} is too small")
    delta = np.angle(np.vdot(u[0], u[-1]))
    w = u[:-1] * np.exp(-1j * delta * np.arange(n) / n)[:, None]
    dw = 0.5 * (np.roll(w, -1, axis=0) - np.roll(w, 1, axis=0))
    a = np.einsum("ki,ki->k", w.conj(), dw).imag
    return BerryPhaseResult(level, frames.path, float(-np.sum(a)), "connection-quadrature")


def berry_phase_adiabatic_numeric(family, path, level, sweep_time, steps, leakage_tol=DEFAULT_LEAKAGE_TOL):
    """Evolve the level-``level`` eigenstate slowly around a closed loop.

    The loop is traversed at uniform parameter speed in ``sweep_time``.
    The total phase is arg <n(t)|psi(t)> followed continuously along the
    trajectory, the dynamical phase is Berry's -integral E_n dt, and the
    geometric part is their difference.  The returned decomposition
    carries the final fidelity |<n; R(T)|psi(T)>|^2.
    """
    if not path.closed:
        raise ContractViolation("adiabatic Berry phase requires a closed path")
    if sweep_time <= 0:
        raise ContractViolation("sweep_time must be positive")
    p = path.rescaled(sweep_time)
    t = np.linspace(p.times[0], p.times[-1], int(steps) + 1)
    w, v = np.linalg.eigh(family.many(p.at(t)))
    if not 0 <= level < family.dim:
        raise ContractViolation(f"level {level} out of range for dim {family.dim}")
    tol = np.maximum(DEGENERACY_ATOL, DEGENERACY_RTOL * (w[:, -1] - w[:, 0]))
    gaps = np.full(len(t), np.inf)
    if level > 0:
        gaps = np.minimum(gaps, w[:, level] - w[:, level - 1])
    if level < family.dim - 1:
        gaps = np.minimum(gaps, w[:, level + 1] - w[:, level])
    if np.any(gaps <= tol):
        raise DegeneracyError(int(np.argmax(gaps <= tol)), level)
    c = canonical_gauge(v[:, :, level])
    traj = evolve(family, p, c[0], steps)
    amp = np.einsum("ki,ki->k", c.conj(), traj.states)
    fidelity = float(abs(amp[-1]) ** 2)
    if 1.0 - fidelity > leakage_tol:
        raise NonAdiabaticLeakageError(fidelity=fidelity)
    total = float(np.unwrap(np.angle(amp))[-1])
    e = w[:, level]
    dynamical = float(-np.sum(0.5 * (e[1:] + e[:-1]) * np.diff(t)))
    return PhaseDecomposition(total, dynamical, total - dynamical, fidelity=fidelity)


def geometric_angles_from_levels(results, levels, tol=STRUCTURE_TOL):
    """Fit phase_n = -n * alpha (mod 2*pi) to per-level phases.

    ``results`` holds BerryPhaseResult objects or plain angles; ``levels``
    the matching magnetic quantum numbers n.  alpha is reported in
    [0, 2*pi) for integer n and [0, 4*pi) when some n is half-integer, the
    ranges on which it is determined.  Raises StructureViolationError when
    a residual exceeds ``tol``.
    """
    phases = np.array([getattr(r, "phase", r) for r in results], dtype=float)
    n = np.array(levels, dtype=float)
    if len(phases) != len(n):
        raise ContractViolation("need one phase per level")
    if len(set(n.tolist())) < 2:
        raise ContractViolation("need at least two distinct levels")
    if not np.any(n != 0):
        raise ContractViolation("levels carry no information about alpha")
    half = np.any(np.abs(n - np.round(n)) > 1e-9)
    period = 4.0 * np.pi if half else 2.0 * np.pi

    def resid(a):
        return wrap_phase(phases + n * a)

    grid = np.linspace(0.0, period, 8192, endpoint=False)
    cost = np.abs(1.0 - np.exp(1j * (phases[None, :] + n[None, :] * grid[:, None]))) ** 2
    alpha = float(grid[np.argmin(cost.sum(axis=1))])
    for _ in range(4):
        alpha -= float(np.dot(n, resid(alpha)) / np.dot(n, n))
    alpha = float(np.mod(alpha, period))
    if period - alpha < 1e-9:
        alpha -= period
    r = resid(alpha)
    if np.max(np.abs(r)) > tol:
        raise StructureViolationError(
            f"phases are not of the form -n*alpha: max residual {np.max(np.abs(r)):.3e}"
        )
    return AngleFit(alpha, tuple(n.tolist()), tuple(phases.tolist()), tuple(np.atleast_1d(r).tolist()), period)
