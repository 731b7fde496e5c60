"""Non-Abelian (Wilczek-Zee) holonomy of degenerate eigenspaces.

The path-ordered exponential of the matrix connection
A_{l'l} = <l'| i grad |l> is discretized as a product of unitary polar
factors of consecutive overlap matrices, i.e. discrete non-Abelian parallel
transport.  The construction is manifestly unitary, covariant under basis
changes, and for d = 1 reduces to the Abelian discrete Berry phase.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import degeneracy_blocks
from .errors import (
    ContractViolation,
    DegeneracySplittingError,
    NonAdiabaticLeakageError,
    UndersampledLoopError,
)
from .evolution import ParameterPath, propagator

__all__ = [
    "DegenerateFrameField",
    "HolonomyMatrix",
    "polar_factor",
    "build_degenerate_frames",
    "wz_holonomy_discrete",
    "wz_holonomy_adiabatic_oracle",
    "operator_distance",
]

SUBSPACE_MIN_OVERLAP = 0.5
SINGULAR_OVERLAP = 1e-3
LEAKAGE_TOL = 0.05


def polar_factor(M):
    """Nearest unitary to M (the U V^dagger factor of its SVD) and the singular values."""
    u, s, vh = np.linalg.svd(M)
    return u @ vh, s


def operator_distance(A, B):
    """Spectral norm of A - B."""
    return float(np.linalg.norm(np.asarray(A) - np.asarray(B), 2))


@dataclass(frozen=True)
class DegenerateFrameField:
    """Orthonormal bases of one degenerate eigenspace along a path.

    ``bases[k]`` is a (dim, d) matrix whose columns span the block at
    sample k; ``energies[k]`` is the mean block eigenvalue there.
    """

    path: ParameterPath
    bases: np.ndarray
    energies: np.ndarray
    block_dim: int
    block_index: int

    def with_initial_rotation(self, omega):
        """Copy whose sample-0 basis is rotated by the d x d unitary ``omega``."""
        b = self.bases.copy()
        b[0] = b[0] @ np.asarray(omega, dtype=complex)
        return replace(self, bases=b)


@dataclass(frozen=True)
class HolonomyMatrix:
    entries: np.ndarray
    loop: ParameterPath
    level_block: int
    leakage: float = 0.0
    raw: Optional[np.ndarray] = None

    @property
    def eigenphases(self):
        return np.sort(np.angle(np.linalg.eigvals(self.entries)))

    def unitarity_defect(self):
        d = self.entries.shape[0]
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - np.eye(d))))


def _select_block(w, v, selector):
    blocks = degeneracy_blocks(w)
    if isinstance(selector, (int, np.integer)):
        if not 0 <= selector < len(blocks):
            raise ContractViolation(f"block index {selector} out of range ({len(blocks)} blocks)")
        return int(selector), blocks[int(selector)]
    means = [float(np.mean(w[list(b)])) for b in blocks]
    i = int(np.argmin([abs(m - float(selector)) for m in means]))
    return i, blocks[i]


def build_degenerate_frames(family, path, block=0):
    """Parallel-transported bases of a degenerate block along ``path``.

    ``block`` is either the index of a degeneracy block in the ascending
    spectrum at the first sample, or a target eigenvalue (the nearest
    block is chosen).  At each later sample the block with the largest
    subspace overlap with its predecessor is followed, and its basis is
    rotated by the polar factor of the overlap matrix so that consecutive
    bases are aligned.
    """
    Hs = family.many(path.points)
    w, v = np.linalg.eigh(Hs)
    index, b0 = _select_block(w[0], v[0], block)
    d = len(b0)
    bases = np.empty((len(path), family.dim, d), dtype=complex)
    energies = np.empty(len(path))
    bases[0] = v[0][:, list(b0)]
    energies[0] = float(np.mean(w[0][list(b0)]))
    for k in range(1, len(path)):
        best, best_weight = None, -1.0
        for blk in degeneracy_blocks(w[k]):
            weight = float(np.sum(np.abs(bases[k - 1].conj().T @ v[k][:, list(blk)]) ** 2))
            if weight > best_weight:
                best, best_weight = blk, weight
        if len(best) != d:
            raise DegeneracySplittingError(k, d, len(best))
        V = v[k][:, list(best)]
        W, s = polar_factor(bases[k - 1].conj().T @ V)
        if s.min() < SUBSPACE_MIN_OVERLAP:
            raise UndersampledLoopError(f"subspace overlap {s.min():.3f} at sample {k} is too small")
        bases[k] = V @ W.conj().T
        energies[k] = float(np.mean(w[k][list(best)]))
    return DegenerateFrameField(path, bases, energies, d, index)


def wz_holonomy_discrete(frames):
    """Ordered product of polar factors around the loop, closed on the sample-0 basis.

    Returns D with transported basis(T) = basis(0) @ D, so that an
    adiabatically evolved block state psi_l ends as sum_l' D_{l'l} |l'>.
    """
    if not frames.path.closed:
        raise ContractViolation("holonomy requires a closed path")
    B = frames.bases[:-1]
    T = B[0]
    for k in range(1, len(B) + 1):
        nxt = B[k] if k < len(B) else B[0]
        W, s = polar_factor(T.conj().T @ nxt)
        if s.min() < SINGULAR_OVERLAP:
            raise UndersampledLoopError(f"singular overlap matrix at sample {k}")
        T = nxt @ W.conj().T
    D = B[0].conj().T @ T
    return HolonomyMatrix(D, frames.path, frames.block_index)


def wz_holonomy_adiabatic_oracle(
    family, path, block, sweep_time, steps, leakage_tol=LEAKAGE_TOL, initial_basis=None
):
    """Holonomy read off from direct slow evolution of each block basis vector.

    Each basis vector at R(0) is evolved for ``sweep_time``, the common
    dynamical factor exp(-i integral E dt) (block eigenvalue at the step
    midpoints) is stripped, and the results are projected back onto the
    initial basis.  The reported matrix is the polar factor of that
    projection; ``raw`` keeps the projection itself and ``leakage`` the
    largest norm lost from the block.  ``initial_basis`` overrides the
    eigensolver's basis of the block at R(0).
    """
    if not path.closed:
        raise ContractViolation("holonomy requires a closed path")
    p = path.rescaled(sweep_time)
    frames0 = build_degenerate_frames(family, ParameterPath(p.times[:2], p.points[:2]), block)
    V0 = frames0.bases[0]
    if initial_basis is not None:
        V0 = np.asarray(initial_basis, dtype=complex)
        if V0.shape != frames0.bases[0].shape:
            raise ContractViolation(f"initial basis must have shape {frames0.bases[0].shape}")
        if np.linalg.norm(frames0.bases[0] @ (frames0.bases[0].conj().T @ V0) - V0) > 1e-8:
            raise ContractViolation("initial basis does not span the block")
    t = np.linspace(p.times[0], p.times[-1], int(steps) + 1)
    mids = p.at(0.5 * (t[:-1] + t[1:]))
    wm = np.linalg.eigvalsh(family.many(mids))
    # block energy followed by continuity from the initial block energy
    e_prev = frames0.energies[0]
    phase = 0.0
    dt = (t[-1] - t[0]) / steps
    for k in range(len(mids)):
        e = wm[k][np.argmin(np.abs(wm[k] - e_prev))]
        phase += e * dt
        e_prev = e
    U = propagator(family, p, steps)
    raw = (V0.conj().T @ U @ V0) * np.exp(1j * phase)
    defect = float(np.max(1.0 - np.sum(np.abs(raw) ** 2, axis=0)))
    if defect > leakage_tol:
        raise NonAdiabaticLeakageError(defect=defect)
    D, _ = polar_factor(raw)
    return HolonomyMatrix(D, path, frames0.block_index, leakage=defect, raw=raw)
