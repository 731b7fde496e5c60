"""Complex vector and operator arithmetic for small dense quantum systems.

States are 1-D complex numpy arrays, operators are 2-D complex arrays.
All phases returned here are principal values in (-pi, pi]; code that
needs to keep track of winding does so at the trajectory level.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, UndefinedPhaseError

__all__ = [
    "ORTHOGONALITY_TOL",
    "SpectralFrame",
    "state",
    "wrap_phase",
    "inner_product",
    "pancharatnam_phase",
    "spin_operators",
    "check_hermitian",
    "check_unitary",
    "canonical_gauge",
    "degeneracy_blocks",
    "eig_hermitian",
    "rays_equal",
]

ORTHOGONALITY_TOL = 1e-9
RAY_TOL = 1e-9
DEGENERACY_RTOL = 1e-9
DEGENERACY_ATOL = 1e-9
# components within this relative margin of the largest count as tied
_PIVOT_RTOL = 1e-9


def state(amplitudes, normalize=True):
    """Return ``amplitudes`` as a complex state vector, normalized by default."""
    v = np.array(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ContractViolation("state vector must have dim >= 1")
    if normalize:
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ContractViolation("cannot normalize the zero vector")
        v = v / nrm
    return v


def wrap_phase(x):
    """Map an angle (or array of angles) onto the principal branch (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    out = x - 2.0 * np.pi * np.ceil((x - np.pi) / (2.0 * np.pi))
    if out.ndim == 0:
        return float(out)
    return out


def _check_same_dim(a, b):
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")


def inner_product(a, b):
    """<a|b>, conjugating the first argument."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return complex(np.vdot(a, b))


def pancharatnam_phase(a, b, tol=ORTHOGONALITY_TOL):
    """Phase difference ph<a|b> in (-pi, pi].

    Two states are in phase when their overlap is real and positive, in
    which case this returns exactly 0.  An imaginary part within the
    rounding bound of the dot product counts as zero, so a state rephased
    to be in phase with its predecessor gives exactly 0 as well.  Raises
    UndefinedPhaseError when |<a|b>| <= tol.
    """
    ov = inner_product(a, b)
    mag = abs(ov)
    if mag <= tol:
        raise UndefinedPhaseError(mag)
    a, b = np.asarray(a), np.asarray(b)
    bound = 4.0 * a.size * np.finfo(float).eps * float(np.sum(np.abs(a) * np.abs(b)))
    if ov.real > 0.0 and abs(ov.imag) <= bound:
        return 0.0
    return float(np.angle(ov))


def spin_operators(s):
    """Spin matrices (Sx, Sy, Sz) of dimension 2s+1.

    The basis is ordered by descending magnetic quantum number
    m = s, s-1, ..., -s, so Sz is diagonal with those entries.
    """
    two_s = 2.0 * float(s)
    if two_s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise ContractViolation(f"spin must be a non-negative half-integer, got {s!r}")
    s = round(two_s) / 2.0
    dim = round(two_s) + 1
    m = s - np.arange(dim)
    # raising operator: S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>
    raise_ = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        raise_[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    lower = raise_.conj().T
    sx = (raise_ + lower) / 2.0
    sy = (raise_ - lower) / 2.0j
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def check_hermitian(H, atol=1e-12):
    """Return H as a complex array, raising ContractViolation unless H = H^dagger."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ContractViolation(f"operator must be square, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if H.size and np.max(np.abs(H - H.conj().T)) > atol * scale:
        raise ContractViolation("operator is not Hermitian")
    return H


def check_unitary(U, atol=1e-10):
    """Return U as a complex array, raising ContractViolation unless U^dagger U = 1."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ContractViolation(f"operator must be square, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > atol:
        raise ContractViolation("operator is not unitary")
    return U


def canonical_gauge(v):
    """Rephase ``v`` so its largest-magnitude component is real positive.

    Near-ties are broken towards the lowest index, which keeps the choice
    stable under rounding noise.  Works on the last axis, so a stack of
    vectors of shape (..., d) is canonicalized row by row.
    """
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    top = mags.max(axis=-1, keepdims=True)
    pivot = np.argmax(mags >= top * (1.0 - _PIVOT_RTOL), axis=-1)
    p = np.take_along_axis(v, pivot[..., None], axis=-1)
    out = v * (p.conj() / np.abs(p))
    # the pivot is set exactly, without rounding residue in its imaginary part
    np.put_along_axis(out, pivot[..., None], np.abs(p).astype(complex), axis=-1)
    return out


def degeneracy_blocks(eigenvalues, atol=DEGENERACY_ATOL, rtol=DEGENERACY_RTOL):
    """Partition ascending eigenvalues into clusters of (near) equal values.

    Neighbours closer than max(atol, rtol * spectral range) share a block.
    """
    e = np.asarray(eigenvalues, dtype=float)
    if e.size == 0:
        return ()
    tol = max(atol, rtol * float(e[-1] - e[0]))
    blocks = [[0]]
    for i in range(1, e.size):
        if e[i] - e[i - 1] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return tuple(tuple(b) for b in blocks)


@dataclass(frozen=True)
class SpectralFrame:
    """Eigen-decomposition of H(R) at one parameter point.

    ``vectors[:, k]`` is the eigenvector for ``eigenvalues[k]``.
    """

    parameter: object
    eigenvalues: np.ndarray
    vectors: np.ndarray
    blocks: tuple = field(default=())

    def vector(self, k):
        return self.vectors[:, k]

    def block_of(self, k):
        for b in self.blocks:
            if k in b:
                return b
        raise IndexError(k)


def eig_hermitian(H, param=None):
    """Ascending eigen-decomposition of a Hermitian matrix.

    Each eigenvector is put in the canonical gauge (largest component
    real positive) so that frames are reproducible.
    """
    H = check_hermitian(H)
    w, v = np.linalg.eigh(H)
    v = canonical_gauge(v.T).T
    return SpectralFrame(parameter=param, eigenvalues=w, vectors=v, blocks=degeneracy_blocks(w))


def rays_equal(a, b, tol=RAY_TOL):
    """True when a and b represent the same ray, |<a|b>| >= 1 - tol."""
    return abs(inner_product(a, b)) >= 1.0 - tol
