"""Ready-made Hamiltonian families and parameter loops."""

import numpy as np

from .core import check_hermitian, spin_operators
from .errors import ContractViolation
from .evolution import HamiltonianFamily, ParameterPath

__all__ = [
    "spin_field_family",
    "quadrupole_family",
    "constant_family",
    "spin_level_index",
    "cone_direction",
    "closed_curve_path",
    "cone_path",
    "loop_path",
]


def spin_field_family(s, coupling=1.0):
    """H(B) = coupling * B . S for a spin s; parameter points are field vectors B."""
    S = np.stack(spin_operators(s))
    kappa = float(coupling)

    def batch(points):
        return kappa * np.tensordot(np.asarray(points, dtype=float), S, axes=(1, 0))

    def single(point):
        return kappa * np.tensordot(np.asarray(point, dtype=float), S, axes=(0, 0))

    return HamiltonianFamily(single, S.shape[1], batch=batch, name=f"spin-{s} field")


def quadrupole_family(s=1.5, coupling=1.0):
    """H(B) = coupling * (B_hat . S)^2, doubly degenerate in +-m for half-integer s.

    Only the direction of the parameter vector matters.
    """
    S = np.stack(spin_operators(s))
    kappa = float(coupling)

    def batch(points):
        b = np.asarray(points, dtype=float)
        b = b / np.linalg.norm(b, axis=1, keepdims=True)
        n = np.tensordot(b, S, axes=(1, 0))
        return kappa * n @ n

    def single(point):
        return batch(np.asarray(point, dtype=float)[None, :])[0]

    return HamiltonianFamily(single, S.shape[1], batch=batch, name=f"spin-{s} quadrupole")


def constant_family(H):
    """Family returning the same Hermitian matrix at every parameter point."""
    H = check_hermitian(H).copy()
    H.setflags(write=False)

    def batch(points):
        return np.broadcast_to(H, (len(points),) + H.shape).copy()

    return HamiltonianFamily(lambda point: H, H.shape[0], batch=batch, name="constant")


def spin_level_index(s, m, coupling=1.0):
    """Position of magnetic level m among the ascending eigenvalues of coupling * B . S."""
    two = 2.0 * m
    if abs(two - round(two)) > 1e-12 or abs(m) > s + 1e-12 or abs((s - m) - round(s - m)) > 1e-12:
        raise ContractViolation(f"m={m} is not a level of spin {s}")
    idx = int(round(m + s))
    return idx if coupling > 0 else int(round(2 * s)) - idx


def cone_direction(theta, phi):
    """Unit vector at colatitude theta and azimuth phi."""
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta) * np.ones_like(phi)],
        axis=-1,
    )


def closed_curve_path(curve, samples, period=1.0, warp=None):
    """Sample a closed curve ``curve(u)``, u in [0, 1], at ``samples`` distinct points.

    ``warp`` is an optional increasing map of [0, 1] onto itself; samples are
    taken at curve(warp(k / samples)), which traces the same geometric loop
    at a different speed.  Times are uniform on [0, period].
    """
    if samples < 3:
        raise ContractViolation("a closed loop needs at least 3 samples")
    u = np.arange(samples + 1) / samples
    if warp is not None:
        u = np.asarray(warp(u), dtype=float)
        u[0], u[-1] = 0.0, 1.0
        if np.any(np.diff(u) <= 0):
            raise ContractViolation("warp must be strictly increasing")
    pts = np.array([curve(x) for x in u], dtype=float)
    pts[-1] = pts[0]
    return ParameterPath(np.linspace(0.0, period, samples + 1), pts, closed=True)


def cone_path(theta, samples, radius=1.0, period=1.0, warp=None):
    """Field vector sweeping a cone of colatitude theta once, counterclockwise about +z."""
    return closed_curve_path(
        lambda u: radius * cone_direction(theta, 2.0 * np.pi * u), samples, period=period, warp=warp
    )


def loop_path(points, period=1.0):
    """Closed path through ``points`` (the first point is appended at the end)."""
    pts = np.asarray(points, dtype=float)
    if not np.allclose(pts[0], pts[-1], rtol=0, atol=1e-12):
        pts = np.vstack([pts, pts[:1]])
    pts[-1] = pts[0]
    return ParameterPath(np.linspace(0.0, period, len(pts)), pts, closed=True)
