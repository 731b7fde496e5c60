"""Geodesics and oriented solid angles on the unit 2-sphere.

Orientation follows the right-hand rule with the outward normal: a loop
traversed counterclockwise when viewed from outside the sphere encloses a
positive solid angle.  Solid angles of closed loops are only meaningful
modulo 4*pi; values are reported in (-4*pi, 4*pi).
"""

from typing import NamedTuple

import numpy as np

from .errors import ContractViolation, NoUniqueGeodesicError

__all__ = [
    "ANTIPODAL_TOL",
    "SolidAngle",
    "as_point",
    "geodesic_interpolate",
    "triangle_excess",
    "polygon_solid_angle",
    "sampled_loop_solid_angle",
    "complement",
    "geodesic_polygon",
]

ANTIPODAL_TOL = 1e-12
_DISTINCT_TOL = 1e-12
_FOLD_TOL = 1e-9


class SolidAngle(NamedTuple):
    value: float
    degenerate: bool = False


def as_point(v):
    """Normalize a 3-vector onto the unit sphere."""
    p = np.asarray(v, dtype=float).reshape(-1)
    if p.shape != (3,):
        raise ContractViolation(f"sphere point must be a 3-vector, got shape {p.shape}")
    n = np.linalg.norm(p)
    if n == 0.0:
        raise ContractViolation("zero vector is not a sphere point")
    return p / n


def _antipodal(a, b):
    return abs(float(np.dot(a, b)) + 1.0) < ANTIPODAL_TOL


def geodesic_interpolate(a, b, fraction):
    """Point at ``fraction`` of the way along the minor arc from a to b."""
    a = as_point(a)
    b = as_point(b)
    if not 0.0 <= fraction <= 1.0:
        raise ContractViolation(f"fraction must lie in [0, 1], got {fraction}")
    if np.array_equal(a, b):
        return a.copy()
    if _antipodal(a, b):
        raise NoUniqueGeodesicError("antipodal points have no unique geodesic")
    omega = np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b))
    if omega < 1e-15:
        return a.copy()
    p = (np.sin((1.0 - fraction) * omega) * a + np.sin(fraction * omega) * b) / np.sin(omega)
    return p / np.linalg.norm(p)


def triangle_excess(a, b, c):
    """Oriented solid angle of the geodesic triangle a -> b -> c.

    Two-argument arctangent form (Van Oosterom-Strackee), stable for thin
    triangles.  Broadcasts over leading axes.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) + np.einsum(
        "...i,...i->...", c, a
    )
    return 2.0 * np.arctan2(num, den)


def _vertices(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ContractViolation(f"expected an (N, 3) array of points, got shape {pts.shape}")
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if len(pts) > 1 and np.allclose(pts[0], pts[-1], rtol=0.0, atol=_DISTINCT_TOL):
        pts = pts[:-1]
    return pts


def _n_distinct(pts):
    distinct = []
    for p in pts:
        if not any(np.allclose(p, q, rtol=0.0, atol=_DISTINCT_TOL) for q in distinct):
            distinct.append(p)
            if len(distinct) >= 3:
                break
    return len(distinct)


def _fan_apex(pts, area):
    """Pick the apex of the triangle fan: inside the loop and far from every antipode."""
    candidates = []
    n = np.linalg.norm(area)
    if n > 1e-12:
        candidates.append(area / n)
    mean = pts.sum(axis=0)
    if np.linalg.norm(mean) > 1e-12:
        candidates.append(mean / np.linalg.norm(mean))
    candidates.extend(np.vstack([np.eye(3), -np.eye(3)]))
    best, best_margin = None, -np.inf
    for c in candidates:
        margin = float(np.min(1.0 + pts @ c))
        if margin > 1e-3:
            return c
        if margin > best_margin:
            best, best_margin = c, margin
    return best


def polygon_solid_angle(points, apex=None):
    """Oriented solid angle of the closed geodesic polygon through ``points``.

    The polygon is closed implicitly (a repeated final vertex is dropped).
    The area is summed as a fan of geodesic triangles sharing an apex
    which, unless given, is chosen inside the loop.  The value is the
    oriented area of the smaller region bounded by the polygon, positive
    for counterclockwise traversal seen from outside, in [-2*pi, 2*pi]
    up to rounding; it is determined modulo 4*pi.  Degenerate polygons
    (fewer than 3 distinct vertices, or zero enclosed area on a single
    great circle) return ``SolidAngle(0.0, True)``.
    """
    pts = _vertices(points)
    nxt = np.roll(pts, -1, axis=0)
    dots = np.einsum("ij,ij->i", pts, nxt)
    if np.any(np.abs(dots + 1.0) < ANTIPODAL_TOL):
        raise NoUniqueGeodesicError("consecutive polygon vertices are antipodal")
    if _n_distinct(pts) < 3:
        return SolidAngle(0.0, True)
    area = np.cross(pts, nxt).sum(axis=0)
    if np.linalg.norm(area) < 1e-12 and np.linalg.svd(pts, compute_uv=False)[-1] < 1e-12:
        return SolidAngle(0.0, True)
    c = _fan_apex(pts, area) if apex is None else as_point(apex)
    omega = float(np.fmod(np.sum(triangle_excess(c, pts, nxt)), 4.0 * np.pi))
    # report the smaller of the two regions bounded by the loop, so that
    # reversal negates the value; a loop splitting the sphere in halves keeps +2*pi
    if omega > 2.0 * np.pi + _FOLD_TOL:
        omega -= 4.0 * np.pi
    elif omega < -2.0 * np.pi - _FOLD_TOL:
        omega += 4.0 * np.pi
    return SolidAngle(omega, False)


def sampled_loop_solid_angle(samples):
    """Solid angle enclosed by a smooth loop given by ordered samples.

    Consecutive samples are joined by geodesics, so the error against the
    continuum loop falls off quadratically with the sample count.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or len(_vertices(pts)) < 3:
        raise ContractViolation("a sampled loop needs at least 3 samples")
    return polygon_solid_angle(pts)


def complement(omega):
    """Solid angle of the complementary region with the same orientation sign.

    ``omega + complement(omega)`` is +4*pi or -4*pi.
    """
    omega = float(getattr(omega, "value", omega))
    sign = 1.0 if omega >= 0.0 else -1.0
    return sign * 4.0 * np.pi - omega


def geodesic_polygon(vertices, samples):
    """Sample the closed geodesic polygon through ``vertices`` with about ``samples`` points.

    Points are spread over edges in proportion to arc length.  The returned
    array repeats the first vertex at the end.
    """
    v = _vertices(vertices)
    nxt = np.roll(v, -1, axis=0)
    lengths = np.arctan2(np.linalg.norm(np.cross(v, nxt), axis=1), np.einsum("ij,ij->i", v, nxt))
    if np.any(lengths <= 0):
        raise ContractViolation("polygon has repeated consecutive vertices")
    counts = np.maximum(1, np.round(samples * lengths / lengths.sum()).astype(int))
    out = []
    for a, b, n in zip(v, nxt, counts):
        for k in range(n):
            out.append(geodesic_interpolate(a, b, k / n))
    out.append(v[0])
    return np.array(out)
