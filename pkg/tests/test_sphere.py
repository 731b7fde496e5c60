import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomphase.errors import ContractViolation, NoUniqueGeodesicError
from geomphase.sphere import (
    SolidAngle,
    complement,
    geodesic_interpolate,
    geodesic_polygon,
    polygon_solid_angle,
    sampled_loop_solid_angle,
    triangle_excess,
)
from geomphase.systems import cone_direction

from conftest import random_rotation

X, Y, Z = np.eye(3)


def lhuilier(a, b, c):
    """Oriented triangle area from side lengths (l'Huilier's theorem)."""
    ga = np.arccos(np.clip(b @ c, -1, 1))
    gb = np.arccos(np.clip(c @ a, -1, 1))
    gc = np.arccos(np.clip(a @ b, -1, 1))
    s = 0.5 * (ga + gb + gc)
    t = np.tan(s / 2) * np.tan((s - ga) / 2) * np.tan((s - gb) / 2) * np.tan((s - gc) / 2)
    e = 4 * np.arctan(np.sqrt(max(t, 0.0)))
    return np.sign(np.dot(a, np.cross(b, c))) * e


def mod4pi(x):
    return abs((x + 2 * np.pi) % (4 * np.pi) - 2 * np.pi)


def unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def cone(theta, n):
    return cone_direction(theta, 2 * np.pi * np.arange(n) / n)


def test_geodesic_interpolate_examples():
    assert np.allclose(geodesic_interpolate(X, X, 0.3), X)
    assert np.allclose(geodesic_interpolate(X, Y, 0.5), [1 / np.sqrt(2), 1 / np.sqrt(2), 0])
    assert np.allclose(geodesic_interpolate(X, Y, 0.0), X)
    assert np.allclose(geodesic_interpolate(X, Y, 1.0), Y)
    with pytest.raises(NoUniqueGeodesicError):
        geodesic_interpolate(Z, -Z, 0.5)


def test_geodesic_interpolate_stays_on_minor_arc(rng):
    a, b = unit(rng, 2)
    full = np.arccos(a @ b)
    for f in np.linspace(0, 1, 11):
        p = geodesic_interpolate(a, b, f)
        assert abs(np.linalg.norm(p) - 1) < 1e-12
        assert abs(np.arccos(np.clip(a @ p, -1, 1)) - f * full) < 1e-9


def test_octant_solid_angle():
    assert abs(polygon_solid_angle([X, Y, Z]).value - np.pi / 2) < 1e-14
    assert abs(polygon_solid_angle([X, Z, Y]).value + np.pi / 2) < 1e-14


def test_octant_closing_vertex_is_ignored():
    assert polygon_solid_angle([X, Y, Z, X]) == polygon_solid_angle([X, Y, Z])


def test_degenerate_loops():
    assert polygon_solid_angle([X, X, X, X]) == SolidAngle(0.0, True)
    assert polygon_solid_angle([X, Y, X, Y]).degenerate
    back_forth = [geodesic_interpolate(X, Y, f) for f in np.linspace(0, 1, 20)]
    back_forth += back_forth[-2:0:-1]
    assert abs(polygon_solid_angle(back_forth).value) < 1e-9


def test_antipodal_consecutive_vertices_rejected():
    with pytest.raises(NoUniqueGeodesicError):
        polygon_solid_angle([Z, -Z, X])


def test_random_triangles_match_lhuilier(rng):
    for a, b, c in unit(rng, 300).reshape(100, 3, 3):
        assert abs(polygon_solid_angle([a, b, c]).value - lhuilier(a, b, c)) < 1e-10
        assert abs(triangle_excess(a, b, c) - lhuilier(a, b, c)) < 1e-10


def test_cone_solid_angle():
    theta = np.pi / 3
    assert abs(sampled_loop_solid_angle(cone(theta, 720)).value - np.pi) < 1e-4
    assert abs(sampled_loop_solid_angle(cone(np.pi / 2, 720)).value - 2 * np.pi) < 1e-4


def test_sampled_loop_rejects_short_input():
    with pytest.raises(ContractViolation):
        sampled_loop_solid_angle([X, Y])


@pytest.mark.parametrize("theta", [0.3, np.pi / 3, 2.0, 2.9])
def test_refinement_at_least_quadratic(theta):
    exact = 2 * np.pi * (1 - np.cos(theta))
    errs = [mod4pi(sampled_loop_solid_angle(cone(theta, n)).value - exact) for n in (90, 180, 360, 720)]
    for e1, e2 in zip(errs, errs[1:]):
        assert e2 <= e1 / 4 * 1.01


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_reversal_negates_exactly(n, seed):
    pts = unit(np.random.default_rng(seed), n)
    fwd = polygon_solid_angle(pts).value
    rev = polygon_solid_angle(pts[::-1]).value
    assert abs(fwd + rev) < 1e-12


def test_rotation_invariance(rng):
    for _ in range(50):
        pts = cone(0.9, 7) + 0.2 * rng.normal(size=(7, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        R = random_rotation(rng)
        w = polygon_solid_angle(pts).value
        assert abs(polygon_solid_angle(pts @ R.T).value - w) < 1e-10


def test_additivity_along_chord(rng):
    for _ in range(50):
        phi = np.sort(rng.uniform(0, 2 * np.pi, 6))
        pts = cone_direction(rng.uniform(0.3, 1.2), phi)
        whole = polygon_solid_angle(pts).value
        left = polygon_solid_angle(pts[:4]).value
        right = polygon_solid_angle(np.vstack([pts[3:], pts[:1]])).value
        assert abs(left + right - whole) < 1e-9


def test_complement_sums_to_four_pi(rng):
    for _ in range(20):
        w = polygon_solid_angle(unit(rng, 5))
        assert abs(abs(w.value + complement(w)) - 4 * np.pi) < 1e-12


def test_large_loop_reports_smaller_region():
    theta = 2.5
    exact = 2 * np.pi * (1 - np.cos(theta))
    w = sampled_loop_solid_angle(cone(theta, 2000)).value
    assert abs(w - (exact - 4 * np.pi)) < 1e-4
    assert abs(w + sampled_loop_solid_angle(cone(theta, 2000)[::-1]).value) < 1e-12


def test_geodesic_polygon_samples_lie_on_edges():
    pts = geodesic_polygon([X, Y, Z], 90)
    assert np.allclose(pts[0], pts[-1])
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    assert abs(polygon_solid_angle(pts).value - np.pi / 2) < 1e-12
