"""Tests for quadrilateral measurements and the square-like generator."""

import math

import numpy as np
import pytest

from helpers import random_rotation
from sqpeg.quad import Quad, make_square_like

TETRA = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]


def test_quad_requires_distinct_points():
    with pytest.raises(ValueError, match="distinct"):
        Quad.from_points([[0, 0], [0, 0], [1, 0], [1, 1]])


def test_residual_square_is_zero():
    q = Quad.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert np.array_equal(q.residual(), np.zeros(4))


def test_residual_tetrahedron_is_zero():
    q = Quad.from_points(TETRA)
    assert np.max(np.abs(q.residual())) < 1e-12
    # cross-check: all six pairwise distances equal
    pts = np.asarray(TETRA, float)
    dists = [np.linalg.norm(pts[i] - pts[j]) for i in range(4) for j in range(i + 1, 4)]
    assert np.ptp(dists) < 1e-12


def test_residual_rectangle_by_hand():
    # independent hand computation of the squared distances
    p, q, r, s = (0, 0), (1, 0), (1, 2), (0, 2)
    sq = lambda a, b: (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2
    expected = (
        sq(p, q) - sq(q, r),
        sq(q, r) - sq(r, s),
        sq(r, s) - sq(s, p),
        sq(p, r) - sq(q, s),
    )
    assert expected == (-3, 3, -3, 0)
    quad = Quad.from_points([p, q, r, s])
    assert np.array_equal(quad.residual(), expected)


def test_is_square_like():
    square = Quad.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert square.is_square_like(1e-12)
    rect = Quad.from_points([[0, 0], [1, 0], [1, 2], [0, 2]])
    assert not rect.is_square_like(1e-6)
    gen = make_square_like(0.5)
    assert gen.is_square_like(1e-10)


def test_theta_values():
    square = Quad.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert math.isclose(square.theta(), math.pi / 4, abs_tol=1e-12)
    tetra = Quad.from_points(TETRA)
    assert math.isclose(tetra.theta(), math.pi / 6, abs_tol=1e-12)


def test_theta_degenerate_limit():
    # diagonals tiny relative to sides: theta near 0
    eps = 1e-6
    q = Quad.from_points([[0, 0], [1, eps], [eps, 2 * eps], [1, 3 * eps]])
    assert q.theta() < 0.01


def test_open_turning_values():
    square = Quad.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert math.isclose(square.open_turning(), math.pi, abs_tol=1e-12)
    tetra = Quad.from_points(TETRA)
    assert math.isclose(tetra.open_turning(), 4 * math.pi / 3, abs_tol=1e-12)
    collinear = Quad.from_points([[0, 0], [1, 0], [2, 0], [3, 0]])
    assert collinear.open_turning() == 0.0


def test_is_planar_square_rigid_motion_3d():
    rng = np.random.default_rng(23)
    base = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
    for _ in range(20):
        rot = random_rotation(3, rng)
        shift = rng.standard_normal(3)
        q = Quad.from_points(base @ rot.T + shift)
        assert q.is_planar_square(1e-9)


def test_is_planar_square_rejects_tetrahedron():
    assert not Quad.from_points(TETRA).is_planar_square(1e-6)


def test_is_planar_square_rejects_out_of_plane_perturbation():
    pts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 1e-3]], float)
    assert not Quad.from_points(pts).is_planar_square(1e-6)


def test_make_square_like_planar_case():
    q = make_square_like(math.pi / 4)
    assert np.max(np.abs(q.residual())) < 1e-12
    assert q.is_planar_square(1e-9)
    assert math.isclose(q.theta(), math.pi / 4, abs_tol=1e-12)


def test_make_square_like_tetrahedron_case():
    q = make_square_like(math.pi / 6, side=1.0)
    d = q.points[:, None, :] - q.points[None, :, :]
    dists = np.linalg.norm(d, axis=2)[np.triu_indices(4, 1)]
    assert np.max(np.abs(dists - 1.0)) < 1e-12


def test_make_square_like_rejects_bad_theta():
    for bad in (0.0, -0.1, math.pi / 4 + 1e-6):
        with pytest.raises(ValueError):
            make_square_like(bad)


def test_make_square_like_rigid_invariance():
    rng = np.random.default_rng(29)
    for _ in range(50):
        theta = rng.uniform(0.05, math.pi / 4)
        rot = random_rotation(3, rng)
        shift = 10.0 * rng.standard_normal(3)
        q = make_square_like(theta, side=2.0, rotation=rot, translation=shift)
        assert np.max(np.abs(q.residual())) < 1e-12 * 4.0
        assert math.isclose(q.theta(), theta, abs_tol=1e-12)


def test_generated_family_identities_sample():
    rng = np.random.default_rng(31)
    for _ in range(300):
        theta = rng.uniform(0.02, math.pi / 4)
        q = make_square_like(theta, side=rng.uniform(0.5, 3.0))
        ot = q.open_turning()
        assert math.isclose(ot, 2 * math.pi - 4 * theta, abs_tol=1e-9)
        assert ot >= math.pi - 1e-12
        assert q.theta() <= math.pi / 4 + 1e-12


def test_metrics_invariant_under_relabelings():
    q = make_square_like(0.4, side=1.3)
    pts = q.points
    shifted = Quad.from_points(np.roll(pts, -1, axis=0))     # (q, r, s, p)
    reversed_ = Quad.from_points(pts[[0, 3, 2, 1]])          # (p, s, r, q)
    for other in (shifted, reversed_):
        assert math.isclose(q.open_turning(), other.open_turning(), abs_tol=1e-12)
        assert math.isclose(q.theta(), other.theta(), abs_tol=1e-12)
        assert math.isclose(np.mean(q.side_lengths()), np.mean(other.side_lengths()),
                            abs_tol=1e-12)
        assert math.isclose(np.mean(q.diagonal_lengths()), np.mean(other.diagonal_lengths()),
                            abs_tol=1e-12)


def test_metrics_rigid_invariance():
    rng = np.random.default_rng(37)
    q = make_square_like(0.6, side=1.0)
    rot = random_rotation(3, rng)
    moved = q.transformed(rot, rng.standard_normal(3))
    m0, m1 = q.metrics(), moved.metrics()
    assert np.allclose(m0.sides, m1.sides, rtol=1e-12, atol=1e-12)
    assert np.allclose(m0.diagonals, m1.diagonals, rtol=1e-12, atol=1e-12)
    assert math.isclose(m0.open_turning, m1.open_turning, abs_tol=1e-9)


def test_open_turning_pi_iff_planar_square():
    # exact planar case: both sides of the equivalence hold
    planar = make_square_like(math.pi / 4)
    assert abs(planar.open_turning() - math.pi) <= 1e-9
    assert planar.is_planar_square(1e-9)
    # decidedly non-planar: both fail
    bent = make_square_like(math.pi / 4 - 0.01)
    assert bent.open_turning() - math.pi > 1e-9
    assert not bent.is_planar_square(1e-9)


def test_json_roundtrip():
    q = make_square_like(0.5)
    back = Quad.from_json_dict(q.to_json_dict())
    assert np.allclose(back.points, q.points)
