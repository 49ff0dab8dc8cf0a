import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenberg import group
from heisenberg.group import Isometry

coord = st.floats(-50, 50, allow_nan=False)
points = st.tuples(coord, coord, coord).map(np.array)
angles = st.floats(-10, 10, allow_nan=False)


def test_product_examples():
    np.testing.assert_array_equal(group.multiply([1, 0, 0], [0, 1, 0]), [1, 1, -2])
    np.testing.assert_array_equal(group.multiply([0, 0, 0], [3, -4, 7]), [3, -4, 7])
    p = np.array([0.3, -1.2, 5.0])
    np.testing.assert_allclose(group.multiply(p, group.inverse(p)), 0, atol=1e-15)


def test_inverse_examples():
    np.testing.assert_array_equal(group.inverse([1, 2, 3]), [-1, -2, -3])
    np.testing.assert_array_equal(group.inverse([0, 0, 0]), [0, 0, 0])


def test_product_broadcasts(rng):
    a, b = rng.normal(size=(5, 3)), rng.normal(size=3)
    out = group.multiply(a, b)
    assert out.shape == (5, 3)
    np.testing.assert_allclose(out[2], group.multiply(a[2], b))


def test_shape_is_checked():
    with pytest.raises(ValueError):
        group.multiply([1, 2], [0, 0, 0])


@settings(max_examples=200)
@given(points, points, points)
def test_associative(p, q, r):
    lhs = group.multiply(group.multiply(p, q), r)
    rhs = group.multiply(p, group.multiply(q, r))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@settings(max_examples=200)
@given(points, points, angles, st.floats(0.1, 10))
def test_rotation_reflection_dilation_are_automorphisms(p, q, theta, lam):
    pq = group.multiply(p, q)
    for phi in (lambda v: group.rotate(theta, v), group.reflect, lambda v: group.dilate(lam, v)):
        np.testing.assert_allclose(phi(pq), group.multiply(phi(p), phi(q)), rtol=1e-11, atol=1e-8)


def test_dilation_examples():
    np.testing.assert_array_equal(group.dilate(2, [1, 0, 1]), [2, 0, 4])
    np.testing.assert_array_equal(group.dilate(1, [0.5, -2, 3]), [0.5, -2, 3])
    eps = 1e-3
    np.testing.assert_allclose(group.dilate(1 + eps, [0, 0, 1]), [0, 0, (1 + eps) ** 2])
    with pytest.raises(ValueError):
        group.dilate(0.0, [1, 0, 0])


def test_gauge_examples():
    assert group.gauge_distance([0, 0, 0], [1, 0, 0]) == pytest.approx(1)
    assert group.gauge_distance([0, 0, 0], [0, 0, 4]) == pytest.approx(2)
    # (1,0,0)^-1 (0,1,0) = (-1, 1, -2): horizontal sqrt 2, vertical sqrt 2
    assert group.gauge_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(2 * math.sqrt(2))


def test_isometry_examples():
    np.testing.assert_allclose(Isometry((0, 0, 0), math.pi / 2, 0)([1, 0, 0]), [0, 1, 0], atol=1e-15)
    np.testing.assert_array_equal(Isometry((0, 0, 0), 0, 1)([1, 2, 3]), [1, -2, -3])
    np.testing.assert_array_equal(Isometry((0, 0, 5), 0, 0)([1, 1, 0]), [1, 1, 5])


def test_isometry_rejects_bad_reflection_count():
    with pytest.raises(ValueError):
        Isometry((0, 0, 0), 0, 2)


@settings(max_examples=100)
@given(points, angles, st.integers(0, 1), points, angles, st.integers(0, 1), points)
def test_compose_and_inverse(w1, t1, m1, w2, t2, m2, p):
    g, h = Isometry(tuple(w1), t1, m1), Isometry(tuple(w2), t2, m2)
    np.testing.assert_allclose(g.compose(h)(p), g(h(p)), rtol=1e-10, atol=1e-6)
    np.testing.assert_allclose(g.inverse()(g(p)), p, rtol=1e-10, atol=1e-6)


def test_isometry_json_roundtrip():
    g = Isometry((0.25, -1.0, 3.0), 1.3, 1)
    payload = json.loads(json.dumps(g.to_json()))
    assert set(payload) == {"w", "theta", "m"}
    assert Isometry.from_json(payload) == g


def test_isometry_matrix_is_orthogonal():
    for m in (0, 1):
        a = Isometry((0, 0, 0), 0.8, m).matrix
        np.testing.assert_allclose(a.T @ a, np.eye(2), atol=1e-15)
        assert np.linalg.det(a) == pytest.approx(1 - 2 * m)
