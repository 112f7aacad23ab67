import numpy as np
import pytest

from sphdecon.geometry import (
    EulerRotation,
    SphereDirection,
    angles_to_vectors,
    geodesic_distance,
    vectors_to_angles,
)

rng = np.random.default_rng(11)


@pytest.mark.parametrize("theta,phi", [(0.0, 0.0), (np.pi, 1.0), (1.1, 0.4), (2.9, 6.1)])
def test_unit_vector_norm(theta, phi):
    v = SphereDirection(theta, phi).unit_vector()
    assert abs(np.linalg.norm(v) - 1.0) < 1e-14


def test_direction_validation():
    with pytest.raises(ValueError):
        SphereDirection(-0.1, 0.0)
    with pytest.raises(ValueError):
        SphereDirection(np.pi + 0.1, 0.0)


def test_geodesic_examples():
    x = SphereDirection(0.7, 1.2)
    assert geodesic_distance(x, x) == 0.0
    anti = SphereDirection(np.pi - 0.7, 1.2 + np.pi)
    assert abs(geodesic_distance(x, anti) - np.pi) < 1e-14
    pole = SphereDirection(0.0, 0.0)
    eq = SphereDirection(np.pi / 2, 2.345)
    assert abs(geodesic_distance(pole, eq) - np.pi / 2) < 1e-14


def test_geodesic_range_and_symmetry():
    for _ in range(50):
        a = SphereDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        b = SphereDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        d = geodesic_distance(a, b)
        assert 0.0 <= d <= np.pi
        assert abs(d - geodesic_distance(b, a)) < 1e-15


def test_rotation_matrix_orthogonal():
    for _ in range(25):
        g = EulerRotation(
            rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        )
        R = g.matrix()
        assert np.max(np.abs(R @ R.T - np.eye(3))) < 1e-13
        assert abs(np.linalg.det(R) - 1.0) < 1e-13


def test_rotation_composition_matches_elementals():
    # g = u(phi) a(theta) u(psi) evaluated against explicit products
    g = EulerRotation(0.3, 1.1, 2.2)
    cz, sz = np.cos(0.3), np.sin(0.3)
    u = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    cy, sy = np.cos(1.1), np.sin(1.1)
    a = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    cz2, sz2 = np.cos(2.2), np.sin(2.2)
    u2 = np.array([[cz2, -sz2, 0], [sz2, cz2, 0], [0, 0, 1]])
    assert np.max(np.abs(g.matrix() - u @ a @ u2)) < 1e-15


def test_angle_vector_round_trip():
    th = rng.uniform(0, np.pi, 100)
    ph = rng.uniform(0, 2 * np.pi, 100)
    t2, p2 = vectors_to_angles(angles_to_vectors(th, ph))
    assert np.max(np.abs(t2 - th)) < 1e-12
    assert np.max(np.abs((p2 - ph + np.pi) % (2 * np.pi) - np.pi)) < 1e-12
