"""Points on the 2-sphere and rotations of R^3 in Euler-angle form."""

import numpy as np

TWO_PI = 2.0 * np.pi


class SphereDirection:
    """A direction on the unit sphere: colatitude theta in [0, pi], longitude phi in [0, 2pi)."""

    __slots__ = ("theta", "phi")

    def __init__(self, theta, phi):
        theta = float(theta)
        if not 0.0 <= theta <= np.pi:
            raise ValueError(f"colatitude must lie in [0, pi], got {theta}")
        self.theta = theta
        self.phi = float(phi) % TWO_PI

    def unit_vector(self):
        st = np.sin(self.theta)
        return np.array(
            [np.cos(self.phi) * st, np.sin(self.phi) * st, np.cos(self.theta)]
        )

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v)
        if r == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(np.arccos(np.clip(v[2] / r, -1.0, 1.0)), np.arctan2(v[1], v[0]))

    def __repr__(self):
        return f"SphereDirection(theta={self.theta:.6f}, phi={self.phi:.6f})"

    def __eq__(self, other):
        return (
            isinstance(other, SphereDirection)
            and self.theta == other.theta
            and self.phi == other.phi
        )


class EulerRotation:
    """Rotation g = u(phi) a(theta) u(psi): z-rotation, then y-rotation, then z-rotation.

    u(phi) rotates counterclockwise about Oz, a(theta) about Oy, acting on
    column vectors on the left.
    """

    __slots__ = ("phi", "theta", "psi")

    def __init__(self, phi, theta, psi):
        theta = float(theta)
        if not 0.0 <= theta <= np.pi:
            raise ValueError(f"middle Euler angle must lie in [0, pi], got {theta}")
        self.phi = float(phi) % TWO_PI
        self.theta = theta
        self.psi = float(psi) % TWO_PI

    def matrix(self):
        return _zrot(self.phi) @ _yrot(self.theta) @ _zrot(self.psi)

    def __repr__(self):
        return (
            f"EulerRotation(phi={self.phi:.6f}, theta={self.theta:.6f}, "
            f"psi={self.psi:.6f})"
        )


def _zrot(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _yrot(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def angles_to_vectors(theta, phi):
    """Stack of unit vectors, shape (..., 3), from colatitude/longitude arrays."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack(
        [np.cos(phi) * st, np.sin(phi) * st, np.cos(theta) * np.ones_like(phi)],
        axis=-1,
    )


def vectors_to_angles(vec):
    """Inverse of angles_to_vectors for unit vectors; phi wrapped to [0, 2pi)."""
    vec = np.asarray(vec, dtype=float)
    theta = np.arccos(np.clip(vec[..., 2], -1.0, 1.0))
    phi = np.arctan2(vec[..., 1], vec[..., 0]) % TWO_PI
    return theta, phi


def geodesic_distance(x, y):
    """Great-circle distance d(x, y) = arccos <x, y> in [0, pi].

    Arguments may be SphereDirection instances or (theta, phi) pairs.
    """
    xv = x.unit_vector() if isinstance(x, SphereDirection) else angles_to_vectors(*x)
    yv = y.unit_vector() if isinstance(y, SphereDirection) else angles_to_vectors(*y)
    return float(np.arccos(np.clip(np.dot(xv, yv), -1.0, 1.0)))


def geodesic_distances(theta, phi, theta0, phi0):
    """Vectorized great-circle distances from (theta, phi) arrays to one point."""
    cosd = np.cos(theta) * np.cos(theta0) + np.sin(theta) * np.sin(theta0) * np.cos(
        np.asarray(phi) - phi0
    )
    return np.arccos(np.clip(cosd, -1.0, 1.0))
