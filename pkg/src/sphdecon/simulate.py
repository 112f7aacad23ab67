"""Synthetic data generation and error metrics for the experiments.

Targets: the uniform density 1/(4 pi) and a Gaussian-shaped bump
c * exp(-4 |omega - omega_1|^2) with chordal distance |.| in R^3, centered at
omega_1 = (0, 1, 0) and c = 1/0.7854 (sup-norm 1.2732, total mass 1 up to
1e-3). Observations are corrupted as Z_i = eps_i X_i with eps_i sampled from
a generative noise model.
"""

import numpy as np

from .geometry import SphereDirection, angles_to_vectors, vectors_to_angles

_FOUR_PI = 4.0 * np.pi


class Uniform:
    """The uniform density 1/(4 pi)."""

    sup_norm = 1.0 / _FOUR_PI

    def density(self, theta, phi):
        return np.broadcast_to(1.0 / _FOUR_PI, np.broadcast(theta, phi).shape).copy()

    def sample(self, n, rng):
        z = rng.uniform(-1.0, 1.0, size=n)
        phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
        return np.arccos(z), phi

    def __repr__(self):
        return "Uniform()"


class GaussianBump:
    """Bump density amplitude * exp(-scale * |omega - center|^2), chordal metric."""

    def __init__(self, center=None, scale=4.0, amplitude=1.0 / 0.7854):
        if center is None:
            center = SphereDirection(np.pi / 2.0, np.pi / 2.0)  # the point (0, 1, 0)
        self.center = center
        self.scale = float(scale)
        self.amplitude = float(amplitude)

    @property
    def sup_norm(self):
        return self.amplitude

    def density(self, theta, phi):
        vec = angles_to_vectors(theta, phi)
        chord2 = np.sum((vec - self.center.unit_vector()) ** 2, axis=-1)
        return self.amplitude * np.exp(-self.scale * chord2)

    def sample(self, n, rng):
        """Rejection sampling with the uniform proposal and envelope = amplitude."""
        thetas = np.empty(0)
        phis = np.empty(0)
        # acceptance rate is (total mass)/(4 pi * amplitude) ~ 1/16 here
        per_draw = _FOUR_PI * self.amplitude
        while thetas.size < n:
            todo = n - thetas.size
            batch = max(64, int(1.3 * todo * per_draw))
            z = rng.uniform(-1.0, 1.0, size=batch)
            phi = rng.uniform(0.0, 2.0 * np.pi, size=batch)
            theta = np.arccos(z)
            accept = rng.uniform(0.0, 1.0, size=batch) * self.amplitude <= self.density(
                theta, phi
            )
            thetas = np.concatenate([thetas, theta[accept]])
            phis = np.concatenate([phis, phi[accept]])
        return thetas[:n], phis[:n]

    def __repr__(self):
        return (
            f"GaussianBump(center=({self.center.theta:.6f}, {self.center.phi:.6f}), "
            f"scale={self.scale}, amplitude={self.amplitude})"
        )


def density_eval(target, x):
    """Density value at a SphereDirection or (theta, phi) arrays."""
    if isinstance(x, SphereDirection):
        return float(target.density(x.theta, x.phi))
    theta, phi = x
    return target.density(np.asarray(theta), np.asarray(phi))


def sample_density(target, n, rng):
    """n draws from the target; returns (thetas, phis)."""
    if n < 1:
        raise ValueError("sample size must be >= 1")
    return target.sample(n, rng)


def apply_noise(thetas, phis, model, rng):
    """Corrupt observations: Z_i = matrix(eps_i) X_i.

    Returns (Z_thetas, Z_phis, eps) where eps is the (phi, theta, psi) angle
    triplet of the noise realizations, retained so the empirical noise
    spectrum can be estimated from them.
    """
    if not hasattr(model, "sample_angles"):
        raise ValueError(f"{model!r} has no generative sampler")
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    e_phi, e_theta, e_psi = model.sample_angles(thetas.size, rng)
    x = angles_to_vectors(thetas, phis)
    cph, sph = np.cos(e_phi), np.sin(e_phi)
    cth, sth = np.cos(e_theta), np.sin(e_theta)
    cps, sps = np.cos(e_psi), np.sin(e_psi)
    # rows of u(phi) a(theta) u(psi), assembled entrywise
    r00 = cph * cth * cps - sph * sps
    r01 = -cph * cth * sps - sph * cps
    r02 = cph * sth
    r10 = sph * cth * cps + cph * sps
    r11 = -sph * cth * sps + cph * cps
    r12 = sph * sth
    r20 = -sth * cps
    r21 = sth * sps
    r22 = cth
    z = np.empty_like(x)
    z[:, 0] = r00 * x[:, 0] + r01 * x[:, 1] + r02 * x[:, 2]
    z[:, 1] = r10 * x[:, 0] + r11 * x[:, 1] + r12 * x[:, 2]
    z[:, 2] = r20 * x[:, 0] + r21 * x[:, 1] + r22 * x[:, 2]
    z_theta, z_phi = vectors_to_angles(z)
    return z_theta, z_phi, (e_phi, e_theta, e_psi)


def peak_locate(evaluator, grid):
    """Grid point maximizing the evaluator; ties broken by lowest index."""
    if len(grid) == 0:
        raise ValueError("empty grid")
    vals = np.asarray(evaluator(grid.thetas, grid.phis))
    k = int(np.argmax(vals))
    return SphereDirection(grid.thetas[k], grid.phis[k])


def lp_error(evaluator, target, p, grid):
    """Quadrature L^p distance between an evaluator and the target density."""
    diff = np.abs(
        np.asarray(evaluator(grid.thetas, grid.phis))
        - target.density(grid.thetas, grid.phis)
    )
    if np.isinf(p):
        return float(np.max(diff))
    if p < 1:
        raise ValueError("norm index must be >= 1 or inf")
    return float(np.sum(grid.weights * diff ** p) ** (1.0 / p))
