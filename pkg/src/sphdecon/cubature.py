"""Cubature point sets on the sphere.

Two schemes:

* ``equal_area_points(j)`` -- the standard equal-area ring pixelization with
  N_side = 2^j (12 * 4^j pixel centers, uniform weights 4 pi / N_pix). This is
  the grid the simulation protocol uses; its quadrature is only approximately
  exact and is documented as such.
* ``gauss_product_grid(L)`` -- Gauss-Legendre colatitudes x equispaced
  longitudes; integrates every spherical polynomial of degree <= 2L+1 exactly.
  Used wherever exactness matters (transforms, oracles, frame reconstruction).
"""

import numpy as np

from .geometry import TWO_PI, angles_to_vectors

FOUR_PI = 4.0 * np.pi


class CubatureSet:
    """Immutable point set with weights (steradians)."""

    def __init__(self, scheme, level_or_degree, thetas, phis, weights, exact_degree=None):
        self.scheme = scheme
        self.level_or_degree = int(level_or_degree)
        self.thetas = np.asarray(thetas, dtype=float)
        self.phis = np.asarray(phis, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.exact_degree = exact_degree
        for arr in (self.thetas, self.phis, self.weights):
            arr.setflags(write=False)

    def __len__(self):
        return self.thetas.size

    def unit_vectors(self):
        return angles_to_vectors(self.thetas, self.phis)

    def integrate(self, values):
        """Weighted sum approximating the surface integral (total mass 4 pi)."""
        return np.sum(self.weights * np.asarray(values))

    def to_csv(self, path):
        """Write (theta, phi, weight) rows with full double precision."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("theta,phi,weight\n")
            for t, p, w in zip(self.thetas, self.phis, self.weights):
                fh.write(f"{t:.17g},{p:.17g},{w:.17g}\n")

    def __repr__(self):
        return (
            f"CubatureSet({self.scheme}, level_or_degree={self.level_or_degree}, "
            f"n={len(self)})"
        )


def equal_area_points(j):
    """Pixel centers of the equal-area ring pixelization at resolution level j.

    N_side = 2^j; 12 * 4^j points ordered ring by ring from the north pole,
    ascending longitude within each ring; every weight is 4 pi / N_pix.
    """
    if j < 0:
        raise ValueError("resolution level must be >= 0")
    nside = 2 ** j
    npix = 12 * nside * nside
    thetas = []
    phis = []
    # north polar cap: ring i has 4i pixels
    for i in range(1, nside):
        z = 1.0 - i * i / (3.0 * nside * nside)
        k = np.arange(4 * i)
        thetas.append(np.full(4 * i, np.arccos(z)))
        phis.append(np.pi / (2 * i) * (k + 0.5))
    # equatorial belt: rings i = nside..3*nside, 4*nside pixels each
    for i in range(nside, 3 * nside + 1):
        z = 4.0 / 3.0 - 2.0 * i / (3.0 * nside)
        s = (i - nside + 1) % 2
        k = np.arange(4 * nside)
        thetas.append(np.full(4 * nside, np.arccos(z)))
        phis.append(np.pi / (2 * nside) * (k + 0.5 * s))
    # south polar cap mirrors the north
    for i in range(nside - 1, 0, -1):
        z = -(1.0 - i * i / (3.0 * nside * nside))
        k = np.arange(4 * i)
        thetas.append(np.full(4 * i, np.arccos(z)))
        phis.append(np.pi / (2 * i) * (k + 0.5))
    thetas = np.concatenate(thetas)
    phis = np.concatenate(phis) % TWO_PI
    weights = np.full(npix, FOUR_PI / npix)
    return CubatureSet("EqualArea", j, thetas, phis, weights, exact_degree=None)


def gauss_product_grid(L):
    """Product grid exact for all spherical polynomials of degree <= 2L+1.

    (L+1) Gauss-Legendre nodes in cos(theta) times 2L+2 equispaced longitudes.
    """
    if L < 0:
        raise ValueError("degree must be >= 0")
    nodes, gl_weights = np.polynomial.legendre.leggauss(L + 1)
    n_phi = 2 * L + 2
    phi = TWO_PI * np.arange(n_phi) / n_phi
    theta = np.arccos(nodes)
    thetas = np.repeat(theta, n_phi)
    phis = np.tile(phi, L + 1)
    weights = np.repeat(gl_weights * TWO_PI / n_phi, n_phi)
    return CubatureSet("GaussProduct", L, thetas, phis, weights, exact_degree=2 * L + 1)
