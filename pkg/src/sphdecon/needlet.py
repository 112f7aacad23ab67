"""Littlewood-Paley window and the needlet frame.

A needlet atom at level j, centered at the cubature point eta with weight
lambda_eta, is

    psi_{j,eta}(x) = sqrt(lambda_eta) * sum_l b(l / 2^j) L_l(<x, eta>),

where b is the window and L_l the degree-l reproducing kernel. The window is
supported in (1/2, 2), so only degrees 2^{j-1} < l < 2^{j+1} contribute.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import legval
from scipy.integrate import quad

from .cubature import equal_area_points
from .geometry import SphereDirection, angles_to_vectors

_FOUR_PI = 4.0 * np.pi


def _bump(t):
    if t <= 0.5 or t >= 1.0:
        return 0.0
    return np.exp(-1.0 / ((t - 0.5) * (1.0 - t)))


_BUMP_MASS = quad(_bump, 0.5, 1.0)[0]


class WindowFunction:
    """Smooth cutoff phi and the induced band window b(xi) = sqrt(phi(xi/2) - phi(xi)).

    phi is 1 on [0, 1/2], 0 on [1, inf), and on (1/2, 1) decreases as the
    normalized tail integral of the C-infinity bump
    h(t) = exp(-1 / ((t - 1/2)(1 - t))).
    """

    @staticmethod
    @lru_cache(maxsize=None)
    def phi(xi):
        xi = float(xi)
        if xi < 0:
            raise ValueError("window argument must be >= 0")
        if xi <= 0.5:
            return 1.0
        if xi >= 1.0:
            return 0.0
        val = quad(_bump, xi, 1.0, epsabs=1e-13, epsrel=1e-12)[0] / _BUMP_MASS
        # clamping keeps phi monotone across the flat regions, which makes the
        # dyadic partition of unity telescope exactly in floating point
        return min(1.0, max(0.0, val))

    def b(self, xi):
        return np.sqrt(self.b_squared(xi))

    def b_squared(self, xi):
        xi = float(xi)
        if xi < 0:
            raise ValueError("window argument must be >= 0")
        return self.phi(xi / 2.0) - self.phi(xi)


_DEFAULT_WINDOW = WindowFunction()


def window_eval(window, xi):
    """Value b(xi) of the band window."""
    return window.b(xi)


def band_degrees(j):
    """Degrees l with 2^{j-1} < l < 2^{j+1} (the support of b(l/2^j))."""
    lo = 1 if j == 0 else 2 ** (j - 1) + 1
    return np.arange(lo, 2 ** (j + 1))


class NeedletFrame:
    """Needlet frame up to level J over per-level cubature point sets.

    By default each level j uses the equal-area pixelization at resolution j
    (the simulation convention); pass cubature_factory=gauss-based sets where
    exact tight-frame reconstruction is required.
    """

    def __init__(self, J, window=None, cubature_factory=equal_area_points):
        if J < 0:
            raise ValueError("max level must be >= 0")
        self.J = int(J)
        self.window = window if window is not None else _DEFAULT_WINDOW
        self.cubatures = [cubature_factory(j) for j in range(self.J + 1)]
        self.bands = [band_degrees(j) for j in range(self.J + 1)]
        self.band_windows = [
            np.array([self.window.b(l / 2.0 ** j) for l in self.bands[j]])
            for j in range(self.J + 1)
        ]

    @property
    def max_degree(self):
        """Largest degree carried by any level (= 2^{J+1} - 1)."""
        return 2 ** (self.J + 1) - 1

    def n_atoms(self, j):
        self._check_level(j)
        return len(self.cubatures[j])

    def _check_level(self, j):
        if not 0 <= j <= self.J:
            raise ValueError(f"level {j} outside [0, {self.J}]")

    def _check_atom(self, j, eta):
        self._check_level(j)
        if not 0 <= eta < len(self.cubatures[j]):
            raise ValueError(f"atom index {eta} outside level {j}")

    def center(self, j, eta):
        self._check_atom(j, eta)
        cub = self.cubatures[j]
        return SphereDirection(cub.thetas[eta], cub.phis[eta])

    def weight(self, j, eta):
        self._check_atom(j, eta)
        return float(self.cubatures[j].weights[eta])

    def _kernel_coeffs(self, j):
        """Legendre coefficient vector c_l = b(l/2^j) (2l+1)/(4 pi) over l=0..max."""
        band = self.bands[j]
        c = np.zeros(band[-1] + 1)
        c[band] = self.band_windows[j] * (2 * band + 1) / _FOUR_PI
        return c

    def atom_eval(self, j, eta, theta, phi):
        """psi_{j,eta} evaluated at (theta, phi); accepts arrays."""
        self._check_atom(j, eta)
        center = self.center(j, eta)
        t = angles_to_vectors(theta, phi) @ center.unit_vector()
        t = np.clip(t, -1.0, 1.0)
        return np.sqrt(self.weight(j, eta)) * legval(t, self._kernel_coeffs(j))

    def atom_harmonic_coeffs(self, j, eta):
        """Sparse map (l, m) -> (psi_{j,eta}, Y_lm); nonzero only on band(j)."""
        from .harmonics import sph_harm_block

        self._check_atom(j, eta)
        center = self.center(j, eta)
        root_w = np.sqrt(self.weight(j, eta))
        out = {}
        for bl, l in zip(self.band_windows[j], self.bands[j]):
            ylm = sph_harm_block(l, center.theta, center.phi)
            for m in range(-l, l + 1):
                out[(l, int(m))] = root_w * bl * np.conj(ylm[m + l])
        return out

    def atom_norm2_harmonic(self, j, eta):
        """||psi||_2 from the coefficient formula lambda * sum_l b^2 (2l+1)/(4 pi)."""
        self._check_atom(j, eta)
        band = self.bands[j]
        return float(
            np.sqrt(
                self.weight(j, eta)
                * np.sum(self.band_windows[j] ** 2 * (2 * band + 1) / _FOUR_PI)
            )
        )

    def analyze(self, spectrum):
        """Needlet coefficients beta_{j,eta} = (f, psi_{j,eta}) from a spectrum.

        Returns a list of real arrays, one per level. The pairing is
        sqrt(lambda) * sum_l b(l/2^j) sum_m f_hat^l_m Y_lm(center): real up to
        roundoff for spectra with the real-function symmetry.
        """
        from .harmonics import iter_sph_harm_blocks

        if spectrum.max_degree < 2 ** (self.J + 1):
            raise ValueError(
                f"spectrum max degree {spectrum.max_degree} < required {2 ** (self.J + 1)}"
            )
        out = []
        for j in range(self.J + 1):
            cub = self.cubatures[j]
            beta = np.zeros(len(cub), dtype=complex)
            blocks = dict()
            for l, block in iter_sph_harm_blocks(self.bands[j][-1], cub.thetas, cub.phis):
                blocks[l] = block
            for bl, l in zip(self.band_windows[j], self.bands[j]):
                beta += bl * (spectrum.block(l) @ blocks[l])
            out.append(np.sqrt(cub.weights) * beta.real)
        return out

    def synthesize(self, coefficients, constant_term=0.0):
        """Evaluator x -> constant + sum_{j,eta} beta_{j,eta} psi_{j,eta}(x).

        coefficients is a list of per-level arrays (zeros are skipped).
        """
        levels = []
        for j, beta in enumerate(coefficients):
            beta = np.asarray(beta, dtype=float)
            if beta.shape != (self.n_atoms(j),):
                raise ValueError(f"level {j} expects {self.n_atoms(j)} coefficients")
            idx = np.nonzero(beta)[0]
            if idx.size:
                cub = self.cubatures[j]
                centers = angles_to_vectors(cub.thetas[idx], cub.phis[idx])
                scaled = beta[idx] * np.sqrt(cub.weights[idx])
                levels.append((self._kernel_coeffs(j), centers, scaled))

        def evaluator(theta, phi):
            pts = angles_to_vectors(theta, phi)
            scalar = pts.ndim == 1
            pts = np.atleast_2d(pts)
            total = np.full(pts.shape[0], float(constant_term))
            for kern, centers, scaled in levels:
                t = np.clip(pts @ centers.T, -1.0, 1.0)
                total += legval(t, kern) @ scaled
            return float(total[0]) if scalar else total

        return evaluator


def frame_analysis(frame, spectrum):
    return frame.analyze(spectrum)


def frame_synthesis(frame, coefficients, constant_term=0.0):
    return frame.synthesize(coefficients, constant_term)


def besov_seminorm(frame, coefficients, s, pi, r):
    """Sequence-space norm || ( 2^{j[s + 2(1/2 - 1/pi)]} ||beta_j||_pi )_j ||_r.

    Diagnostic over the levels present in `coefficients`; pi or r may be inf.
    """
    if s <= 0 or pi < 1 or r < 1:
        raise ValueError("need s > 0, pi >= 1, r >= 1")
    terms = []
    for j, beta in enumerate(coefficients):
        beta = np.asarray(beta, dtype=float)
        if np.isinf(pi):
            lnorm = np.max(np.abs(beta)) if beta.size else 0.0
        else:
            lnorm = np.sum(np.abs(beta) ** pi) ** (1.0 / pi)
        terms.append(2.0 ** (j * (s + 2.0 * (0.5 - 1.0 / pi))) * lnorm)
    terms = np.asarray(terms)
    if np.isinf(r):
        return float(np.max(terms)) if terms.size else 0.0
    return float(np.sum(terms ** r) ** (1.0 / r))
