"""Rotational Fourier spectra of noise densities on SO(3).

The per-degree blocks are f_eps_hat^l_{mn} = E[ D^l_{mn}(eps) ], the
(2l+1) x (2l+1) matrices through which convolution acts: a density observed
under rotation noise has spherical coefficients f_Z^l = f_eps_hat^l f^l.

Three closed-form models (z-axis uniform rotation, rotational Laplace,
Rosenthal) plus the empirical spectrum averaged over observed rotations.
"""

import json

import numpy as np

from .geometry import EulerRotation
from .harmonics import wigner_d_stack


class IllConditionedDegreeError(ValueError):
    """Raised when a spectral block cannot be inverted reliably."""

    def __init__(self, degree, cond=np.inf):
        self.degree = degree
        self.cond = cond
        super().__init__(
            f"noise spectrum block at degree {degree} is ill-conditioned "
            f"(cond ~ {cond:.3g}); deconvolution cannot use this degree"
        )


class RotationalSpectrum:
    """Per-degree complex matrices of a density on the rotation group."""

    def __init__(self, blocks):
        self.blocks = [np.asarray(b, dtype=complex) for b in blocks]
        for l, b in enumerate(self.blocks):
            if b.shape != (2 * l + 1, 2 * l + 1):
                raise ValueError(f"block {l} has shape {b.shape}")

    @property
    def max_degree(self):
        return len(self.blocks) - 1

    def block(self, l):
        if not 0 <= l <= self.max_degree:
            raise ValueError(f"degree {l} outside [0, {self.max_degree}]")
        return self.blocks[l]

    def to_json_obj(self):
        return {
            "max_degree": self.max_degree,
            "blocks": [
                [[ [v.real, v.imag] for v in row] for row in b] for b in self.blocks
            ],
        }

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_obj(), fh)

    @classmethod
    def from_json_obj(cls, obj):
        blocks = [
            np.array([[complex(re, im) for re, im in row] for row in b])
            for b in obj["blocks"]
        ]
        return cls(blocks)


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

class ZAxisUniform:
    """Rotation about Oz by an angle uniform on [0, a].

    Spectrally diagonal with g_m = (1 - e^{-i m a}) / (i m a) (g_0 = 1),
    independent of the degree. a = 0 is the no-noise identity model.
    """

    def __init__(self, a):
        if a < 0:
            raise ValueError("support bound must be >= 0")
        self.a = float(a)

    def diagonal(self, l):
        m = np.arange(-l, l + 1)
        if self.a == 0.0:
            return np.ones(2 * l + 1, dtype=complex)
        ma = m * self.a
        with np.errstate(divide="ignore", invalid="ignore"):
            g = -np.expm1(-1j * ma) / (1j * ma)
        g[m == 0] = 1.0
        return g

    def block(self, l):
        return np.diag(self.diagonal(l))

    def sample_angles(self, n, rng):
        """Euler angles (phi, theta, psi) of n independent noise rotations."""
        phi = rng.uniform(0.0, self.a, size=n)
        zero = np.zeros(n)
        return phi, zero, zero

    def __repr__(self):
        return f"ZAxisUniform(a={self.a!r})"


class RotationalLaplace:
    """Ordinary-smooth model with diagonal (1 + rho^2 l(l+1))^{-1}."""

    def __init__(self, rho2):
        if rho2 <= 0:
            raise ValueError("rho^2 must be > 0")
        self.rho2 = float(rho2)

    def diagonal(self, l):
        return np.full(2 * l + 1, 1.0 / (1.0 + self.rho2 * l * (l + 1)), dtype=complex)

    def block(self, l):
        return np.diag(self.diagonal(l))

    def __repr__(self):
        return f"RotationalLaplace(rho2={self.rho2!r})"


class Rosenthal:
    """p-fold conjugate-invariant random walk about a fixed axis.

    Diagonal ( sin((l + 1/2) theta) / ((2l+1) sin(theta/2)) )^p.
    """

    def __init__(self, theta, p):
        if not 0.0 < theta <= np.pi:
            raise ValueError("theta must lie in (0, pi]")
        if p <= 0:
            raise ValueError("p must be > 0")
        self.theta = float(theta)
        self.p = float(p)

    def diagonal(self, l):
        v = np.sin((l + 0.5) * self.theta) / ((2 * l + 1) * np.sin(self.theta / 2.0))
        return np.full(2 * l + 1, complex(v) ** self.p)

    def block(self, l):
        return np.diag(self.diagonal(l))

    def __repr__(self):
        return f"Rosenthal(theta={self.theta!r}, p={self.p!r})"


class EmpiricalNoise:
    """Spectrum estimated from observed rotations: averages of D^l(eps_u).

    Holds the Euler angles (phi, theta, psi) of the realizations.
    """

    def __init__(self, phis, thetas=None, psis=None):
        self.phis = np.asarray(phis, dtype=float)
        n = self.phis.size
        self.thetas = np.zeros(n) if thetas is None else np.asarray(thetas, dtype=float)
        self.psis = np.zeros(n) if psis is None else np.asarray(psis, dtype=float)
        if not (self.thetas.size == n and self.psis.size == n):
            raise ValueError("angle arrays must have equal length")
        if n == 0:
            raise ValueError("need at least one rotation sample")

    @property
    def n_samples(self):
        return self.phis.size

    def __repr__(self):
        return f"EmpiricalNoise(n={self.n_samples})"


def spectrum(model, max_degree):
    """Rotational spectrum of a noise model up to the given degree."""
    if max_degree < 0:
        raise ValueError("max degree must be >= 0")
    if isinstance(model, EmpiricalNoise):
        d_stack = wigner_d_stack(max_degree, model.thetas)
        blocks = []
        for l in range(max_degree + 1):
            m = np.arange(-l, l + 1)
            phase_m = np.exp(-1j * np.outer(model.phis, m))
            phase_n = np.exp(-1j * np.outer(model.psis, m))
            terms = phase_m[:, :, None] * d_stack[l] * phase_n[:, None, :]
            blocks.append(terms.mean(axis=0))
        return RotationalSpectrum(blocks)
    return RotationalSpectrum([model.block(l) for l in range(max_degree + 1)])


def sample_rotation(model, rng):
    """One noise rotation; only generative models support sampling."""
    if not hasattr(model, "sample_angles"):
        raise ValueError(f"{model!r} has no generative sampler")
    phi, theta, psi = model.sample_angles(1, rng)
    return EulerRotation(phi[0], theta[0], psi[0])


# ---------------------------------------------------------------------------
# inversion and ill-posedness diagnostics
# ---------------------------------------------------------------------------

def op_norm(spec, l):
    """Largest singular value of the degree-l block."""
    return float(np.linalg.norm(spec.block(l), ord=2))


def inverse_block(spec, l, cond_limit=1e6):
    """Inverse of the degree-l block, guarded by a condition-number limit."""
    b = spec.block(l)
    try:
        cond = np.linalg.cond(b)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedDegreeError(l, cond)
    return np.linalg.inv(b)


def inverse_blocks(spec, max_degree, cond_limit=1e6):
    """Per-degree inverses up to max_degree.

    Returns (blocks, excluded): blocks[l] is the inverse or None for degrees
    failing the condition guard, which are listed in `excluded`.
    """
    if max_degree > spec.max_degree:
        raise ValueError(
            f"spectrum only reaches degree {spec.max_degree}, need {max_degree}"
        )
    blocks = []
    excluded = []
    for l in range(max_degree + 1):
        try:
            blocks.append(inverse_block(spec, l, cond_limit))
        except IllConditionedDegreeError:
            blocks.append(None)
            excluded.append(l)
    return blocks, excluded


def dip_estimate(spec, l_range):
    """Degree-of-ill-posedness fit: slope of log ||(f_eps^l)^{-1}||_op vs log l.

    Returns (nu, rms_residual). Requires at least 3 invertible degrees.
    """
    ls = np.asarray(sorted(set(int(l) for l in l_range)))
    if ls.size < 3:
        raise ValueError("need at least 3 degrees to fit a slope")
    if ls.min() < 1:
        raise ValueError("fit degrees must be >= 1")
    inv_norms = []
    for l in ls:
        s = np.linalg.svd(spec.block(l), compute_uv=False)
        if s[-1] <= 0:
            raise IllConditionedDegreeError(l)
        inv_norms.append(1.0 / s[-1])
    x = np.log(ls.astype(float))
    y = np.log(inv_norms)
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return float(coef[0]), resid
