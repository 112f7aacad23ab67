"""Deconvolution estimators: SVD inversion, needlet coefficients, thresholding.

Pipeline for observations Z_1..Z_N on the sphere corrupted by rotation noise:

1. ``svd_coeffs`` inverts the per-degree noise blocks to estimate the
   spherical coefficients of the target density,
2. ``needlet_coeff_estimates`` projects them onto the needlet frame,
3. ``threshold`` keeps a coefficient only when it clears kappa * t_N * sigma
   with t_N = sqrt(log N / N) (natural log) and sigma the per-atom noise
   scale, and
4. ``reconstruct`` evaluates 1/(4 pi) + sum of surviving atoms.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .harmonics import SphericalSpectrum, iter_sph_harm_blocks, spectrum_synthesis

_FOUR_PI = 4.0 * np.pi


def j_max(N):
    """Largest usable level floor((1/2) log2(N / log N)) for N observations."""
    if N < 2:
        raise ValueError("need at least 2 observations")
    return int(math.floor(0.5 * math.log2(N / math.log(N))))


def select_J(N):
    """Level cap: j_max(N), further capped so no level has more atoms than data."""
    cap = j_max(N)
    j = 0
    while 12 * 4 ** (j + 1) <= N:
        j += 1
    return max(0, min(cap, j))


@dataclass(frozen=True)
class EstimatorConfig:
    """Thresholding parameters; t_N is derived from N with natural log."""

    N: int
    J: int
    kappa: float
    M: float

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("need at least 2 observations")
        if self.J > j_max(self.N):
            raise ValueError(f"J={self.J} exceeds j_max({self.N})={j_max(self.N)}")
        if self.J < 0 or self.kappa < 0 or self.M <= 0:
            raise ValueError("need J >= 0, kappa >= 0, M > 0")

    @property
    def t_N(self):
        return math.sqrt(math.log(self.N) / self.N)

    def to_json_obj(self):
        return {"N": self.N, "J": self.J, "kappa": self.kappa, "M": self.M}


def svd_coeffs(thetas, phis, noise_inv, max_degree):
    """Spherical coefficient estimates from noisy observations.

    f_hat^{l,N}_m = sum_n inv^l_{mn} (1/N) sum_u conj(Y_ln(Z_u)). Degrees with
    noise_inv[l] None (excluded as ill-conditioned) are zeroed.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if thetas.size == 0:
        raise ValueError("empty observation sample")
    if len(noise_inv) <= max_degree:
        raise ValueError(f"need inverse blocks up to degree {max_degree}")
    spec = SphericalSpectrum.zeros(max_degree)
    for l, block in iter_sph_harm_blocks(max_degree, thetas, phis):
        inv = noise_inv[l]
        if inv is None:
            continue
        c = np.conj(block).mean(axis=1)
        spec.set_block(l, inv @ c)
    return spec


def needlet_coeff_estimates(frame, thetas, phis, noise_inv):
    """Estimated needlet coefficients beta_hat for every level of the frame.

    Factorizes through svd_coeffs; the spectrum is symmetrized before the
    frame pairing so the imaginary residue of each beta_hat is pure roundoff.
    """
    spec = svd_coeffs(thetas, phis, noise_inv, frame.max_degree + 1)
    return frame.analyze(spec.symmetrized())


def sigma_level(frame, j, noise_inv, M):
    """Noise scales sigma_{j,eta} for every atom of level j.

    sigma^2 = M^2 sum_{l in band(j)} || inv^T psi^l ||^2 with
    psi^l_m = sqrt(lambda) b(l/2^j) conj(Y_lm(center)).
    """
    from .harmonics import sph_harm_block

    cub = frame.cubatures[j]
    acc = np.zeros(len(cub))
    for bl, l in zip(frame.band_windows[j], frame.bands[j]):
        inv = noise_inv[l] if l < len(noise_inv) else None
        if inv is None:
            raise IndexError(
                f"inverse block for degree {l} (band of level {j}) unavailable"
            )
        psi = bl * np.conj(sph_harm_block(l, cub.thetas, cub.phis))
        acc += np.sum(np.abs(inv.T @ psi) ** 2, axis=0)
    return M * np.sqrt(cub.weights * acc)


def sigma(frame, j, eta, noise_inv, M):
    """Noise scale of a single atom (see sigma_level)."""
    frame._check_atom(j, eta)
    return float(sigma_level(frame, j, noise_inv, M)[eta])


@dataclass
class ThresholdedExpansion:
    """Surviving needlet coefficients plus the constant term 1/(4 pi)."""

    constant_term: float
    surviving: list  # of (j, eta, beta_hat)
    config: EstimatorConfig
    centers: list = field(default_factory=list)  # (theta, phi) per survivor

    def survival_counts(self, J=None):
        J = self.config.J if J is None else J
        counts = np.zeros(J + 1, dtype=int)
        for j, _, _ in self.surviving:
            counts[j] += 1
        return counts

    def coefficient_arrays(self, frame):
        out = [np.zeros(frame.n_atoms(j)) for j in range(frame.J + 1)]
        for j, eta, val in self.surviving:
            out[j][eta] = val
        return out

    def to_json_obj(self):
        entries = [
            {"j": int(j), "eta": int(eta), "theta": t, "phi": p, "beta": float(v)}
            for (j, eta, v), (t, p) in zip(self.surviving, self.centers)
        ]
        return {
            "config": self.config.to_json_obj(),
            "constant": self.constant_term,
            "surviving": entries,
        }

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_obj(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def threshold(frame, beta_hats, noise_inv, config, sigmas=None):
    """Hard thresholding: keep beta_hat when |beta_hat| >= kappa t_N sigma_{j,eta}."""
    if len(beta_hats) != config.J + 1:
        raise ValueError(f"expected {config.J + 1} coefficient levels")
    if sigmas is None:
        sigmas = [
            sigma_level(frame, j, noise_inv, config.M) for j in range(config.J + 1)
        ]
    cut = config.kappa * config.t_N
    surviving = []
    centers = []
    for j in range(config.J + 1):
        beta = np.asarray(beta_hats[j])
        keep = np.abs(beta) >= cut * sigmas[j]
        for eta in np.nonzero(keep)[0]:
            surviving.append((j, int(eta), float(beta[eta])))
            c = frame.center(j, int(eta))
            centers.append((c.theta, c.phi))
    return ThresholdedExpansion(1.0 / _FOUR_PI, surviving, config, centers)


def reconstruct(expansion, frame):
    """Density evaluator 1/(4 pi) + sum of surviving beta_hat * psi."""
    return frame.synthesize(
        expansion.coefficient_arrays(frame), expansion.constant_term
    )


def survival_counts(expansion, J=None):
    """Vector of survivor counts per level j = 0..J."""
    return expansion.survival_counts(J)


def svd_density_estimate(spectrum, L_trunc):
    """Baseline estimator: truncated harmonic synthesis (real part)."""
    if L_trunc > spectrum.max_degree:
        raise ValueError(
            f"truncation {L_trunc} exceeds spectrum degree {spectrum.max_degree}"
        )
    trunc = SphericalSpectrum.zeros(L_trunc)
    for l in range(L_trunc + 1):
        trunc.set_block(l, spectrum.block(l))

    def evaluator(theta, phi):
        vals = spectrum_synthesis(trunc, theta, phi)
        return vals.real if vals.ndim else float(vals.real)

    return evaluator
