import numpy as np
import pytest

from sphdecon.cubature import gauss_product_grid
from sphdecon.estimator import (
    EstimatorConfig,
    j_max,
    needlet_coeff_estimates,
    reconstruct,
    select_J,
    sigma,
    sigma_level,
    svd_coeffs,
    svd_density_estimate,
    survival_counts,
    threshold,
)
from sphdecon.harmonics import (
    SphericalSpectrum,
    iter_sph_harm_blocks,
    sph_harm_block,
    spherical_transform,
)
from sphdecon.needlet import NeedletFrame
from sphdecon.noise import ZAxisUniform, inverse_blocks, spectrum
from sphdecon.simulate import GaussianBump, Uniform, apply_noise, sample_density

rng = np.random.default_rng(31)


def identity_inverse(L):
    return [np.eye(2 * l + 1, dtype=complex) for l in range(L + 1)]


# ---------------------------------------------------------------------------
# level selection and config
# ---------------------------------------------------------------------------

def test_select_J_paper_value():
    assert select_J(1500) == 3


def test_select_J_small_sample():
    assert select_J(12) == 0


def test_select_J_large_sample():
    assert select_J(10 ** 6) == 8


def test_config_tn_and_validation():
    cfg = EstimatorConfig(N=1500, J=3, kappa=0.38, M=1.0)
    assert abs(cfg.t_N - np.sqrt(np.log(1500) / 1500)) < 1e-14
    assert j_max(1500) == 3
    with pytest.raises(ValueError):
        EstimatorConfig(N=1500, J=4, kappa=0.1, M=1.0)
    with pytest.raises(ValueError):
        EstimatorConfig(N=1500, J=3, kappa=0.1, M=0.0)


# ---------------------------------------------------------------------------
# SVD coefficients
# ---------------------------------------------------------------------------

def test_svd_constant_mode_exact():
    th = rng.uniform(0, np.pi, 50)
    ph = rng.uniform(0, 2 * np.pi, 50)
    spec = svd_coeffs(th, ph, identity_inverse(2), 2)
    assert abs(spec[0, 0] - 1.0 / np.sqrt(4 * np.pi)) < 1e-13


def test_svd_empty_sample():
    with pytest.raises(ValueError):
        svd_coeffs(np.array([]), np.array([]), identity_inverse(1), 1)


def test_svd_noiseless_bump_matches_exact_spectrum():
    bump = GaussianBump()
    th, ph = sample_density(bump, 100000, np.random.default_rng(12))
    spec = svd_coeffs(th, ph, identity_inverse(2), 2)
    g = gauss_product_grid(24)
    exact = spherical_transform(bump.density(g.thetas, g.phis), g, 24)
    # Monte Carlo standard errors, estimated from the sample
    for m in range(-2, 3):
        y = np.conj(sph_harm_block(2, th, ph)[m + 2])
        se = np.std(y) / np.sqrt(th.size)
        assert abs(spec[2, m] - exact[2, m]) < 3 * se + 1e-12


def test_svd_excluded_degrees_zeroed():
    th = rng.uniform(0, np.pi, 100)
    ph = rng.uniform(0, 2 * np.pi, 100)
    inv = identity_inverse(3)
    inv[2] = None
    spec = svd_coeffs(th, ph, inv, 3)
    assert np.max(np.abs(spec.block(2))) == 0.0
    assert np.max(np.abs(spec.block(1))) > 0.0


# ---------------------------------------------------------------------------
# needlet coefficient estimates
# ---------------------------------------------------------------------------

def brute_force_beta(frame, j, eta, thetas, phis, noise_inv):
    """The simulation-protocol display, as an explicit quadruple sum."""
    lam = frame.weight(j, eta)
    c = frame.center(j, eta)
    total = 0.0 + 0.0j
    N = thetas.size
    for bl, l in zip(frame.band_windows[j], frame.bands[j]):
        y_center = sph_harm_block(l, c.theta, c.phi)
        y_obs = sph_harm_block(l, thetas, phis)
        inv = noise_inv[l]
        for mi, m in enumerate(range(-l, l + 1)):
            inner = 0.0 + 0.0j
            for ni, n in enumerate(range(-l, l + 1)):
                inner += inv[mi, ni] * np.sum(np.conj(y_obs[ni]))
            total += bl * y_center[mi] * inner / N
    return np.sqrt(lam) * total


def test_beta_factorization_matches_display_formula():
    frame = NeedletFrame(1)
    model = ZAxisUniform(np.pi / 8)
    r = np.random.default_rng(3)
    th, ph = sample_density(Uniform(), 200, r)
    inv, _ = inverse_blocks(spectrum(model, 4), 4)
    beta = needlet_coeff_estimates(frame, th, ph, inv)
    for j, eta in [(0, 2), (1, 11), (1, 40)]:
        direct = brute_force_beta(frame, j, eta, th, ph, inv)
        assert abs(direct.imag) < 1e-9
        assert abs(beta[j][eta] - direct.real) < 1e-12


def test_beta_uniform_noiseless_scale():
    # for the uniform target every beta is a mean of iid zero-mean terms
    frame = NeedletFrame(2)
    th, ph = sample_density(Uniform(), 4000, np.random.default_rng(17))
    beta = needlet_coeff_estimates(frame, th, ph, identity_inverse(8))
    sig = sigma_level(frame, 2, identity_inverse(8), 1.0)
    # Var(beta) = sigma^2 / (4 pi N) for M = 1 under the uniform density
    sd = sig / np.sqrt(4 * np.pi * th.size)
    assert np.mean(np.abs(beta[2]) <= 5 * sd) > 0.99


def test_beta_bump_matches_frame_analysis():
    bump = GaussianBump()
    th, ph = sample_density(bump, 100000, np.random.default_rng(23))
    frame = NeedletFrame(2)
    beta = needlet_coeff_estimates(frame, th, ph, identity_inverse(8))
    g = gauss_product_grid(24)
    spec = spherical_transform(bump.density(g.thetas, g.phis), g, 24)
    spec8 = SphericalSpectrum.zeros(8)
    for l in range(9):
        spec8.set_block(l, spec.block(l))
    truth = frame.analyze(spec8)
    sig = sigma_level(frame, 2, identity_inverse(8), bump.sup_norm)
    sd = sig / np.sqrt(th.size)  # conservative: Var G <= M ||psi||^2-ish scale
    assert np.mean(np.abs(beta[2] - truth[2]) <= 3 * sd) > 0.9


def test_pooled_sample_linearity():
    frame = NeedletFrame(1)
    r = np.random.default_rng(29)
    th1, ph1 = sample_density(Uniform(), 300, r)
    th2, ph2 = sample_density(Uniform(), 700, r)
    inv = identity_inverse(4)
    b1 = needlet_coeff_estimates(frame, th1, ph1, inv)
    b2 = needlet_coeff_estimates(frame, th2, ph2, inv)
    bp = needlet_coeff_estimates(
        frame, np.concatenate([th1, th2]), np.concatenate([ph1, ph2]), inv
    )
    for j in range(2):
        pooled = (300 * b1[j] + 700 * b2[j]) / 1000
        assert np.max(np.abs(bp[j] - pooled)) < 1e-12


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------

def test_sigma_identity_noise_is_parseval_norm():
    frame = NeedletFrame(2)
    inv = identity_inverse(8)
    for j, eta in [(0, 0), (1, 7), (2, 100)]:
        got = sigma(frame, j, eta, inv, 2.5)
        want = 2.5 * frame.atom_norm2_harmonic(j, eta)
        assert abs(got - want) < 1e-12


def test_sigma_linear_in_M():
    frame = NeedletFrame(1)
    inv, _ = inverse_blocks(spectrum(ZAxisUniform(0.3), 4), 4)
    s1 = sigma(frame, 1, 3, inv, 1.0)
    s2 = sigma(frame, 1, 3, inv, 2.0)
    assert abs(s2 - 2.0 * s1) < 1e-14


def test_sigma_level_ratio_laplace():
    from sphdecon.noise import RotationalLaplace

    frame = NeedletFrame(5)
    inv, _ = inverse_blocks(spectrum(RotationalLaplace(1.0), 64), 64)
    s2 = sigma(frame, 2, 0, inv, 1.0)
    s4 = sigma(frame, 4, 0, inv, 1.0)
    assert 1.3 <= 0.5 * np.log2(s4 / s2) <= 2.7


def test_sigma_missing_degree():
    frame = NeedletFrame(1)
    inv = identity_inverse(4)
    inv[3] = None
    with pytest.raises(IndexError):
        sigma(frame, 1, 0, inv, 1.0)


# ---------------------------------------------------------------------------
# thresholding and reconstruction
# ---------------------------------------------------------------------------

def make_estimate(N=400, seed=7, J=2, kappa=0.3, M=1.0, a=np.pi / 8):
    frame = NeedletFrame(J)
    r = np.random.default_rng(seed)
    th, ph = sample_density(Uniform(), N, r)
    model = ZAxisUniform(a)
    zth, zph, eps = apply_noise(th, ph, model, r)
    L = 2 ** (J + 1)
    inv, _ = inverse_blocks(spectrum(model, L), L)
    beta = needlet_coeff_estimates(frame, zth, zph, inv)
    cfg = EstimatorConfig(N=N, J=J, kappa=kappa, M=M)
    return frame, beta, inv, cfg


def test_threshold_kappa_zero_keeps_all():
    frame, beta, inv, cfg = make_estimate(kappa=0.0)
    exp = threshold(frame, beta, inv, cfg)
    assert len(exp.surviving) == sum(frame.n_atoms(j) for j in range(cfg.J + 1))


def test_threshold_kappa_huge_kills_all():
    frame, beta, inv, cfg = make_estimate(kappa=1e9)
    exp = threshold(frame, beta, inv, cfg)
    assert exp.surviving == []
    ev = reconstruct(exp, frame)
    th = rng.uniform(0, np.pi, 10)
    ph = rng.uniform(0, 2 * np.pi, 10)
    assert np.max(np.abs(ev(th, ph) - 1.0 / (4 * np.pi))) < 1e-16


def test_threshold_keep_rule_and_nesting():
    frame, beta, inv, cfg = make_estimate(kappa=0.15)
    sigmas = [sigma_level(frame, j, inv, cfg.M) for j in range(cfg.J + 1)]
    exp = threshold(frame, beta, inv, cfg, sigmas=sigmas)
    for j, eta, val in exp.surviving:
        assert abs(val) >= cfg.kappa * cfg.t_N * sigmas[j][eta]
    # nesting: survivors at larger kappa are a subset
    cfg2 = EstimatorConfig(N=cfg.N, J=cfg.J, kappa=0.3, M=cfg.M)
    exp2 = threshold(frame, beta, inv, cfg2, sigmas=sigmas)
    keys1 = {(j, e) for j, e, _ in exp.surviving}
    keys2 = {(j, e) for j, e, _ in exp2.surviving}
    assert keys2 <= keys1


def test_threshold_idempotent():
    frame, beta, inv, cfg = make_estimate(kappa=0.2)
    exp1 = threshold(frame, beta, inv, cfg)
    dense = exp1.coefficient_arrays(frame)
    exp2 = threshold(frame, dense, inv, cfg)
    assert {(j, e) for j, e, _ in exp1.surviving} == {
        (j, e) for j, e, _ in exp2.surviving
    }


def test_reconstruct_single_survivor_linearity():
    frame, beta, inv, cfg = make_estimate()
    from sphdecon.estimator import ThresholdedExpansion

    c = frame.center(1, 5)
    exp = ThresholdedExpansion(1.0 / (4 * np.pi), [(1, 5, 0.37)], cfg, [(c.theta, c.phi)])
    ev = reconstruct(exp, frame)
    th = rng.uniform(0, np.pi, 10)
    ph = rng.uniform(0, 2 * np.pi, 10)
    want = 1.0 / (4 * np.pi) + 0.37 * frame.atom_eval(1, 5, th, ph)
    assert np.max(np.abs(ev(th, ph) - want)) < 1e-13


def test_survival_counts():
    frame, beta, inv, cfg = make_estimate(kappa=1e9)
    exp = threshold(frame, beta, inv, cfg)
    assert list(survival_counts(exp, J=3)) == [0, 0, 0, 0]
    exp.surviving = [(0, 1, 0.5), (2, 3, -0.2), (2, 7, 0.1)]
    assert list(survival_counts(exp)) == [1, 0, 2]


def test_survival_counts_monotone_in_kappa():
    frame, beta, inv, cfg = make_estimate(kappa=0.0)
    sigmas = [sigma_level(frame, j, inv, cfg.M) for j in range(cfg.J + 1)]
    prev = None
    for k in [0.05, 0.1, 0.2, 0.4, 0.8]:
        c = EstimatorConfig(N=cfg.N, J=cfg.J, kappa=k, M=cfg.M)
        counts = threshold(frame, beta, inv, c, sigmas=sigmas).survival_counts()
        if prev is not None:
            assert np.all(counts <= prev)
        prev = counts


# ---------------------------------------------------------------------------
# truncated SVD baseline
# ---------------------------------------------------------------------------

def test_svd_density_uniform():
    spec = SphericalSpectrum.zeros(4)
    spec[0, 0] = 1.0 / np.sqrt(4 * np.pi)
    ev = svd_density_estimate(spec, 2)
    assert abs(ev(1.1, 2.2) - 1.0 / (4 * np.pi)) < 1e-15


def test_svd_density_bump_truncation():
    bump = GaussianBump()
    g = gauss_product_grid(24)
    spec = spherical_transform(bump.density(g.thetas, g.phis), g, 24)
    ev = svd_density_estimate(spec, 16)
    th = rng.uniform(0, np.pi, 300)
    ph = rng.uniform(0, 2 * np.pi, 300)
    assert np.max(np.abs(ev(th, ph) - bump.density(th, ph))) <= 1e-3


def test_svd_density_real_output():
    g = gauss_product_grid(8)
    vals = np.exp(np.cos(g.thetas)) * (1 + 0.1 * np.cos(g.phis) * np.sin(g.thetas))
    spec = spherical_transform(vals, g, 8)
    ev = svd_density_estimate(spec, 8)
    out = ev(rng.uniform(0, np.pi, 5), rng.uniform(0, 2 * np.pi, 5))
    assert np.isrealobj(out)


def test_svd_density_validation():
    spec = SphericalSpectrum.zeros(4)
    with pytest.raises(ValueError):
        svd_density_estimate(spec, 5)
