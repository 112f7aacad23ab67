"""Spherical and rotational harmonics.

Conventions used throughout the package:

* ``Y_lm(theta, phi) = (-1)^m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_lm(cos theta) e^{i m phi}``
  for ``m >= 0``, where ``P_lm`` carries no Condon-Shortley phase (the explicit
  ``(-1)^m`` supplies it exactly once), and
  ``Y_{l,-m} = (-1)^m conj(Y_lm)``.
* The surface measure has total mass ``4 pi``; the ``Y_lm`` are orthonormal
  with respect to it.
* Rotational harmonics ``D^l_{mn}(phi, theta, psi) = e^{-i(m phi + n psi)} d^l_{mn}(theta)``
  for the z-y-z Euler decomposition, with the real generalized Legendre
  functions ``d^l_{mn}`` normalized so that ``d^l_{mn}(0) = delta_{mn}``.

Under these conventions ``Y_lm(g x) = sum_n conj(D^l_{mn}(g)) Y_ln(x)``, which
is what makes per-degree matrix products equal convolutions of densities.
"""

import math
from fractions import Fraction

import numpy as np

_FOUR_PI = 4.0 * np.pi


# ---------------------------------------------------------------------------
# associated Legendre functions
# ---------------------------------------------------------------------------

def assoc_legendre(l, m, x):
    """P_lm(x) without the Condon-Shortley phase, by upward recursion in l.

    Valid for 0 <= m <= l and |x| <= 1. Accepts scalar or array x.
    """
    if not 0 <= m <= l:
        raise ValueError(f"order must satisfy 0 <= m <= l, got m={m}, l={l}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    s = np.sqrt(1.0 - x * x)
    # P_mm = (2m-1)!! (1-x^2)^{m/2}; interleave the factors to limit dynamic range
    pmm = np.ones_like(x)
    for k in range(1, m + 1):
        pmm = pmm * (2 * k - 1) * s
    if l == m:
        return pmm if pmm.ndim else float(pmm)
    pm1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pm1 if pm1.ndim else float(pm1)
    for ll in range(m + 2, l + 1):
        pmm, pm1 = pm1, (x * (2 * ll - 1) * pm1 - (ll + m - 1) * pmm) / (ll - m)
    return pm1 if pm1.ndim else float(pm1)


def legendre_polynomial(l, x):
    """Legendre polynomial P_l(x) (the m = 0 case)."""
    return assoc_legendre(l, 0, x)


def legendre_kernel(l, t):
    """Reproducing kernel of the degree-l harmonic subspace.

    L_l(t) = (2l+1)/(4 pi) P_l(t); satisfies
    L_l(<x, y>) = sum_m Y_lm(x) conj(Y_lm(y)) and
    int_{-1}^{1} L_l L_k = delta_{lk} (2l+1)/(8 pi^2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    return (2 * l + 1) / _FOUR_PI * legendre_polynomial(l, t)


def _plm_rows(L, x):
    """Yield rows of fully normalized associated Legendre functions.

    Row l is the array of shape (l+1,) + x.shape holding
    sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_lm(x) for m = 0..l, computed by the
    standard normalized recursion (stable far beyond l = 128).
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(1.0 - x * x)
    prev = None
    cur = np.full((1,) + x.shape, 1.0 / np.sqrt(_FOUR_PI))
    yield cur
    for l in range(1, L + 1):
        nxt = np.empty((l + 1,) + x.shape)
        ms = np.arange(l - 1)
        if ms.size:
            a = np.sqrt((4 * l * l - 1.0) / (l * l - ms * ms))
            b = -np.sqrt(
                (2 * l + 1.0)
                * ((l - 1.0) ** 2 - ms * ms)
                / ((2 * l - 3.0) * (l * l - ms * ms))
            )
            nxt[: l - 1] = (
                a.reshape((-1,) + (1,) * x.ndim) * x * cur[: l - 1]
                + b.reshape((-1,) + (1,) * x.ndim) * prev
            )
        nxt[l - 1] = np.sqrt(2 * l + 1.0) * x * cur[l - 1]
        nxt[l] = np.sqrt((2 * l + 1.0) / (2 * l)) * s * cur[l - 1]
        prev, cur = cur, nxt
        yield cur


def iter_sph_harm_blocks(L, theta, phi):
    """Yield (l, block) with block[m + l] = Y_lm(theta, phi) for m = -l..l.

    Block shape is (2l+1,) + broadcast shape of theta/phi.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    x = np.cos(theta)
    expo = None
    for l, rows in enumerate(_plm_rows(L, x)):
        if expo is None or expo.shape[0] < l + 1:
            expo = np.exp(1j * np.arange(L + 1).reshape((-1,) + (1,) * phi.ndim) * phi)
        block = np.empty((2 * l + 1,) + np.broadcast(theta, phi).shape, dtype=complex)
        signs = (-1.0) ** np.arange(l + 1)
        pos = signs.reshape((-1,) + (1,) * x.ndim) * rows * expo[: l + 1]
        block[l:] = pos
        if l:
            back = signs.reshape((-1,) + (1,) * x.ndim) * np.conj(pos)
            block[:l] = back[:0:-1]
        yield l, block


def sph_harm_block(l, theta, phi):
    """All orders of degree l at once: array indexed by m + l."""
    for ll, block in iter_sph_harm_blocks(l, theta, phi):
        if ll == l:
            return block


def sph_harm(l, m, theta, phi):
    """Spherical harmonic Y_lm; theta/phi may be arrays."""
    if abs(m) > l:
        raise ValueError(f"order must satisfy |m| <= l, got m={m}, l={l}")
    block = sph_harm_block(l, theta, phi)[m + l]
    return complex(block) if block.ndim == 0 else block


# ---------------------------------------------------------------------------
# Wigner (generalized Legendre) functions
# ---------------------------------------------------------------------------

def wigner_d_element(l, m, n, beta):
    """d^l_{mn}(beta) by the explicit factorial sum (exact rational prefactors).

    Reference evaluation: O(l) terms, exact integer factorials. Used to seed
    and to cross-check the recursive evaluation.
    """
    if abs(m) > l or abs(n) > l:
        raise ValueError(f"orders must satisfy |m|,|n| <= l, got m={m}, n={n}, l={l}")
    ch = math.cos(beta / 2.0)
    sh = math.sin(beta / 2.0)
    nf = (
        math.factorial(l + n)
        * math.factorial(l - n)
        * math.factorial(l + m)
        * math.factorial(l - m)
    )
    total = 0.0
    for s in range(max(0, n - m), min(l + n, l - m) + 1):
        ds = (
            math.factorial(l + n - s)
            * math.factorial(s)
            * math.factorial(m - n + s)
            * math.factorial(l - m - s)
        )
        amp = math.sqrt(float(Fraction(nf, ds * ds)))
        sign = -1.0 if (m - n + s) % 2 else 1.0
        total += sign * amp * ch ** (2 * l + n - m - 2 * s) * sh ** (m - n + 2 * s)
    return total


def _d_border(l, ch, sh):
    """Border entries (|m| = l or |n| = l) of the degree-l d-matrix, closed form."""
    k = np.arange(2 * l + 1)
    root = np.sqrt(np.array([math.comb(2 * l, int(i)) for i in k], dtype=float))
    shape = (-1,) + (1,) * np.ndim(ch)
    root = root.reshape(shape)
    chk = ch ** k.reshape(shape)          # ch^{l+m} with k = m + l
    shk = sh ** k.reshape(shape)
    alt = (-1.0) ** k.reshape(shape)
    col_hi = root * chk * shk[::-1]                   # d^l_{m, l}
    col_lo = alt[::-1] * root * chk[::-1] * shk       # d^l_{m, -l}
    row_hi = alt[::-1] * root * chk * shk[::-1]       # d^l_{l, n}
    row_lo = root * chk[::-1] * shk                   # d^l_{-l, n}
    return col_lo, col_hi, row_lo, row_hi


def wigner_d_stack(L, beta):
    """All d^l(beta) for l = 0..L, by three-term recursion in l.

    beta may be a scalar or an array; returns a list whose l-th entry has
    shape beta.shape + (2l+1, 2l+1), rows indexed by m + l, columns by n + l.
    """
    beta = np.asarray(beta, dtype=float)
    cosb = np.cos(beta)
    ch = np.cos(beta / 2.0)
    sh = np.sin(beta / 2.0)
    out = [np.ones(beta.shape + (1, 1))]
    for l in range(1, L + 1):
        dl = np.empty(beta.shape + (2 * l + 1, 2 * l + 1))
        if l == 1:
            dl[..., 1, 1] = cosb  # the one entry neither seeded nor reachable by recursion
        else:
            ms = np.arange(-(l - 1), l, dtype=float)
            w_cur = np.sqrt(l * l - ms * ms)
            denom = (l - 1) * np.multiply.outer(w_cur, w_cur)
            w_prev = np.sqrt((l - 1.0) ** 2 - ms * ms)  # vanishes at |m| = l-1
            num2 = l * np.multiply.outer(w_prev, w_prev)
            mn = np.multiply.outer(ms, ms)
            num1 = (2 * l - 1) * ((l - 1) * l * cosb[..., None, None] - mn)
            prev2 = np.zeros(beta.shape + (2 * l - 1, 2 * l - 1))
            prev2[..., 1:-1, 1:-1] = out[l - 2]
            dl[..., 1:-1, 1:-1] = (num1 * out[l - 1] - num2 * prev2) / denom
        col_lo, col_hi, row_lo, row_hi = _d_border(l, ch, sh)
        mv = lambda a: np.moveaxis(a, 0, -1)  # noqa: E731  (m-axis last)
        dl[..., :, 0] = mv(col_lo)
        dl[..., :, -1] = mv(col_hi)
        dl[..., 0, :] = mv(row_lo)
        dl[..., -1, :] = mv(row_hi)
        out.append(dl)
    return out


def wigner_d_matrix(l, beta):
    """The (2l+1) x (2l+1) matrix d^l(beta)."""
    return wigner_d_stack(l, beta)[l]


def wigner_D(l, m, n, rotation):
    """Rotational harmonic D^l_{mn}(g) = e^{-i(m phi + n psi)} d^l_{mn}(theta)."""
    if abs(m) > l or abs(n) > l:
        raise ValueError(f"orders must satisfy |m|,|n| <= l, got m={m}, n={n}, l={l}")
    phase = np.exp(-1j * (m * rotation.phi + n * rotation.psi))
    return complex(phase * wigner_d_element(l, m, n, rotation.theta))


def wigner_D_matrix(l, rotation):
    """The full degree-l representation matrix [D^l_{mn}(g)]."""
    ms = np.arange(-l, l + 1)
    d = wigner_d_matrix(l, rotation.theta)
    return (
        np.exp(-1j * ms * rotation.phi)[:, None]
        * d
        * np.exp(-1j * ms * rotation.psi)[None, :]
    )


# ---------------------------------------------------------------------------
# spherical Fourier transform
# ---------------------------------------------------------------------------

class SphericalSpectrum:
    """Spherical Fourier coefficients f_hat^l_m for l = 0..L, -l <= m <= l.

    Stored as a dense (L+1, 2L+1) complex array with column index m + L.
    """

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 2 or coeffs.shape[1] != 2 * coeffs.shape[0] - 1:
            raise ValueError("expected shape (L+1, 2L+1)")
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, max_degree):
        return cls(np.zeros((max_degree + 1, 2 * max_degree + 1), dtype=complex))

    @property
    def max_degree(self):
        return self.coeffs.shape[0] - 1

    def _check(self, l, m):
        if not 0 <= l <= self.max_degree:
            raise ValueError(f"degree {l} outside [0, {self.max_degree}]")
        if abs(m) > l:
            raise ValueError(f"|m| <= l violated: m={m}, l={l}")

    def __getitem__(self, lm):
        l, m = lm
        self._check(l, m)
        return self.coeffs[l, m + self.max_degree]

    def __setitem__(self, lm, value):
        l, m = lm
        self._check(l, m)
        self.coeffs[l, m + self.max_degree] = value

    def block(self, l):
        """Coefficients of degree l as an array indexed by m + l."""
        L = self.max_degree
        return self.coeffs[l, L - l : L + l + 1]

    def set_block(self, l, values):
        L = self.max_degree
        self.coeffs[l, L - l : L + l + 1] = values

    def copy(self):
        return SphericalSpectrum(self.coeffs.copy())

    def reality_residual(self):
        """Max deviation from the real-function symmetry c(l,-m) = (-1)^m conj(c(l,m))."""
        worst = 0.0
        for l in range(self.max_degree + 1):
            b = self.block(l)
            signs = (-1.0) ** np.arange(-l, l + 1)
            worst = max(worst, float(np.max(np.abs(b[::-1] - signs * np.conj(b)))))
        return worst

    def symmetrized(self):
        """Project onto the real-function symmetry (average with its mirror)."""
        out = self.copy()
        for l in range(self.max_degree + 1):
            b = self.block(l)
            signs = (-1.0) ** np.arange(-l, l + 1)
            out.set_block(l, 0.5 * (b + signs * np.conj(b[::-1])))
        return out


def spherical_transform(values, grid, max_degree):
    """Spectrum of a function sampled on an exact cubature grid.

    f_hat^l_m = sum_k w_k f(x_k) conj(Y_lm(x_k)); exact when the grid
    integrates spherical polynomials of degree 2 * max_degree.
    """
    exact = getattr(grid, "exact_degree", None)
    if exact is None or exact < 2 * max_degree:
        raise ValueError(
            f"grid exactness degree {exact} insufficient for max_degree={max_degree}"
        )
    values = np.asarray(values, dtype=float)
    wf = grid.weights * values
    spec = SphericalSpectrum.zeros(max_degree)
    for l, block in iter_sph_harm_blocks(max_degree, grid.thetas, grid.phis):
        spec.set_block(l, np.conj(block) @ wf)
    return spec


def spectrum_synthesis(spectrum, theta, phi):
    """Pointwise sum sum_{lm} f_hat^l_m Y_lm(theta, phi); complex output."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    out = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    for l, block in iter_sph_harm_blocks(spectrum.max_degree, theta, phi):
        out += np.tensordot(spectrum.block(l), block, axes=(0, 0))
    return out
