"""Analytic population discrepancies between Gaussians under the Gaussian kernel.

These are the exact values the Gram-matrix estimators converge to, used as
independent oracles in tests and for power analysis.  The public closed forms
fix the reference distribution P = N(0, I_d) and take Q = N(mean, cov); fully
general pairs of Gaussians are reachable through the inner-product helpers at
the bottom of the module.

All determinants of the form |I + a*Sigma| and |I + a*Sigma + b*Sigma^2| are
evaluated as products over the eigenvalues of Sigma, so each closed form costs
one symmetric eigendecomposition.
"""

import math
from dataclasses import dataclass

import numpy as np


def _check_sigma(sigma):
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be a positive finite real, got {sigma!r}")


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """A d-variate normal N(mean, cov) with symmetric positive-definite cov."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        if mean.ndim != 1:
            raise ValueError(f"mean must be a vector, got ndim={mean.ndim}")
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(cov).max()))):
            raise ValueError("cov is not symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0.0:
            raise ValueError("cov is not positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)

    @property
    def dim(self):
        return self.mean.size

    @classmethod
    def standard(cls, d):
        """N(0, I_d)."""
        return cls(np.zeros(d), np.eye(d))

    @classmethod
    def isotropic(cls, t, s, d):
        """N(t * ones, s * I_d)."""
        return cls(np.full(d, float(t)), float(s) * np.eye(d))


def _spectrum(q):
    """Eigenvalues e of cov and the mean rotated into the eigenbasis."""
    e, u = np.linalg.eigh(q.cov)
    return e, u.T @ q.mean


def mmd_sq_gaussian(q, sigma, c=0.0):
    """Squared mean-embedding distance between N(0, I_d) and q.

    Equals e^c * [ (1+4s)^{-d/2} + |I+4sS|^{-1/2}
                   - 2 |(1+2s)I + 2sS|^{-1/2} e^{-s m' ((1+2s)I+2sS)^{-1} m} ]
    with s = sigma, S = q.cov, m = q.mean.  Clamped to 0 against round-off.
    """
    _check_sigma(sigma)
    d = q.dim
    e, w = _spectrum(q)
    term_p = (1.0 + 4.0 * sigma) ** (-d / 2.0)
    term_q = float(np.prod(1.0 + 4.0 * sigma * e) ** -0.5)
    cross_den = 1.0 + 2.0 * sigma + 2.0 * sigma * e
    cross = float(np.prod(cross_den) ** -0.5) * math.exp(-sigma * float(np.sum(w**2 / cross_den)))
    return math.exp(c) * max(term_p + term_q - 2.0 * cross, 0.0)


def mvd_sq_gaussian(q, sigma, c=0.0):
    """Squared covariance-operator distance between N(0, I_d) and q.

    Assembled as  A + B - 2 (I1 - I2 - I3 + I4)  where A and B are the
    squared norms of the two covariance operators and the I-terms expand
    their inner product; every piece is a product over the eigenvalues e of
    q.cov with the mean rotated into the eigenbasis.  Scales as e^{2c}.
    """
    _check_sigma(sigma)
    d = q.dim
    e, w = _spectrum(q)
    s = sigma
    w2 = w**2

    a_term = (
        (1.0 + 8.0 * s) ** (-d / 2.0)
        - 2.0 * (1.0 + 8.0 * s + 12.0 * s**2) ** (-d / 2.0)
        + (1.0 + 4.0 * s) ** (-d)
    )
    b_term = float(
        np.prod(1.0 + 8.0 * s * e) ** -0.5
        - 2.0 * np.prod(1.0 + 8.0 * s * e + 12.0 * s**2 * e**2) ** -0.5
        + np.prod(1.0 + 4.0 * s * e) ** -1.0
    )

    den1 = 1.0 + 4.0 * s + 4.0 * s * e
    i1 = float(np.prod(den1) ** -0.5) * math.exp(-2.0 * s * float(np.sum(w2 / den1)))

    den2 = 1.0 + 2.0 * s + 4.0 * s * e
    i2 = (
        (1.0 + 2.0 * s) ** (-d / 2.0)
        * float(np.prod(den2) ** -0.5)
        * math.exp(-2.0 * s * float(np.sum(w2 / den2)))
    )

    den3 = 1.0 + 4.0 * s + 2.0 * s * e
    i3 = (
        float(np.prod(1.0 + 2.0 * s * e) ** -0.5)
        * float(np.prod(den3) ** -0.5)
        * math.exp(-2.0 * s * float(np.sum(w2 / den3)))
    )

    den4 = 1.0 + 2.0 * s + 2.0 * s * e
    i4 = float(np.prod(den4) ** -1.0) * math.exp(-2.0 * s * float(np.sum(w2 / den4)))

    value = a_term + b_term - 2.0 * (i1 - i2 - i3 + i4)
    return math.exp(2.0 * c) * max(value, 0.0)


def mmd_sq_isotropic(t, s, d, sigma, c=0.0):
    """mmd_sq_gaussian specialized to q = N(t * ones, s * I_d), in closed form."""
    _check_sigma(sigma)
    if s <= 0:
        raise ValueError(f"variance scale s must be > 0, got {s!r}")
    g = sigma
    cross_den = 1.0 + 2.0 * g + 2.0 * g * s
    value = (
        (1.0 + 4.0 * g) ** (-d / 2.0)
        + (1.0 + 4.0 * g * s) ** (-d / 2.0)
        - 2.0 * cross_den ** (-d / 2.0) * math.exp(-g * t**2 * d / cross_den)
    )
    return math.exp(c) * max(value, 0.0)


def mvd_sq_isotropic(t, s, d, sigma, c=0.0):
    """mvd_sq_gaussian specialized to q = N(t * ones, s * I_d), in closed form."""
    _check_sigma(sigma)
    if s <= 0:
        raise ValueError(f"variance scale s must be > 0, got {s!r}")
    g = sigma
    den1 = 1.0 + 4.0 * g + 4.0 * g * s
    den2 = 1.0 + 2.0 * g + 4.0 * g * s
    den3 = 1.0 + 4.0 * g + 2.0 * g * s
    den4 = 1.0 + 2.0 * g + 2.0 * g * s
    value = (
        (1.0 + 8.0 * g) ** (-d / 2.0)
        - 2.0 * (1.0 + 8.0 * g + 12.0 * g**2) ** (-d / 2.0)
        + (1.0 + 4.0 * g) ** (-d)
        + (1.0 + 8.0 * g * s) ** (-d / 2.0)
        - 2.0 * (1.0 + 8.0 * g * s + 12.0 * g**2 * s**2) ** (-d / 2.0)
        + (1.0 + 4.0 * g * s) ** (-d)
        - 2.0 * den1 ** (-d / 2.0) * math.exp(-2.0 * g * t**2 * d / den1)
        + 2.0 * ((1.0 + 2.0 * g) * den2) ** (-d / 2.0) * math.exp(-2.0 * g * t**2 * d / den2)
        + 2.0 * ((1.0 + 2.0 * g * s) * den3) ** (-d / 2.0) * math.exp(-2.0 * g * t**2 * d / den3)
        - 2.0 * den4 ** (-d) * math.exp(-2.0 * g * t**2 * d / den4)
    )
    return math.exp(2.0 * c) * max(value, 0.0)


def mvd_mmd_curves(t_grid, s_grid, d, sigma, c=0.0):
    """Tabulate both closed forms over a (t, s) grid.

    Returns an array with one row per grid point, columns (t, s, mmd_sq,
    mvd_sq), t varying slowest.  Useful for plotting how the two
    discrepancies order as the kernel scale c changes.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    s_grid = np.atleast_1d(np.asarray(s_grid, dtype=float))
    if not (np.isfinite(t_grid).all() and np.isfinite(s_grid).all()):
        raise ValueError("grids must be finite")
    rows = np.empty((t_grid.size * s_grid.size, 4))
    i = 0
    for t in t_grid:
        for s in s_grid:
            rows[i] = (t, s, mmd_sq_isotropic(t, s, d, sigma, c), mvd_sq_isotropic(t, s, d, sigma, c))
            i += 1
    return rows


def mean_embedding_norm_sq(q, sigma):
    """||mu_k(q)||^2 = |I + 4 sigma cov|^{-1/2} for a Gaussian q."""
    _check_sigma(sigma)
    e = np.linalg.eigvalsh(q.cov)
    return float(np.prod(1.0 + 4.0 * sigma * e) ** -0.5)


def mean_embedding_inner(p, q, sigma):
    """<mu_k(p), mu_k(q)> for two Gaussians under the Gaussian kernel.

    Equals |M|^{-1/2} exp(-sigma delta' M^{-1} delta) with
    M = I + 2 sigma (cov_p + cov_q) and delta = mean_p - mean_q.
    """
    _check_sigma(sigma)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    m_mat = np.eye(p.dim) + 2.0 * sigma * (p.cov + q.cov)
    delta = p.mean - q.mean
    _, logdet = np.linalg.slogdet(m_mat)
    quad = float(delta @ np.linalg.solve(m_mat, delta))
    return math.exp(-0.5 * logdet - sigma * quad)


def _one_two_term(p, q, sigma):
    """E[k(X, Y) k(X, Y')] with one draw X ~ p and two independent Y, Y' ~ q.

    Integrating Y and Y' first gives the squared conditional mean embedding;
    integrating X then yields
    |I + 2sC_q|^{-1/2} |I + 2sC_q + 4sC_p|^{-1/2}
        * exp(-2s delta' (I + 2sC_q + 4sC_p)^{-1} delta).
    """
    d = p.dim
    a = np.eye(d) + 2.0 * sigma * q.cov
    b = a + 4.0 * sigma * p.cov
    delta = p.mean - q.mean
    _, logdet_a = np.linalg.slogdet(a)
    _, logdet_b = np.linalg.slogdet(b)
    quad = float(delta @ np.linalg.solve(b, delta))
    return math.exp(-0.5 * (logdet_a + logdet_b) - 2.0 * sigma * quad)


def cov_operator_inner(p, q, sigma):
    """<Sigma_k(p), Sigma_k(q)> (Hilbert-Schmidt) for two Gaussians.

    Expands as I1 - I2 - I3 + I4: the second-moment term E[k(X,Y)^2] (a mean
    embedding inner product at bandwidth 2 sigma), the two mixed terms with a
    repeated draw on one side, and the squared mean-embedding inner product.
    """
    _check_sigma(sigma)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    i1 = mean_embedding_inner(p, q, 2.0 * sigma)
    i2 = _one_two_term(p, q, sigma)
    i3 = _one_two_term(q, p, sigma)
    i4 = mean_embedding_inner(p, q, sigma) ** 2
    return i1 - i2 - i3 + i4


def cov_operator_norm_sq(p, sigma):
    """||Sigma_k(p)||^2 (Hilbert-Schmidt) for a Gaussian p."""
    return cov_operator_inner(p, p, sigma)
