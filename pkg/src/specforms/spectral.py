"""Fourier grid, DFT, periodogram, and exact finite-n DFT cross-covariances.

Conventions: u_j = 2 pi j / n for j = 0..floor(n/2), the DFT is
w_j = (2 pi n)^(-1/2) sum_{k=1}^{n} e^{+i u_j k} X_k, and the periodogram is
I_j = |w_j|^2. Weighted sums downstream run over j = 1..nu with
nu = floor(n/2) - 1 unless the Nyquist ordinate is explicitly included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz as _toeplitz
from scipy.signal import fftconvolve

from .errors import DomainError

TWO_PI = 2.0 * np.pi

#: Above this n the cross-covariance uses the lag-sum path instead of the
#: dense double sum.
_DENSE_CROSS_COV_MAX = 512


def nu_for(n: int, include_nyquist: bool = False) -> int:
    """Summation limit: floor(n/2) - 1, or floor(n/2) when opted in."""
    return n // 2 if include_nyquist else n // 2 - 1


@dataclass(frozen=True)
class FourierGrid:
    n: int
    nu: int
    frequencies: np.ndarray  # u_j for j = 0..floor(n/2)


def fourier_grid(n: int) -> FourierGrid:
    """Fourier frequencies u_j = 2 pi j / n for j = 0..floor(n/2)."""
    if n < 8:
        raise DomainError("n must be >= 8")
    j = np.arange(n // 2 + 1)
    return FourierGrid(n=int(n), nu=n // 2 - 1, frequencies=TWO_PI * j / n)


@dataclass(frozen=True)
class DftVector:
    coefficients: np.ndarray  # w_j, j = 0..floor(n/2)
    source_n: int


@dataclass(frozen=True)
class Periodogram:
    ordinates: np.ndarray  # I_j, j = 0..floor(n/2)
    source_n: int


def dft(series: np.ndarray) -> DftVector:
    """Normalized DFT at the nonnegative Fourier frequencies, O(n log n)."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 8:
        raise DomainError("series must have length >= 8")
    # sum_{k=1}^{n} e^{+i u_j k} x_k = e^{i u_j} * conj(fft(x))_j for real x
    u = TWO_PI * np.arange(n // 2 + 1) / n
    w = np.exp(1j * u) * np.conj(np.fft.rfft(x)) / np.sqrt(TWO_PI * n)
    return DftVector(coefficients=w, source_n=n)


def periodogram(series: np.ndarray) -> Periodogram:
    """I_j = |w_j|^2 for j = 0..floor(n/2)."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 8:
        raise DomainError("series must have length >= 8")
    f = np.fft.rfft(x)
    ordinates = (f.real**2 + f.imag**2) / (TWO_PI * n)
    return Periodogram(ordinates=ordinates, source_n=n)


def full_grid_sum(pgram: Periodogram) -> float:
    """sum_{j=1}^{n} I(u_j), reconstructed from the stored half grid."""
    n = pgram.source_n
    ords = pgram.ordinates
    if n % 2 == 0:
        # j = 1..n splits into j=n (= j=0 ordinate), Nyquist, and mirrored pairs
        return float(ords[0] + ords[n // 2] + 2.0 * np.sum(ords[1:n // 2]))
    return float(ords[0] + 2.0 * np.sum(ords[1:]))


def cross_covariance_lags(coeffs_x: np.ndarray, coeffs_y: np.ndarray,
                          maxlag: int) -> np.ndarray:
    """gamma_xy(m) = sum_l a_{l+m} b_l for m = -maxlag..maxlag (index m+maxlag)."""
    a = np.asarray(coeffs_x, dtype=float)
    b = np.asarray(coeffs_y, dtype=float)
    full = fftconvolve(a, b[::-1])
    center = b.size - 1
    out = np.zeros(2 * maxlag + 1)
    lo, hi = center - maxlag, center + maxlag
    lo_c, hi_c = max(lo, 0), min(hi, full.size - 1)
    if lo_c <= hi_c:
        out[lo_c - lo: hi_c - lo + 1] = full[lo_c:hi_c + 1]
    return out


def _cross_cov_dense(gamma: np.ndarray, n: int, j: int, k: int) -> complex:
    # reference O(n^2) double sum over the full covariance matrix
    col = gamma[n - 1:]          # gamma(0), gamma(1), ..., gamma(n-1)
    row = gamma[n - 1::-1]       # gamma(0), gamma(-1), ..., gamma(-(n-1))
    G = _toeplitz(col, row)
    t = np.arange(1, n + 1)
    ej = np.exp(1j * TWO_PI * j / n * t)
    ek = np.exp(-1j * TWO_PI * k / n * t)
    return complex(ej @ G @ ek / (TWO_PI * n))


def _cross_cov_lagsum(gamma: np.ndarray, n: int, j: int, k: int) -> complex:
    # sum over lags m with the geometric inner sum in closed form
    m = np.arange(-(n - 1), n)
    uj = TWO_PI * j / n
    if j == k:
        val = np.dot((n - np.abs(m)) * gamma, np.exp(1j * uj * m))
        return complex(val / (TWO_PI * n))
    delta = TWO_PI * (j - k) / n
    s0 = np.where(m >= 0, 1, 1 - m)
    length = n - np.abs(m)
    ratio = np.exp(1j * delta)
    inner = np.exp(1j * delta * s0) * (np.exp(1j * delta * length) - 1.0) / (ratio - 1.0)
    val = np.dot(gamma * np.exp(1j * uj * m), inner)
    return complex(val / (TWO_PI * n))


def exact_dft_cross_cov(coeffs_x: np.ndarray, coeffs_y: np.ndarray, n: int,
                        j: int, k: int) -> complex:
    """Exact E[w_{X,j} conj(w_{Y,k})] for two finite-MA processes sharing noise.

    Equals (2 pi n)^(-1) sum_{t,s=1}^{n} e^{i(u_j t - u_k s)} gamma_xy(t-s)
    with gamma_xy(m) = sum_l a_{l+m} b_l. The dense double sum is used up to
    n = 512 and a lag-sum reduction beyond that.
    """
    if not (0 <= j <= n // 2 and 0 <= k <= n // 2):
        raise DomainError("indices must lie in 0..floor(n/2)")
    gamma = cross_covariance_lags(coeffs_x, coeffs_y, n - 1)
    if n <= _DENSE_CROSS_COV_MAX:
        return _cross_cov_dense(gamma, n, j, k)
    return _cross_cov_lagsum(gamma, n, j, k)


def exact_dft_second_moment(coeffs: np.ndarray, n: int, j: int) -> float:
    """Exact E|w_{X,j}|^2 (real part of the diagonal cross-covariance)."""
    return exact_dft_cross_cov(coeffs, coeffs, n, j, j).real
