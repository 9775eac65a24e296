"""Weight schemes, periodogram quadratic forms, and their exact constants.

The statistics: S_X = sum_j b_j I_{X,j} / f_j (rescaled-periodogram sum),
S_zeta = sum_j b_j 2 pi I_{zeta,j} (its noise approximation), the Bartlett
residual R = S_X - S_zeta, and the plain sums Q_X = sum_j b_j I_{X,j},
Q_zeta = sum_j b_j f_j 2 pi I_{zeta,j}. All index sums run j = 1..len(b).

Deterministic constants: b_n = max|b_j|, B_n^2 = sum b_j^2,
q_n^2 = B_n^2 + Cum4 (sum b_j)^2 / n, and the f-weighted analogues
b_fn, B_fn, v_n^2 built from b_j f_j. S_zeta has mean sum b_j and variance
q_n^2 exactly for every n.

Accumulations over j and t use exact summation (math.fsum), so results do
not depend on chunking or worker count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.special import zeta as _hurwitz_zeta

from .errors import (DegenerateWeights, DomainError, MissingInnovations,
                     NoConvergence)
from .models import InnovationSpec, SamplePath
from .spectral import Periodogram, nu_for, periodogram

TWO_PI = 2.0 * np.pi

#: Toeplitz symbol c(t) is computed by direct summation up to this n and by
#: FFT beyond it.
_DIRECT_SYMBOL_MAX = 512


def exact_sum(values) -> float:
    """Order-independent exact float sum."""
    return math.fsum(values)


class WeightKind(str, enum.Enum):
    UNIFORM = "uniform"
    INDICATOR = "indicator"
    COSINE = "cosine"
    KERNEL_AT = "kernel_at"
    LOCAL_WHITTLE = "local_whittle"
    COUNTEREXAMPLE = "counterexample"
    CUSTOM = "custom"


@dataclass(frozen=True)
class WeightScheme:
    """Rule producing the triangular weight array b_1..b_nu for any n."""

    kind: WeightKind
    y: float | None = None            # indicator threshold frequency
    lag: int | None = None            # cosine lag
    u0: float | None = None           # kernel center
    bandwidth: float | None = None    # kernel bandwidth; default n^(-1/5)
    m: int | None = None              # local Whittle bandwidth
    d: float | None = None            # counterexample memory parameter
    values: tuple[float, ...] | None = None  # custom weights
    description: str = ""

    @classmethod
    def uniform(cls) -> "WeightScheme":
        return cls(WeightKind.UNIFORM, description="uniform")

    @classmethod
    def indicator(cls, y: float) -> "WeightScheme":
        if not 0.0 < y <= np.pi:
            raise DomainError("indicator threshold must lie in (0, pi]")
        return cls(WeightKind.INDICATOR, y=float(y), description=f"indicator(y={y})")

    @classmethod
    def cosine(cls, lag: int) -> "WeightScheme":
        if lag < 0:
            raise DomainError("cosine lag must be nonnegative")
        return cls(WeightKind.COSINE, lag=int(lag), description=f"cosine(lag={lag})")

    @classmethod
    def kernel_at(cls, u0: float, bandwidth: float | None = None) -> "WeightScheme":
        if not 0.0 < u0 < np.pi:
            raise DomainError("kernel center must lie in (0, pi)")
        if bandwidth is not None and bandwidth <= 0.0:
            raise DomainError("bandwidth must be positive")
        return cls(WeightKind.KERNEL_AT, u0=float(u0), bandwidth=bandwidth,
                   description=f"kernel_at(u0={u0})")

    @classmethod
    def local_whittle(cls, m: int) -> "WeightScheme":
        if m < 1:
            raise DomainError("local Whittle bandwidth must be >= 1")
        return cls(WeightKind.LOCAL_WHITTLE, m=int(m), description=f"local_whittle(m={m})")

    @classmethod
    def counterexample(cls, d: float) -> "WeightScheme":
        if not 0.25 < d < 0.5:
            raise DomainError("counterexample memory parameter must lie in (1/4, 1/2)")
        return cls(WeightKind.COUNTEREXAMPLE, d=float(d),
                   description=f"counterexample(d={d})")

    @classmethod
    def custom(cls, values, description: str = "custom") -> "WeightScheme":
        vals = tuple(float(v) for v in np.asarray(values, dtype=float))
        if not vals:
            raise DomainError("custom weights must be nonempty")
        return cls(WeightKind.CUSTOM, values=vals, description=description)


def generate_weights(scheme: WeightScheme, n: int, include_nyquist: bool = False,
                     theta_band: float | None = None) -> np.ndarray:
    """Weights b_1..b_nu for sample size n.

    With `theta_band` = theta, weights above j = floor(theta n) are zeroed,
    restricting the sum to the low-frequency band.
    """
    if n < 8:
        raise DomainError("n must be >= 8")
    count = nu_for(n, include_nyquist)
    j = np.arange(1, count + 1)
    u = TWO_PI * j / n
    if scheme.kind is WeightKind.UNIFORM:
        b = np.ones(count)
    elif scheme.kind is WeightKind.INDICATOR:
        b = (u <= scheme.y).astype(np.float64)
    elif scheme.kind is WeightKind.COSINE:
        b = np.cos(scheme.lag * u)
    elif scheme.kind is WeightKind.KERNEL_AT:
        h = scheme.bandwidth if scheme.bandwidth is not None else n ** (-0.2)
        x = (u - scheme.u0) / h
        kernel = np.where(np.abs(x) <= 1.0, 0.75 * (1.0 - x**2), 0.0)
        b = kernel / (n * h)
    elif scheme.kind is WeightKind.LOCAL_WHITTLE:
        if scheme.m > count:
            raise DomainError(f"local Whittle bandwidth m={scheme.m} exceeds nu={count}")
        from .whittle import lw_weights

        b = np.zeros(count)
        b[:scheme.m] = lw_weights(n, scheme.m)
    elif scheme.kind is WeightKind.COUNTEREXAMPLE:
        b = 4.0 * np.pi * (TWO_PI * j) ** (-2.0 * scheme.d)
    elif scheme.kind is WeightKind.CUSTOM:
        if len(scheme.values) != count:
            raise DomainError(f"custom weights have length {len(scheme.values)}, "
                              f"need {count}")
        b = np.asarray(scheme.values, dtype=float)
    else:
        raise DomainError(f"unknown weight kind {scheme.kind!r}")
    if theta_band is not None:
        if not 0.0 < theta_band < 0.5:
            raise DomainError("theta_band must lie in (0, 1/2)")
        b = b.copy()
        b[j > int(theta_band * n)] = 0.0
    return b


def counterexample_ratio_sq_limit(d: float) -> float:
    """Limit of max_j b_j^2 / sum_j b_j^2 for b_j = 4 pi (2 pi j)^(-2d).

    Equals 1 / sum_{j>=1} j^(-4d), finite and positive for d > 1/4.
    """
    if not 0.25 < d < 0.5:
        raise DomainError("requires 1/4 < d < 1/2")
    return 1.0 / float(_hurwitz_zeta(4.0 * d, 1))


@dataclass(frozen=True)
class WeightConstants:
    """Deterministic constants of one weight array (optionally f-weighted)."""

    b_n: float
    B_n: float
    sum_b: float
    q_n_sq: float
    b_fn: float
    B_fn: float
    sum_bf: float
    v_n_sq: float


def weight_constants(weights: np.ndarray, f_vals: np.ndarray,
                     innovation: InnovationSpec, n: int) -> WeightConstants:
    """All scalar constants for one (weights, f values, innovation) triple."""
    b = np.asarray(weights, dtype=float)
    f = np.asarray(f_vals, dtype=float)
    if b.shape != f.shape:
        raise DomainError("weights and f_vals must have equal length")
    cum4 = innovation.fourth_cumulant
    bf = b * f
    b_n = float(np.max(np.abs(b))) if b.size else 0.0
    B_n_sq = exact_sum(b * b)
    sum_b = exact_sum(b)
    b_fn = float(np.max(np.abs(bf))) if bf.size else 0.0
    B_fn_sq = exact_sum(bf * bf)
    sum_bf = exact_sum(bf)
    return WeightConstants(
        b_n=b_n,
        B_n=math.sqrt(B_n_sq),
        sum_b=sum_b,
        q_n_sq=B_n_sq + cum4 * sum_b**2 / n,
        b_fn=b_fn,
        B_fn=math.sqrt(B_fn_sq),
        sum_bf=sum_bf,
        v_n_sq=B_fn_sq + cum4 * sum_bf**2 / n,
    )


def lindeberg_ratios(weights: np.ndarray, f_vals: np.ndarray) -> tuple[float, float]:
    """(max|b| / (sum b^2)^1/2, max|b f| / (sum (b f)^2)^1/2).

    Both must vanish as n grows for the normal limits to apply; the second
    governs the plain periodogram sums.
    """
    b = np.asarray(weights, dtype=float)
    f = np.asarray(f_vals, dtype=float)
    B_n = math.sqrt(exact_sum(b * b))
    if B_n == 0.0:
        raise DegenerateWeights("all weights are zero")
    bf = b * f
    B_fn = math.sqrt(exact_sum(bf * bf))
    if B_fn == 0.0:
        raise DegenerateWeights("all f-weighted weights are zero")
    return float(np.max(np.abs(b))) / B_n, float(np.max(np.abs(bf))) / B_fn


def _band(pgram: Periodogram, count: int) -> np.ndarray:
    ords = pgram.ordinates
    if count + 1 > ords.size:
        raise DomainError("weights longer than the stored periodogram band")
    return ords[1:count + 1]


def s_n_x(periodogram_x: Periodogram, f_vals: np.ndarray,
          weights: np.ndarray) -> float:
    """sum_j b_j I_{X,j} / f_j over j = 1..len(weights)."""
    b = np.asarray(weights, dtype=float)
    f = np.asarray(f_vals, dtype=float)
    if b.shape != f.shape:
        raise DomainError("weights and f_vals must have equal length")
    if np.any(f <= 0.0):
        raise DomainError("f values must be strictly positive")
    ords = _band(periodogram_x, b.size)
    return exact_sum(b * (ords / f))


def s_n_zeta(innovations: np.ndarray, weights: np.ndarray) -> float:
    """sum_j b_j 2 pi I_{zeta,j} from the in-sample innovation segment.

    Delegates to s_n_x with the white-noise density 1/(2 pi), so a
    white-noise realization yields s_n_x == s_n_zeta bit for bit.
    """
    b = np.asarray(weights, dtype=float)
    f = np.full(b.size, 1.0 / TWO_PI)
    return s_n_x(periodogram(np.asarray(innovations, dtype=float)), f, b)


def q_n_x(periodogram_x: Periodogram, weights: np.ndarray) -> float:
    """sum_j b_j I_{X,j} over j = 1..len(weights)."""
    b = np.asarray(weights, dtype=float)
    return exact_sum(b * _band(periodogram_x, b.size))


def q_n_zeta(innovations: np.ndarray, f_vals: np.ndarray,
             weights: np.ndarray) -> float:
    """sum_j b_j f_j 2 pi I_{zeta,j}; s_n_zeta with weights b_j f_j."""
    b = np.asarray(weights, dtype=float)
    f = np.asarray(f_vals, dtype=float)
    if b.shape != f.shape:
        raise DomainError("weights and f_vals must have equal length")
    return s_n_zeta(innovations, b * f)


def bartlett_residual(path: SamplePath, f_vals: np.ndarray,
                      weights: np.ndarray) -> float:
    """R = S_X - S_zeta for one realization carrying its innovations."""
    if path.innovations is None or path.innovations.size < path.n:
        raise MissingInnovations("sample path lacks its innovation record")
    sx = s_n_x(periodogram(path.values), f_vals, weights)
    sz = s_n_zeta(path.innovations_in_sample, weights)
    return sx - sz


@dataclass(frozen=True)
class QuadFormReport:
    """Every statistic of one realization under one weight scheme."""

    s_n_x: float
    s_n_zeta: float
    r_n: float
    q_n_x: float
    q_n_zeta: float
    constants: WeightConstants
    standardized_s: float
    standardized_q: float


def quad_form_report(path: SamplePath, f_vals: np.ndarray, weights: np.ndarray,
                     innovation: InnovationSpec) -> QuadFormReport:
    """Compute all quadratic-form statistics and constants for one path."""
    consts = weight_constants(weights, f_vals, innovation, path.n)
    pgram = periodogram(path.values)
    sx = s_n_x(pgram, f_vals, weights)
    sz = s_n_zeta(path.innovations_in_sample, weights)
    qx = q_n_x(pgram, weights)
    qz = q_n_zeta(path.innovations_in_sample, f_vals, weights)
    q_n = math.sqrt(consts.q_n_sq)
    v_n = math.sqrt(consts.v_n_sq)
    return QuadFormReport(
        s_n_x=sx, s_n_zeta=sz, r_n=sx - sz, q_n_x=qx, q_n_zeta=qz,
        constants=consts,
        standardized_s=(sx - consts.sum_b) / q_n if q_n > 0 else math.nan,
        standardized_q=(qx - consts.sum_bf) / v_n if v_n > 0 else math.nan,
    )


@dataclass(eq=False)
class ToeplitzForm:
    """Symmetric Toeplitz matrix C[t,s] = c(t-s) realizing S_zeta = z'Cz.

    c(t) = n^(-1) sum_j b_j cos(t u_j) for t = 0..n-1.
    """

    c: np.ndarray
    n: int
    _cache: dict = field(default_factory=dict, repr=False)


def toeplitz_form(weights: np.ndarray, n: int) -> ToeplitzForm:
    """Build the Toeplitz symbol c(0..n-1) for the given weights."""
    b = np.asarray(weights, dtype=float)
    if b.size != nu_for(n):
        raise DomainError("weights must have length floor(n/2) - 1")
    if n <= _DIRECT_SYMBOL_MAX:
        t = np.arange(n)
        u = TWO_PI * np.arange(1, b.size + 1) / n
        c = np.array([exact_sum(b * np.cos(tt * u)) for tt in t]) / n
    else:
        spectrum = np.zeros(n)
        spectrum[1:b.size + 1] = b
        c = np.fft.ifft(spectrum).real  # cosine part of n^-1 sum_j b_j e^{i t u_j}
    return ToeplitzForm(c=c, n=int(n))


def toeplitz_matvec(form: ToeplitzForm, x: np.ndarray) -> np.ndarray:
    """C x via circulant embedding, O(n log n)."""
    n = form.n
    L = next_fast_len(2 * n)
    if "embed" not in form._cache:
        col = np.zeros(L)
        col[:n] = form.c
        col[L - n + 1:] = form.c[1:][::-1]
        form._cache["embed"] = rfft(col)
    xs = np.zeros(L)
    xs[:n] = x
    return irfft(rfft(xs) * form._cache["embed"], L)[:n]


def toeplitz_quadratic(form: ToeplitzForm, z: np.ndarray) -> float:
    """z' C z, the time-domain value of the noise quadratic form."""
    return float(np.dot(z, toeplitz_matvec(form, np.asarray(z, dtype=float))))


def frobenius_norm_sq(form: ToeplitzForm) -> float:
    """sum_{t,s} c(t-s)^2 via lag multiplicities; equals B_n^2 / 2."""
    n = form.n
    c = form.c
    terms = (n - np.arange(n)) * c * c
    return exact_sum(terms) + exact_sum(terms[1:])


def spectral_norm(form: ToeplitzForm, tol: float = 1e-9,
                  max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on C^2 (FFT matvecs).

    Iterating the square is robust to a +/- lambda pair at the top of the
    spectrum. Raises NoConvergence after `max_iter` iterations.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    n = form.n
    gen = np.random.Generator(np.random.Philox(0x5EC7_0001))
    x = gen.standard_normal(n)
    x /= np.linalg.norm(x)
    est = math.inf
    for _ in range(max_iter):
        v = toeplitz_matvec(form, x)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        new_est = nv  # ||C x|| with ||x|| = 1: sqrt of the Rayleigh quotient of C^2
        w = toeplitz_matvec(form, v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        x = w / nw
        if math.isfinite(est) and abs(new_est - est) <= tol * max(new_est, 1e-300):
            return float(new_est)
        est = new_est
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")
