"""Innovation families and linear-process models.

A model is a truncated moving average X_t = sum_{k=0}^{K} a_k zeta_{t-k}
driven by i.i.d. standardized innovations. ARFIMA and fractionally
integrated short-memory models get closed-form transfer functions and
spectral densities; everything else is evaluated from the coefficients.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

from .errors import DomainError, NonCausalAR
from .rng import ROLE_INNOVATIONS, substream

TWO_PI = 2.0 * np.pi

#: Kernels at most this long are convolved directly, which keeps white-noise
#: and short-MA paths bit-exact functions of their innovations.
_DIRECT_CONV_MAX = 128


class InnovationFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    CENTERED_EXPONENTIAL = "centered_exponential"
    UNIFORM = "uniform"
    RADEMACHER = "rademacher"


@dataclass(frozen=True)
class InnovationSpec:
    """A standardized i.i.d. innovation family (mean 0, variance 1).

    fourth_cumulant is Cum4(zeta) = E zeta^4 - 3; var_zeta_sq is
    Var(zeta^2) = fourth_cumulant + 2.
    """

    family: InnovationFamily
    fourth_cumulant: float
    var_zeta_sq: float


GAUSSIAN = InnovationSpec(InnovationFamily.GAUSSIAN, 0.0, 2.0)
CENTERED_EXPONENTIAL = InnovationSpec(InnovationFamily.CENTERED_EXPONENTIAL, 6.0, 8.0)
UNIFORM = InnovationSpec(InnovationFamily.UNIFORM, -1.2, 0.8)
RADEMACHER = InnovationSpec(InnovationFamily.RADEMACHER, -2.0, 0.0)

INNOVATIONS = {spec.family.value: spec
               for spec in (GAUSSIAN, CENTERED_EXPONENTIAL, UNIFORM, RADEMACHER)}


def innovation_by_name(name: str) -> InnovationSpec:
    try:
        return INNOVATIONS[name]
    except KeyError:
        raise DomainError(f"unknown innovation family {name!r}") from None


def _draw(gen: np.random.Generator, family: InnovationFamily, count: int) -> np.ndarray:
    if family is InnovationFamily.GAUSSIAN:
        return gen.standard_normal(count)
    if family is InnovationFamily.CENTERED_EXPONENTIAL:
        return gen.standard_exponential(count) - 1.0
    if family is InnovationFamily.UNIFORM:
        root3 = np.sqrt(3.0)
        return gen.uniform(-root3, root3, count)
    if family is InnovationFamily.RADEMACHER:
        return gen.integers(0, 2, count).astype(np.float64) * 2.0 - 1.0
    raise DomainError(f"unknown innovation family {family!r}")


def sample_innovations(spec: InnovationSpec, count: int, seed: int,
                       rep_index: int = 0) -> np.ndarray:
    """Draw `count` i.i.d. standardized innovations from a keyed stream."""
    if count < 1:
        raise DomainError("count must be >= 1")
    gen = substream(seed, rep_index, ROLE_INNOVATIONS)
    return _draw(gen, spec.family, count)


class ModelKind(str, enum.Enum):
    WHITE_NOISE = "white_noise"
    MA = "ma"
    ARFIMA = "arfima"
    FRACTIONAL_OF_SHORT_MEMORY = "fractional_of_short_memory"


def default_truncation(n: int) -> int:
    """Default moving-average truncation for sample size n.

    For long memory a_k ~ k^(d-1), so the discarded tail variance is of
    order K^(2d-1); 100 n keeps it negligible at desk scale.
    """
    return max(100 * int(n), 2**17)


def _check_causal(ar: tuple[float, ...]) -> None:
    if not ar:
        return
    # phi(z) = 1 - phi_1 z - ... - phi_p z^p, highest degree first for np.roots
    poly = np.concatenate([-np.asarray(ar[::-1], dtype=float), [1.0]])
    roots = np.roots(poly)
    if roots.size and np.min(np.abs(roots)) <= 1.0 + 1e-10:
        raise NonCausalAR(f"AR polynomial has a root of modulus "
                          f"{np.min(np.abs(roots)):.6f} inside the closed unit disk")


def _fractional_coeffs(d: float, K: int) -> np.ndarray:
    """Binomial series of (1-B)^(-d): psi_0 = 1, psi_k = psi_{k-1} (k-1+d)/k."""
    if K == 0:
        return np.ones(1)
    k = np.arange(1, K + 1, dtype=np.float64)
    return np.concatenate([[1.0], np.cumprod((k - 1.0 + d) / k)])


def _arma_impulse(ar: tuple[float, ...], ma: tuple[float, ...], K: int) -> np.ndarray:
    """First K+1 coefficients of theta(B)/phi(B)."""
    from scipy.signal import lfilter

    b = np.concatenate([[1.0], np.asarray(ma, dtype=float)])
    a = np.concatenate([[1.0], -np.asarray(ar, dtype=float)])
    e = np.zeros(K + 1)
    e[0] = 1.0
    return lfilter(b, a, e)


def arfima_ma_coeffs(d: float, ar: tuple[float, ...] = (), ma: tuple[float, ...] = (),
                     K: int = 2**17) -> np.ndarray:
    """Moving-average coefficients a_0..a_K of (1-B)^(-d) theta(B)/phi(B).

    The fractional part uses the exact binomial recursion; with AR/MA parts
    present it is convolved with the ARMA impulse response.

    Raises DomainError if |d| >= 1/2 and NonCausalAR if phi has a root in
    the closed unit disk.
    """
    if not abs(d) < 0.5:
        raise DomainError(f"memory parameter must satisfy |d| < 1/2, got {d}")
    if K < 0:
        raise DomainError("truncation must be nonnegative")
    _check_causal(tuple(ar))
    psi = _fractional_coeffs(d, K)
    if not ar and not ma:
        return psi
    h = _arma_impulse(tuple(ar), tuple(ma), K)
    if d == 0.0:
        return h
    from scipy.signal import fftconvolve

    return fftconvolve(psi, h)[:K + 1]


@dataclass(eq=False)
class LinearProcessModel:
    """Immutable truncated MA(inf) model; build via the class methods."""

    kind: ModelKind
    d: float
    ar: tuple[float, ...]
    ma: tuple[float, ...]
    coeffs: np.ndarray
    truncation_K: int
    short_coeffs: np.ndarray | None = None
    _conv_cache: dict = field(default_factory=dict, repr=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_conv_cache"] = {}
        return state

    @classmethod
    def white_noise(cls) -> "LinearProcessModel":
        return cls(ModelKind.WHITE_NOISE, 0.0, (), (), np.array([1.0, 0.0]), 1)

    @classmethod
    def moving_average(cls, theta: tuple[float, ...]) -> "LinearProcessModel":
        theta = tuple(float(v) for v in theta)
        coeffs = np.concatenate([[1.0], np.asarray(theta, dtype=float)])
        return cls(ModelKind.MA, 0.0, (), theta, coeffs, len(theta))

    @classmethod
    def arfima(cls, d: float, ar: tuple[float, ...] = (), ma: tuple[float, ...] = (),
               truncation_K: int | None = None) -> "LinearProcessModel":
        ar = tuple(float(v) for v in ar)
        ma = tuple(float(v) for v in ma)
        K = 2**17 if truncation_K is None else int(truncation_K)
        if K < 1:
            raise DomainError("truncation_K must be >= 1")
        coeffs = arfima_ma_coeffs(d, ar, ma, K)
        return cls(ModelKind.ARFIMA, float(d), ar, ma, coeffs, K)

    @classmethod
    def fractional_of(cls, d: float, short_coeffs, truncation_K: int | None = None
                      ) -> "LinearProcessModel":
        """(1-B)^(-d) applied to a short-memory MA with the given coefficients."""
        if not abs(d) < 0.5:
            raise DomainError(f"memory parameter must satisfy |d| < 1/2, got {d}")
        short = np.asarray(short_coeffs, dtype=float)
        if short.ndim != 1 or short.size == 0:
            raise DomainError("short_coeffs must be a nonempty 1-d sequence")
        K = 2**17 if truncation_K is None else int(truncation_K)
        if K < 1:
            raise DomainError("truncation_K must be >= 1")
        from scipy.signal import fftconvolve

        psi = _fractional_coeffs(d, K)
        coeffs = fftconvolve(psi, short)[:K + 1]
        return cls(ModelKind.FRACTIONAL_OF_SHORT_MEMORY, float(d), (), (),
                   coeffs, K, short_coeffs=short)


def _check_freq(u: np.ndarray) -> None:
    if np.any(u <= 0.0) or np.any(u > np.pi + 1e-12):
        raise DomainError("frequency must lie in (0, pi]")


def transfer_function(model: LinearProcessModel, u):
    """Transfer function A(u) = sum_k a_k e^{-iku} at frequencies in (0, pi].

    ARFIMA and fractional kinds use the closed form
    (1 - e^{-iu})^(-d) theta(e^{-iu}) / phi(e^{-iu}) (principal branch);
    raw-coefficient kinds use the finite sum.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    _check_freq(u_arr)
    z = np.exp(-1j * u_arr)
    if model.kind is ModelKind.WHITE_NOISE:
        out = np.ones_like(z)
    elif model.kind is ModelKind.MA:
        out = np.polyval(model.coeffs[::-1], z)
    elif model.kind is ModelKind.ARFIMA:
        frac = (1.0 - z) ** (-model.d) if model.d != 0.0 else np.ones_like(z)
        num = np.polyval(np.concatenate([[1.0], np.asarray(model.ma)])[::-1], z)
        den = np.polyval(np.concatenate([[1.0], -np.asarray(model.ar)])[::-1], z)
        out = frac * num / den
    elif model.kind is ModelKind.FRACTIONAL_OF_SHORT_MEMORY:
        frac = (1.0 - z) ** (-model.d) if model.d != 0.0 else np.ones_like(z)
        out = frac * np.polyval(model.short_coeffs[::-1], z)
    else:
        raise DomainError(f"unknown model kind {model.kind!r}")
    return out[0] if np.isscalar(u) or np.ndim(u) == 0 else out


def truncated_transfer(model: LinearProcessModel, u):
    """A(u) evaluated from the truncated coefficients (reference path)."""
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    _check_freq(u_arr)
    k = np.arange(model.coeffs.size)
    out = np.array([np.dot(np.exp(-1j * uu * k), model.coeffs) for uu in u_arr])
    return out[0] if np.isscalar(u) or np.ndim(u) == 0 else out


def spectral_density(model: LinearProcessModel, u):
    """f(u) = |A(u)|^2 / (2 pi); innovations are standardized so sigma^2 = 1."""
    a = transfer_function(model, u)
    return np.abs(a) ** 2 / TWO_PI


def short_memory_g(model: LinearProcessModel, u):
    """Short-memory factor g(u) = |u|^(2d) f(u); bounded away from 0 and inf."""
    u_arr = np.asarray(u, dtype=float)
    return np.abs(u_arr) ** (2.0 * model.d) * spectral_density(model, u)


@dataclass(eq=False)
class SamplePath:
    """One simulated realization together with its driving innovations.

    `innovations` holds zeta_{1-K}..zeta_n; the in-sample segment
    zeta_1..zeta_n is what the noise quadratic forms consume.
    """

    values: np.ndarray
    innovations: np.ndarray
    n: int
    seed: int
    model: LinearProcessModel

    @property
    def innovations_in_sample(self) -> np.ndarray:
        return self.innovations[self.model.truncation_K:]


def convolve_coefficients(coeffs: np.ndarray, innovations: np.ndarray, n: int,
                          cache: dict | None = None) -> np.ndarray:
    """X_t = sum_k a_k zeta_{t-k} for t = 1..n from zeta_{1-K}..zeta_n.

    Short kernels are convolved directly (exact); long ones use a circular
    FFT convolution whose wrap-around region is discarded.
    """
    K = coeffs.size - 1
    if innovations.size != n + K:
        raise DomainError("innovations must have length n + K")
    if coeffs.size <= _DIRECT_CONV_MAX:
        return np.convolve(innovations, coeffs, mode="valid")
    nfft = next_fast_len(n + K)
    if cache is not None and ("kernel", n) in cache:
        A = cache[("kernel", n)]
    else:
        A = rfft(coeffs, nfft)
        if cache is not None:
            cache[("kernel", n)] = A
    full = irfft(rfft(innovations, nfft) * A, nfft)
    return full[K:K + n]


def simulate(model: LinearProcessModel, innovation: InnovationSpec, n: int,
             seed: int) -> SamplePath:
    """Simulate X_1..X_n, retaining the innovations alongside the values."""
    if n < 8:
        raise DomainError("n must be >= 8")
    K = model.truncation_K
    gen = substream(seed, 0, ROLE_INNOVATIONS)
    z = _draw(gen, innovation.family, n + K)
    x = convolve_coefficients(model.coeffs, z, n, cache=model._conv_cache)
    return SamplePath(values=x, innovations=z, n=n, seed=int(seed), model=model)


def coeffs_to_csv(coeffs: np.ndarray) -> str:
    """One coefficient per line, index implicit."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for value in np.asarray(coeffs, dtype=float):
        writer.writerow([repr(float(value))])
    return buf.getvalue()


def coeffs_from_csv(text: str) -> np.ndarray:
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    return np.array([float(row[0]) for row in rows])
