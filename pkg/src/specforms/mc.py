"""Monte Carlo verification engine.

Replications are independent tasks keyed by (master_seed, rep_index); each
worker recomputes its replication from scratch, so results are identical
for any worker count, including one. Studies cover normal-limit checks of
the standardized quadratic forms, exact mean/variance identities of the
noise form, Bartlett-residual bound shapes, exact DFT-bias decay, and the
heavy-low-frequency weight scheme that breaks the normal limit.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, InsufficientSamples
from .models import (GAUSSIAN, InnovationSpec, LinearProcessModel,
                     default_truncation, simulate, spectral_density)
from .quadforms import (WeightConstants, WeightScheme,
                        counterexample_ratio_sq_limit, generate_weights,
                        lindeberg_ratios, q_n_x, q_n_zeta, s_n_x, s_n_zeta,
                        weight_constants)
from .rng import derive_seed
from .spectral import exact_dft_cross_cov, exact_dft_second_moment, periodogram

TWO_PI = 2.0 * np.pi


class Statistic(str, enum.Enum):
    STD_S = "std_s"          # (S_X - sum b) / q_n
    STD_Q = "std_q"          # (Q_X - sum b f) / v_n
    RESIDUAL = "residual"    # R = S_X - S_zeta
    BIAS_S = "bias_s"        # S_X - sum b
    BIAS_Q = "bias_q"        # Q_X - sum b f
    S_ZETA = "s_zeta"        # noise form itself
    Q_ZETA = "q_zeta"        # f-weighted noise form


@dataclass(frozen=True)
class MCStudyConfig:
    model: LinearProcessModel
    innovation: InnovationSpec
    scheme: WeightScheme
    n_grid: tuple[int, ...]
    replications: int
    master_seed: int
    statistic: Statistic
    include_nyquist: bool = False
    theta_band: float | None = None
    threads: int = 1

    def __post_init__(self):
        if self.replications < 100:
            raise DomainError("replications must be >= 100")
        if not self.n_grid or min(self.n_grid) < 64:
            raise DomainError("every n in n_grid must be >= 64")


@dataclass(frozen=True)
class _RepContext:
    model: LinearProcessModel
    innovation: InnovationSpec
    n: int
    master_seed: int
    statistic: Statistic
    weights: np.ndarray
    f_vals: np.ndarray
    consts: WeightConstants


def _study_context(config: MCStudyConfig, n: int) -> _RepContext:
    weights = generate_weights(config.scheme, n, config.include_nyquist,
                               config.theta_band)
    u = TWO_PI * np.arange(1, weights.size + 1) / n
    f_vals = np.atleast_1d(spectral_density(config.model, u))
    consts = weight_constants(weights, f_vals, config.innovation, n)
    return _RepContext(model=config.model, innovation=config.innovation, n=n,
                       master_seed=config.master_seed, statistic=config.statistic,
                       weights=weights, f_vals=f_vals, consts=consts)


def _compute_rep(ctx: _RepContext, rep_index: int) -> float:
    seed = derive_seed(ctx.master_seed, rep_index)
    path = simulate(ctx.model, ctx.innovation, ctx.n, seed)
    stat = ctx.statistic
    if stat in (Statistic.S_ZETA, Statistic.Q_ZETA):
        zeta = path.innovations_in_sample
        if stat is Statistic.S_ZETA:
            return s_n_zeta(zeta, ctx.weights)
        return q_n_zeta(zeta, ctx.f_vals, ctx.weights)
    pgram = periodogram(path.values)
    if stat is Statistic.STD_S:
        sx = s_n_x(pgram, ctx.f_vals, ctx.weights)
        return (sx - ctx.consts.sum_b) / math.sqrt(ctx.consts.q_n_sq)
    if stat is Statistic.BIAS_S:
        return s_n_x(pgram, ctx.f_vals, ctx.weights) - ctx.consts.sum_b
    if stat is Statistic.STD_Q:
        qx = q_n_x(pgram, ctx.weights)
        return (qx - ctx.consts.sum_bf) / math.sqrt(ctx.consts.v_n_sq)
    if stat is Statistic.BIAS_Q:
        return q_n_x(pgram, ctx.weights) - ctx.consts.sum_bf
    if stat is Statistic.RESIDUAL:
        sx = s_n_x(pgram, ctx.f_vals, ctx.weights)
        sz = s_n_zeta(path.innovations_in_sample, ctx.weights)
        return sx - sz
    raise DomainError(f"unknown statistic {stat!r}")


_WORKER_CTX: _RepContext | None = None


def _init_worker(ctx: _RepContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _worker_rep(rep_index: int) -> float:
    return _compute_rep(_WORKER_CTX, rep_index)


def _run_reps(ctx: _RepContext, replications: int, threads: int) -> np.ndarray:
    if threads <= 1:
        values = [_compute_rep(ctx, r) for r in range(replications)]
    else:
        chunk = max(1, replications // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                 initargs=(ctx,)) as pool:
            values = list(pool.map(_worker_rep, range(replications), chunksize=chunk))
    return np.asarray(values, dtype=float)


def kolmogorov_sf(x: float) -> float:
    """Asymptotic Kolmogorov survival function, series truncated at 100 terms."""
    if x <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        total += (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
    return float(min(1.0, max(0.0, 2.0 * total)))


def normality_tests(samples: np.ndarray) -> tuple[float, float, float, float]:
    """(ks_stat, ks_pvalue, skewness, excess_kurtosis) of a sample.

    The KS statistic is taken against the normal with the sample's own mean
    and variance; the p-value uses the asymptotic Kolmogorov distribution.
    """
    x = np.asarray(samples, dtype=float)
    r = x.size
    if r < 100:
        raise InsufficientSamples(f"need >= 100 samples, got {r}")
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    if std == 0.0:
        return 0.5, 0.0, math.nan, math.nan
    z = np.sort((x - mean) / std)
    cdf = ndtr(z)
    steps = np.arange(1, r + 1) / r
    d_plus = float(np.max(steps - cdf))
    d_minus = float(np.max(cdf - (steps - 1.0 / r)))
    ks = max(d_plus, d_minus)
    centered = x - mean
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    skew = m3 / m2**1.5
    exkurt = m4 / m2**2 - 3.0
    return ks, kolmogorov_sf(ks * math.sqrt(r)), skew, exkurt


@dataclass(frozen=True)
class PerNSummary:
    n: int
    replications: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    ks_stat: float
    ks_pvalue: float
    var_ratio: float
    residual_msq: float | None
    theoretical_mean: float | None
    theoretical_var: float | None
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    lindeberg_ratio: float
    lindeberg_ratio_f: float
    constants: WeightConstants
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class MCStudySummary:
    statistic: Statistic
    master_seed: int
    per_n: tuple[PerNSummary, ...]
    extras: dict = field(default_factory=dict)


def _targets(statistic: Statistic, consts: WeightConstants):
    if statistic in (Statistic.STD_S, Statistic.STD_Q):
        return 0.0, 1.0
    if statistic is Statistic.S_ZETA:
        return consts.sum_b, consts.q_n_sq
    if statistic is Statistic.Q_ZETA:
        return consts.sum_bf, consts.v_n_sq
    return None, None


def _summarize(ctx: _RepContext, values: np.ndarray, replications: int) -> PerNSummary:
    ks, ks_p, skew, exkurt = normality_tests(values)
    mean = float(values.mean())
    var = float(values.var(ddof=1))
    th_mean, th_var = _targets(ctx.statistic, ctx.consts)
    var_ratio = var / th_var if th_var else math.nan
    centered = values - mean
    m4 = float(np.mean(centered**4))
    r = values.size
    ratio, ratio_f = lindeberg_ratios(ctx.weights, ctx.f_vals)
    return PerNSummary(
        n=ctx.n, replications=replications, mean=mean, variance=var,
        skewness=skew, excess_kurtosis=exkurt, ks_stat=ks, ks_pvalue=ks_p,
        var_ratio=var_ratio,
        residual_msq=float(np.mean(values**2)) if ctx.statistic is Statistic.RESIDUAL else None,
        theoretical_mean=th_mean, theoretical_var=th_var,
        se_mean=math.sqrt(var / r),
        se_variance=math.sqrt(max(m4 - var**2, 0.0) / r),
        se_skewness=math.sqrt(6.0 / r),
        se_kurtosis=math.sqrt(24.0 / r),
        lindeberg_ratio=ratio, lindeberg_ratio_f=ratio_f,
        constants=ctx.consts, values=values,
    )


def _run_study(config: MCStudyConfig) -> MCStudySummary:
    per_n = []
    for n in config.n_grid:
        ctx = _study_context(config, n)
        values = _run_reps(ctx, config.replications, config.threads)
        per_n.append(_summarize(ctx, values, config.replications))
    return MCStudySummary(statistic=config.statistic,
                          master_seed=config.master_seed, per_n=tuple(per_n))


def run_clt_study(config: MCStudyConfig) -> MCStudySummary:
    """Simulate R paths per n and summarize the standardized statistic.

    Warns (without failing) when the scheme's relevant negligibility ratio
    at the largest n is not below 0.2, since the normal limit is then not
    expected to be accurate.
    """
    largest = max(config.n_grid)
    ctx = _study_context(config, largest)
    ratio, ratio_f = lindeberg_ratios(ctx.weights, ctx.f_vals)
    relevant = ratio_f if config.statistic in (Statistic.STD_Q, Statistic.BIAS_Q,
                                               Statistic.Q_ZETA) else ratio
    if relevant >= 0.2:
        warnings.warn(f"weight negligibility ratio {relevant:.3f} >= 0.2 at "
                      f"n={largest}; the normal limit may not apply",
                      stacklevel=2)
    summary = _run_study(config)
    summary.extras["clt_rejected"] = bool(summary.per_n[-1].ks_pvalue <= 0.01)
    return summary


def run_variance_identity_check(config: MCStudyConfig) -> MCStudySummary:
    """Check the exact mean and variance identities of the noise form."""
    if config.statistic not in (Statistic.S_ZETA, Statistic.Q_ZETA):
        raise DomainError("variance identity check targets s_zeta or q_zeta")
    return _run_study(config)


@dataclass(frozen=True)
class BoundRow:
    n: int
    residual_msq: float
    var_residual: float
    bias_abs: float
    bound_bn2log3: float
    bound_bnBn: float
    bound_bnlog2: float
    se_msq: float
    se_var: float
    se_bias: float


def run_bartlett_bound_study(config: MCStudyConfig) -> list[BoundRow]:
    """Residual moments against the bound shapes b_n^2 log^3 n, b_n B_n, b_n log^2 n."""
    grid = sorted(config.n_grid)
    if len(grid) < 3 or grid[-1] < 10 * grid[0]:
        raise DomainError("n_grid needs >= 3 sizes spanning at least one decade")
    rows = []
    for n in grid:
        ctx = _study_context(config, n)
        ctx = dataclasses.replace(ctx, statistic=Statistic.RESIDUAL)
        values = _run_reps(ctx, config.replications, config.threads)
        r = values.size
        mean = float(values.mean())
        var = float(values.var(ddof=1))
        msq = float(np.mean(values**2))
        centered = values - mean
        m4 = float(np.mean(centered**4))
        c = ctx.consts
        logn = math.log(n)
        rows.append(BoundRow(
            n=n, residual_msq=msq, var_residual=var, bias_abs=abs(mean),
            bound_bn2log3=c.b_n**2 * logn**3,
            bound_bnBn=c.b_n * c.B_n,
            bound_bnlog2=c.b_n * logn**2,
            se_msq=math.sqrt(max(float(np.mean(values**4)) - msq**2, 0.0) / r),
            se_var=math.sqrt(max(m4 - var**2, 0.0) / r),
            se_bias=math.sqrt(var / r),
        ))
    return rows


def run_counterexample_study(n: int, d: float, replications: int, seed: int,
                             threads: int = 1) -> MCStudySummary:
    """The heavy-low-frequency scheme b_j = 4 pi (2 pi j)^(-2d), 1/4 < d < 1/2.

    Its negligibility ratio stays bounded away from zero, and the
    standardized statistic is not asymptotically normal; the summary
    reports the finite-n ratio^2, its infinite-series limit, and whether
    the KS test rejects at the 1% level.
    """
    if not 0.25 < d < 0.5:
        raise DomainError("counterexample requires 1/4 < d < 1/2")
    model = LinearProcessModel.arfima(d, truncation_K=default_truncation(n))
    config = MCStudyConfig(model=model, innovation=GAUSSIAN,
                           scheme=WeightScheme.counterexample(d), n_grid=(n,),
                           replications=replications, master_seed=seed,
                           statistic=Statistic.STD_S, threads=threads)
    summary = _run_study(config)
    top = summary.per_n[-1]
    summary.extras.update({
        "clt_rejected": bool(top.ks_pvalue <= 0.01),
        "lindeberg_ratio_sq": top.lindeberg_ratio**2,
        "lindeberg_ratio_sq_limit": counterexample_ratio_sq_limit(d),
    })
    return summary


@dataclass(frozen=True)
class DecayRow:
    n: int
    j: int
    u_j: float
    second_moment: float
    f_value: float
    abs_error: float
    envelope: float
    ratio: float
    cross_abs: float | None


def run_dft_bias_decay_study(model: LinearProcessModel, n_grid, j_rule,
                             k_rule=None) -> list[DecayRow]:
    """Exact DFT bias |E|w_j|^2 - f_j| against the envelope u_j^(-2d) log(1+j)/j.

    The ratio column should stay bounded across the grid when the bias
    decays at the predicted rate. With a `k_rule`, the off-diagonal
    magnitude |E[w_j conj(w_k)]| is reported as well.
    """
    rows = []
    for n in n_grid:
        j = int(j_rule(n))
        if not 1 <= j <= n // 2:
            raise DomainError(f"j_rule produced {j}, outside 1..{n // 2}")
        u = TWO_PI * j / n
        second = exact_dft_second_moment(model.coeffs, n, j)
        f_val = float(spectral_density(model, u))
        err = abs(second - f_val)
        envelope = u ** (-2.0 * model.d) * math.log(1.0 + j) / j
        cross = None
        if k_rule is not None:
            k = int(k_rule(n))
            if k != j:
                cross = abs(exact_dft_cross_cov(model.coeffs, model.coeffs, n, j, k))
        rows.append(DecayRow(n=int(n), j=j, u_j=u, second_moment=second,
                             f_value=f_val, abs_error=err, envelope=envelope,
                             ratio=err / envelope, cross_abs=cross))
    return rows
