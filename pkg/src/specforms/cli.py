"""Command-line driver: reproducible experiments writing JSON + CSV artifacts.

Subcommands: simulate, qform, mc, bounds, counterexample, whittle, prop2.
Every run writes `summary.json` carrying the fully resolved configuration
(including defaulted fields and the seed), so experiments are
self-describing. Detail CSVs are byte-identical for a fixed seed
regardless of --threads.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path
from statistics import NormalDist

import numpy as np

from . import mc as mc_mod
from . import whittle as whittle_mod
from .config import (SCHEMA_VERSION, ExperimentConfig, config_to_dict,
                     parse_config)
from .errors import (DomainError, NonCausalAR, ParseError, ValidationError)
from .models import (LinearProcessModel, coeffs_to_csv, default_truncation,
                     innovation_by_name, simulate, spectral_density)
from .quadforms import WeightScheme, generate_weights, quad_form_report
from .rng import derive_seed
from .spectral import fourier_grid, periodogram

QQ_POINTS = 200


def _build_model(cfg: ExperimentConfig, n_max: int) -> LinearProcessModel:
    mdl = cfg.model
    trunc = mdl.truncation_k if mdl.truncation_k is not None else default_truncation(n_max)
    if mdl.kind == "white_noise":
        return LinearProcessModel.white_noise()
    if mdl.kind == "ma":
        return LinearProcessModel.moving_average(mdl.ma)
    if mdl.kind == "arfima":
        return LinearProcessModel.arfima(mdl.d, mdl.ar, mdl.ma, truncation_K=trunc)
    if mdl.kind == "fractional_of_short_memory":
        short = mdl.short_coeffs if mdl.short_coeffs else (1.0,)
        return LinearProcessModel.fractional_of(mdl.d, short, truncation_K=trunc)
    raise ValidationError(f"model.kind: unknown kind {mdl.kind!r}")


def _build_scheme(cfg: ExperimentConfig) -> WeightScheme:
    w = cfg.weights
    if w.kind == "uniform":
        return WeightScheme.uniform()
    if w.kind == "indicator":
        return WeightScheme.indicator(w.y)
    if w.kind == "cosine":
        return WeightScheme.cosine(w.lag)
    if w.kind == "kernel_at":
        return WeightScheme.kernel_at(w.u0, w.bandwidth)
    if w.kind == "local_whittle":
        return WeightScheme.local_whittle(w.m)
    if w.kind == "counterexample":
        return WeightScheme.counterexample(w.d)
    if w.kind == "custom":
        values = _read_column(Path(w.path))
        return WeightScheme.custom(values, description=f"custom({w.path})")
    raise ValidationError(f"weights.kind: unknown kind {w.kind!r}")


def _read_column(path: Path) -> np.ndarray:
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]  # tolerate a header line
    return np.array([float(row[0]) for row in rows])


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return value


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _write_summary(out: Path, cfg: ExperimentConfig, results: dict) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": config_to_dict(cfg),
        "results": _json_ready(results),
    }
    with open(out / "summary.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def _per_n_dict(summary: mc_mod.PerNSummary) -> dict:
    d = dataclasses.asdict(summary)
    d.pop("values")
    d["clt_rejected"] = bool(summary.ks_pvalue <= 0.01)
    return d


def emit_plotdata(out: Path, summary: mc_mod.MCStudySummary) -> None:
    """Tidy per-replication and QQ files for external plotting tools."""
    detail = []
    for per_n in summary.per_n:
        for rep, value in enumerate(per_n.values):
            detail.append((per_n.n, rep, float(value)))
    _write_csv(out / "detail.csv", ["n", "rep", "statistic"], detail)

    norm = NormalDist()
    largest = summary.per_n[-1]
    probs = [(i + 0.5) / QQ_POINTS for i in range(QQ_POINTS)]
    theo = [norm.inv_cdf(p) for p in probs]
    std = np.sort((largest.values - largest.values.mean())
                  / largest.values.std(ddof=1))
    emp = np.quantile(std, probs)
    _write_csv(out / "qq.csv", ["theoretical_quantile", "empirical_quantile"],
               zip(theo, emp))


def _cmd_simulate(cfg: ExperimentConfig, out: Path) -> str:
    model = _build_model(cfg, cfg.n)
    innovation = innovation_by_name(cfg.innovation)
    path = simulate(model, innovation, cfg.n, cfg.seed)
    _write_csv(out / "series.csv", ["t", "value"],
               ((t + 1, float(v)) for t, v in enumerate(path.values)))
    (out / "coeffs.csv").write_text(coeffs_to_csv(model.coeffs))
    _write_summary(out, cfg, {
        "n": cfg.n,
        "sample_mean": float(path.values.mean()),
        "sample_variance": float(path.values.var()),
        "coefficient_count": int(model.coeffs.size),
    })
    return f"simulated n={cfg.n} values into {out / 'series.csv'}"


def _cmd_qform(cfg: ExperimentConfig, out: Path) -> str:
    model = _build_model(cfg, cfg.n)
    innovation = innovation_by_name(cfg.innovation)
    scheme = _build_scheme(cfg)
    weights = generate_weights(scheme, cfg.n, cfg.include_nyquist, cfg.theta_band)
    grid = fourier_grid(cfg.n)
    u = grid.frequencies[1:weights.size + 1]
    f_vals = np.atleast_1d(spectral_density(model, u))
    path = simulate(model, innovation, cfg.n, cfg.seed)
    report = quad_form_report(path, f_vals, weights, innovation)
    pgram = periodogram(path.values)
    _write_csv(out / "periodogram.csv", ["j", "u_j", "I_j"],
               ((j, float(grid.frequencies[j]), float(pgram.ordinates[j]))
                for j in range(pgram.ordinates.size)))
    _write_summary(out, cfg, {"report": dataclasses.asdict(report)})
    return (f"qform n={cfg.n}: s_n_x={report.s_n_x:.6g} r_n={report.r_n:.6g} "
            f"standardized_s={report.standardized_s:.4f}")


def _mc_config(cfg: ExperimentConfig) -> mc_mod.MCStudyConfig:
    sizes = cfg.sizes()
    model = _build_model(cfg, max(sizes))
    return mc_mod.MCStudyConfig(
        model=model,
        innovation=innovation_by_name(cfg.innovation),
        scheme=_build_scheme(cfg),
        n_grid=sizes,
        replications=cfg.replications,
        master_seed=cfg.seed,
        statistic=mc_mod.Statistic(cfg.statistic),
        include_nyquist=cfg.include_nyquist,
        theta_band=cfg.theta_band,
        threads=cfg.threads,
    )


def _cmd_mc(cfg: ExperimentConfig, out: Path) -> str:
    study = _mc_config(cfg)
    if cfg.statistic in ("s_zeta", "q_zeta"):
        summary = mc_mod.run_variance_identity_check(study)
    else:
        summary = mc_mod.run_clt_study(study)
    emit_plotdata(out, summary)
    results = {
        "statistic": summary.statistic.value,
        "per_n": [_per_n_dict(p) for p in summary.per_n],
        **summary.extras,
    }
    _write_summary(out, cfg, results)
    top = summary.per_n[-1]
    return (f"mc {cfg.statistic} n={top.n} R={cfg.replications}: "
            f"ks_p={top.ks_pvalue:.4g} var_ratio={top.var_ratio:.4f}")


def _cmd_bounds(cfg: ExperimentConfig, out: Path) -> str:
    rows = mc_mod.run_bartlett_bound_study(_mc_config(cfg))
    _write_csv(out / "bounds.csv",
               ["n", "residual_msq", "bound_bn2log3", "bound_bnBn",
                "bias_abs", "bound_bnlog2"],
               ((r.n, r.residual_msq, r.bound_bn2log3, r.bound_bnBn,
                 r.bias_abs, r.bound_bnlog2) for r in rows))
    long_rows = []
    for r in rows:
        for name in ("residual_msq", "var_residual", "bias_abs", "bound_bn2log3",
                     "bound_bnBn", "bound_bnlog2"):
            long_rows.append((r.n, name, getattr(r, name)))
    _write_csv(out / "long.csv", ["n", "quantity", "value"], long_rows)
    _write_summary(out, cfg, {"rows": [dataclasses.asdict(r) for r in rows]})
    ratio0 = rows[0].residual_msq / rows[0].bound_bnBn if rows[0].bound_bnBn else 0.0
    return f"bounds over n={[r.n for r in rows]}: msq/bnBn at smallest n = {ratio0:.4g}"


def _cmd_counterexample(cfg: ExperimentConfig, out: Path) -> str:
    d = cfg.weights.d
    summary = mc_mod.run_counterexample_study(cfg.n, d, cfg.replications,
                                              cfg.seed, threads=cfg.threads)
    emit_plotdata(out, summary)
    results = {
        "statistic": summary.statistic.value,
        "per_n": [_per_n_dict(p) for p in summary.per_n],
        **summary.extras,
    }
    _write_summary(out, cfg, results)
    top = summary.per_n[-1]
    return (f"counterexample d={d} n={cfg.n}: ks_p={top.ks_pvalue:.3g} "
            f"clt_rejected={summary.extras['clt_rejected']}")


def _cmd_whittle(cfg: ExperimentConfig, out: Path) -> str:
    if cfg.series is not None:
        series = _read_column(Path(cfg.series))
    else:
        model = _build_model(cfg, cfg.n)
        innovation = innovation_by_name(cfg.innovation)
        series = simulate(model, innovation, cfg.n, cfg.seed).values
    n = series.size
    m = cfg.m if cfg.m is not None else int(n ** 0.65)
    result = whittle_mod.estimate_d(series, m)
    _write_csv(out / "objective.csv", ["d", "objective"], result.objective_curve)
    _write_summary(out, cfg, {
        "d_hat": result.d_hat,
        "m": result.m,
        "std_error": result.std_error,
        "n": int(n),
    })
    return f"whittle n={n} m={m}: d_hat={result.d_hat:.4f} se={result.std_error:.4f}"


def _cmd_prop2(cfg: ExperimentConfig, out: Path) -> str:
    sizes = cfg.sizes()
    model = _build_model(cfg, max(sizes))
    rows = mc_mod.run_dft_bias_decay_study(model, sizes, j_rule=lambda n: max(1, n // 8))
    _write_csv(out / "decay.csv",
               ["n", "j", "u_j", "second_moment", "f_value", "abs_error",
                "envelope", "ratio"],
               ((r.n, r.j, r.u_j, r.second_moment, r.f_value, r.abs_error,
                 r.envelope, r.ratio) for r in rows))
    ratios = [r.ratio for r in rows if r.ratio > 0]
    spread = max(ratios) / min(ratios) if ratios else float("inf")
    _write_summary(out, cfg, {"rows": [dataclasses.asdict(r) for r in rows],
                              "ratio_spread": spread})
    return f"dft bias decay over n={list(sizes)}: ratio spread = {spread:.3f}"


_HANDLERS = {
    "simulate": _cmd_simulate,
    "qform": _cmd_qform,
    "mc": _cmd_mc,
    "bounds": _cmd_bounds,
    "counterexample": _cmd_counterexample,
    "whittle": _cmd_whittle,
    "prop2": _cmd_prop2,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="master seed")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker count (speed only, never results)")
    parser.add_argument("--n", type=int, default=None, help="sample size")
    parser.add_argument("--replications", type=int, default=None)
    parser.add_argument("--statistic", type=str, default=None)
    parser.add_argument("--m", type=int, default=None, help="whittle bandwidth")
    parser.add_argument("--series", type=str, default=None,
                        help="one-column CSV input series (whittle)")


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    text = ""
    if args.config is not None:
        text = Path(args.config).read_text()
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ParseError("top-level configuration must be a JSON object")
    raw["command"] = args.command
    for key in ("seed", "out", "threads", "n", "replications", "statistic",
                "m", "series"):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    return parse_config(json.dumps(raw))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="specforms",
        description="weighted periodogram sum experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        _add_common(sub.add_parser(name))
    args = parser.parse_args(argv)

    try:
        cfg = _resolve(args)
    except (ParseError, ValidationError, DomainError, NonCausalAR) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        line = _HANDLERS[cfg.command](cfg, out)
    except (ParseError, ValidationError, DomainError, NonCausalAR) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
