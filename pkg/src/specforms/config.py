"""Experiment configuration: JSON parsing, validation, defaults, round-trip."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import ParseError, ValidationError

COMMANDS = ("simulate", "qform", "mc", "bounds", "counterexample", "whittle", "prop2")
INNOVATION_NAMES = ("gaussian", "centered_exponential", "uniform", "rademacher")
MODEL_KINDS = ("white_noise", "ma", "arfima", "fractional_of_short_memory")
WEIGHT_KINDS = ("uniform", "indicator", "cosine", "kernel_at", "local_whittle",
                "counterexample", "custom")
STATISTICS = ("std_s", "std_q", "residual", "bias_s", "bias_q", "s_zeta", "q_zeta")

SCHEMA_VERSION = 1


@dataclass
class ModelConfig:
    kind: str = "white_noise"
    d: float = 0.0
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    truncation_k: int | None = None
    short_coeffs: tuple[float, ...] = ()


@dataclass
class WeightsConfig:
    kind: str = "uniform"
    y: float | None = None
    lag: int | None = None
    u0: float | None = None
    bandwidth: float | None = None
    m: int | None = None
    d: float | None = None
    path: str | None = None


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description; every field has a default."""

    command: str = "mc"
    model: ModelConfig = field(default_factory=ModelConfig)
    innovation: str = "gaussian"
    weights: WeightsConfig = field(default_factory=WeightsConfig)
    n: int = 1024
    n_grid: tuple[int, ...] | None = None
    replications: int = 1000
    seed: int = 1
    statistic: str = "std_s"
    m: int | None = None
    series: str | None = None
    include_nyquist: bool = False
    theta_band: float | None = None
    out: str = "out"
    threads: int = 1

    def sizes(self) -> tuple[int, ...]:
        return tuple(self.n_grid) if self.n_grid else (self.n,)


_MODEL_KEYS = {"kind", "d", "ar", "ma", "truncation_k", "short_coeffs"}
_WEIGHT_KEYS = {"kind", "y", "lag", "u0", "bandwidth", "m", "d", "path"}
_TOP_KEYS = {"command", "model", "innovation", "weights", "n", "n_grid",
             "replications", "seed", "statistic", "m", "series",
             "include_nyquist", "theta_band", "out", "threads"}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def _as_float_tuple(value, key: str) -> tuple[float, ...]:
    _require(isinstance(value, (list, tuple)), f"{key}: expected a list")
    return tuple(float(v) for v in value)


def _parse_model(raw: dict) -> ModelConfig:
    unknown = set(raw) - _MODEL_KEYS
    _require(not unknown, f"model: unknown keys {sorted(unknown)}")
    cfg = ModelConfig()
    cfg.kind = raw.get("kind", cfg.kind)
    _require(cfg.kind in MODEL_KINDS, f"model.kind: must be one of {MODEL_KINDS}")
    if "d" in raw:
        cfg.d = float(raw["d"])
    if "ar" in raw:
        cfg.ar = _as_float_tuple(raw["ar"], "model.ar")
    if "ma" in raw:
        cfg.ma = _as_float_tuple(raw["ma"], "model.ma")
    if "short_coeffs" in raw:
        cfg.short_coeffs = _as_float_tuple(raw["short_coeffs"], "model.short_coeffs")
    if raw.get("truncation_k") is not None:
        cfg.truncation_k = int(raw["truncation_k"])
        _require(cfg.truncation_k >= 1, "model.truncation_k: must be >= 1")
    _require(abs(cfg.d) < 0.5, "model.d: |d| < 1/2")
    return cfg


def _parse_weights(raw: dict) -> WeightsConfig:
    unknown = set(raw) - _WEIGHT_KEYS
    _require(not unknown, f"weights: unknown keys {sorted(unknown)}")
    cfg = WeightsConfig()
    cfg.kind = raw.get("kind", cfg.kind)
    _require(cfg.kind in WEIGHT_KINDS, f"weights.kind: must be one of {WEIGHT_KINDS}")
    for key in ("y", "u0", "bandwidth", "d"):
        if raw.get(key) is not None:
            setattr(cfg, key, float(raw[key]))
    for key in ("lag", "m"):
        if raw.get(key) is not None:
            setattr(cfg, key, int(raw[key]))
    if raw.get("path") is not None:
        cfg.path = str(raw["path"])
    if cfg.kind == "indicator":
        _require(cfg.y is not None and 0.0 < cfg.y <= 3.14159265358979 + 1e-9,
                 "weights.y: threshold must lie in (0, pi]")
    if cfg.kind == "cosine":
        _require(cfg.lag is not None and cfg.lag >= 0, "weights.lag: must be >= 0")
    if cfg.kind == "kernel_at":
        _require(cfg.u0 is not None, "weights.u0: required for kernel_at")
    if cfg.kind == "local_whittle":
        _require(cfg.m is not None and cfg.m >= 1, "weights.m: must be >= 1")
    if cfg.kind == "counterexample":
        _require(cfg.d is not None and 0.25 < cfg.d < 0.5,
                 "weights.d: must lie in (1/4, 1/2)")
    if cfg.kind == "custom":
        _require(cfg.path is not None, "weights.path: required for custom weights")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse JSON configuration text into a fully validated config.

    Unknown keys are errors; missing keys take documented defaults
    (white noise, Gaussian innovations, uniform weights, n=1024, R=1000,
    seed=1).
    """
    stripped = text.strip()
    if not stripped:
        raw = {}
    else:
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ParseError("top-level configuration must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    _require(not unknown, f"unknown keys {sorted(unknown)}")

    cfg = ExperimentConfig()
    if "command" in raw:
        cfg.command = str(raw["command"])
        _require(cfg.command in COMMANDS, f"command: must be one of {COMMANDS}")
    if "model" in raw:
        _require(isinstance(raw["model"], dict), "model: expected an object")
        cfg.model = _parse_model(raw["model"])
    if "innovation" in raw:
        cfg.innovation = str(raw["innovation"])
        _require(cfg.innovation in INNOVATION_NAMES,
                 f"innovation: must be one of {INNOVATION_NAMES}")
    if "weights" in raw:
        _require(isinstance(raw["weights"], dict), "weights: expected an object")
        cfg.weights = _parse_weights(raw["weights"])
    if "n" in raw:
        cfg.n = int(raw["n"])
        _require(cfg.n >= 8, "n: must be >= 8")
    if raw.get("n_grid") is not None:
        _require(isinstance(raw["n_grid"], list) and raw["n_grid"],
                 "n_grid: expected a nonempty list")
        cfg.n_grid = tuple(int(v) for v in raw["n_grid"])
        _require(all(v >= 8 for v in cfg.n_grid), "n_grid: every n must be >= 8")
    if "replications" in raw:
        cfg.replications = int(raw["replications"])
        _require(cfg.replications >= 1, "replications: must be >= 1")
    if "seed" in raw:
        cfg.seed = int(raw["seed"])
    if "statistic" in raw:
        cfg.statistic = str(raw["statistic"])
        _require(cfg.statistic in STATISTICS,
                 f"statistic: must be one of {STATISTICS}")
    if raw.get("m") is not None:
        cfg.m = int(raw["m"])
        _require(cfg.m >= 1, "m: must be >= 1")
    if raw.get("series") is not None:
        cfg.series = str(raw["series"])
    if "include_nyquist" in raw:
        _require(isinstance(raw["include_nyquist"], bool),
                 "include_nyquist: must be a boolean")
        cfg.include_nyquist = raw["include_nyquist"]
    if raw.get("theta_band") is not None:
        cfg.theta_band = float(raw["theta_band"])
        _require(0.0 < cfg.theta_band < 0.5, "theta_band: must lie in (0, 1/2)")
    if "out" in raw:
        cfg.out = str(raw["out"])
    if "threads" in raw:
        cfg.threads = int(raw["threads"])
        _require(cfg.threads >= 1, "threads: must be >= 1")

    _resolve_counterexample(cfg)
    _validate_cross_fields(cfg)
    return cfg


def _resolve_counterexample(cfg: ExperimentConfig) -> None:
    # the counterexample command pins its scheme and a matching long-memory
    # model; fill both in so the dumped config is self-describing
    if cfg.command != "counterexample":
        return
    if cfg.weights.kind != "counterexample":
        d = cfg.model.d if 0.25 < cfg.model.d < 0.5 else 0.3
        cfg.weights = WeightsConfig(kind="counterexample", d=d)
    if not 0.25 < cfg.model.d < 0.5:
        cfg.model = ModelConfig(kind="arfima", d=cfg.weights.d,
                                truncation_k=cfg.model.truncation_k)


def _validate_cross_fields(cfg: ExperimentConfig) -> None:
    smallest = min(cfg.sizes())
    nu = smallest // 2 - 1
    if cfg.weights.kind == "local_whittle":
        _require(cfg.weights.m <= nu,
                 f"weights.m: m={cfg.weights.m} exceeds nu={nu} at n={smallest}")
    if cfg.command == "whittle" and cfg.m is not None:
        _require(8 <= cfg.m, "m: whittle bandwidth must be >= 8")
        if cfg.series is None:
            _require(cfg.m <= nu, f"m: bandwidth exceeds nu={nu} at n={smallest}")
    if cfg.command in ("mc", "counterexample"):
        _require(cfg.replications >= 100, "replications: must be >= 100 for mc studies")
        _require(smallest >= 64, "n: must be >= 64 for mc studies")
    if cfg.command == "counterexample":
        d = cfg.weights.d if cfg.weights.kind == "counterexample" else cfg.model.d
        _require(d is not None and 0.25 < d < 0.5,
                 "counterexample: memory parameter must lie in (1/4, 1/2)")


def serialize_config(cfg: ExperimentConfig) -> str:
    """Stable JSON text that parse_config maps back to an equal config."""
    return json.dumps(config_to_dict(cfg), sort_keys=True, indent=2)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    raw = asdict(cfg)
    raw["model"]["ar"] = list(raw["model"]["ar"])
    raw["model"]["ma"] = list(raw["model"]["ma"])
    raw["model"]["short_coeffs"] = list(raw["model"]["short_coeffs"])
    if raw["n_grid"] is not None:
        raw["n_grid"] = list(raw["n_grid"])
    return raw
