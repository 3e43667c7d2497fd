"""Experiment configuration files (YAML) and their validation.

Every section is checked against a fixed key set before any computation, and
library preconditions are evaluated eagerly so that a bad value surfaces as
a :class:`ConfigError` naming the offending key.
"""

from __future__ import annotations

import copy
import math
from pathlib import Path
from typing import Any

import yaml

from .detector import SensingConfig
from .errors import PuSenseError
from .hypothesis import MODES
from .traffic import DEFAULT_SHAPES, KINDS, TrafficModel, from_mean

__all__ = ["ConfigError", "DEFAULTS", "load_config", "resolve", "build_model", "build_sensing"]


class ConfigError(PuSenseError):
    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


_LAW = {"kind": "exponential", "mean": 5.0, "shape": None}

DEFAULTS: dict[str, Any] = {
    "traffic": {"p_b": 0.5, "idle": dict(_LAW), "busy": dict(_LAW)},
    "sensing": {"I": 20, "t_s": 1.0, "snr_db": -5.0, "N": 4, "mode": "renewal"},
    "roc": {"N": None, "eta": None, "points": 201},
    "threshold": {"target_pd": 0.9, "snr_db": [-20.0, -15.0, -10.0, -5.0, 0.0],
                  "N": [0, 1, 2, 3, 4]},
    "models": {"kinds": list(KINDS), "mean": 5.0, "N": 5, "shapes": {}, "eta": None,
               "points": 201},
    "validate": {"trials": 200_000, "seed": None, "eta": None, "points": 10,
                 "modes": ["gaussian_surrogate", "full_sample"], "timing": "continuous",
                 "sigma": 3.0, "surrogate_floor": 0.0, "clt_budget": 0.03},
    "throughput": {"T": 100.0, "tau": None, "gamma_s": 10.0, "target_pd": 0.9, "eta": None},
    "output": None,
}


def _merge(defaults: dict, given: dict, prefix: str) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        path = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigError(path, "unknown key")
        if isinstance(defaults[key], dict) and key != "shapes":
            if not isinstance(value, dict):
                raise ConfigError(path, "expected a mapping")
            out[key] = _merge(defaults[key], value, path + ".")
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None) -> dict:
    """Read a YAML file (or use defaults when ``path`` is None) and resolve it."""
    raw: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc}") from exc
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError("--config", f"invalid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("--config", "top level must be a mapping")
    return resolve(raw)


def resolve(raw: dict) -> dict:
    """Merge ``raw`` over the defaults and validate it."""
    cfg = _merge(DEFAULTS, raw, "")
    build_model(cfg)
    build_sensing(cfg)
    _check_common(cfg)
    return cfg


def _number(cfg_value, key: str, *, positive: bool = False, integer: bool = False) -> float:
    if isinstance(cfg_value, bool) or not isinstance(cfg_value, (int, float)):
        raise ConfigError(key, f"expected a number, got {cfg_value!r}")
    if not math.isfinite(cfg_value):
        raise ConfigError(key, "must be finite")
    if integer and int(cfg_value) != cfg_value:
        raise ConfigError(key, f"expected an integer, got {cfg_value!r}")
    if positive and not cfg_value > 0:
        raise ConfigError(key, f"must be positive, got {cfg_value!r}")
    return int(cfg_value) if integer else float(cfg_value)


def _law(section: dict, key: str, shape_override: float | None = None):
    kind = section["kind"]
    if kind not in KINDS:
        raise ConfigError(f"{key}.kind", f"must be one of {KINDS}, got {kind!r}")
    mean = _number(section["mean"], f"{key}.mean", positive=True)
    shape = section["shape"] if shape_override is None else shape_override
    if shape is not None:
        shape = _number(shape, f"{key}.shape", positive=True, integer=(kind == "erlang"))
    try:
        return from_mean(kind, mean, shape)
    except PuSenseError as exc:
        raise ConfigError(key, str(exc)) from exc


def build_model(cfg: dict, kind: str | None = None, mean: float | None = None,
                shape: float | None = None) -> TrafficModel:
    """Traffic model from the ``traffic`` section, optionally overriding both laws."""
    t = cfg["traffic"]
    p_b = _number(t["p_b"], "traffic.p_b")
    if not 0 <= p_b <= 1:
        raise ConfigError("traffic.p_b", f"must lie in [0, 1], got {p_b}")
    if kind is None:
        idle = _law(t["idle"], "traffic.idle")
        busy = _law(t["busy"], "traffic.busy")
    else:
        law = {"kind": kind, "mean": mean, "shape": shape}
        idle = busy = _law(law, f"models.{kind}")
    return TrafficModel(idle, busy, p_b)


def build_sensing(cfg: dict, **overrides) -> SensingConfig:
    s = {**cfg["sensing"], **overrides}
    I = _number(s["I"], "sensing.I", positive=True, integer=True)
    t_s = _number(s["t_s"], "sensing.t_s", positive=True)
    snr = _number(s["snr_db"], "sensing.snr_db")
    N = _number(s["N"], "sensing.N", integer=True)
    if not 0 <= N <= I:
        raise ConfigError("sensing.N", f"must lie in [0, I={I}], got {N}")
    if s["mode"] not in MODES:
        raise ConfigError("sensing.mode", f"must be one of {MODES}, got {s['mode']!r}")
    return SensingConfig(I, t_s, snr, N, s["mode"])


def _int_list(value, key: str, lo: int, hi: int) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ConfigError(key, "expected a nonempty list")
    out = []
    for v in value:
        n = _number(v, key, integer=True)
        if not lo <= n <= hi:
            raise ConfigError(key, f"value {n} outside [{lo}, {hi}]")
        out.append(n)
    return out


def _float_list(value, key: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(key, "expected a nonempty list")
    return [_number(v, key) for v in value]


def _check_common(cfg: dict) -> None:
    I = cfg["sensing"]["I"]
    roc = cfg["roc"]
    if roc["N"] is not None:
        _int_list(roc["N"], "roc.N", 0, I)
    if roc["eta"] is not None:
        eta = _float_list(roc["eta"], "roc.eta")
        if any(b > a for a, b in zip(eta, eta[1:])):
            raise ConfigError("roc.eta", "must be sorted in descending order")
    _number(roc["points"], "roc.points", positive=True, integer=True)

    th = cfg["threshold"]
    tp = _number(th["target_pd"], "threshold.target_pd")
    if not 0 < tp < 1:
        raise ConfigError("threshold.target_pd", f"must lie in (0, 1), got {tp}")
    _float_list(th["snr_db"], "threshold.snr_db")
    _int_list(th["N"], "threshold.N", 0, I)

    md = cfg["models"]
    if not isinstance(md["kinds"], list) or not md["kinds"]:
        raise ConfigError("models.kinds", "expected a nonempty list")
    for k in md["kinds"]:
        if k not in KINDS:
            raise ConfigError("models.kinds", f"unknown model {k!r}; allowed {KINDS}")
    _number(md["mean"], "models.mean", positive=True)
    n = _number(md["N"], "models.N", integer=True)
    if not 0 <= n <= I:
        raise ConfigError("models.N", f"must lie in [0, I={I}], got {n}")
    if not isinstance(md["shapes"], dict):
        raise ConfigError("models.shapes", "expected a mapping")
    for k, v in md["shapes"].items():
        if k not in DEFAULT_SHAPES:
            raise ConfigError(f"models.shapes.{k}", "unknown key")
        _number(v, f"models.shapes.{k}", positive=True, integer=(k == "erlang"))
    if md["eta"] is not None:
        eta = _float_list(md["eta"], "models.eta")
        if any(b > a for a, b in zip(eta, eta[1:])):
            raise ConfigError("models.eta", "must be sorted in descending order")
    _number(md["points"], "models.points", positive=True, integer=True)

    va = cfg["validate"]
    _number(va["trials"], "validate.trials", positive=True, integer=True)
    if va["seed"] is not None:
        seed = _number(va["seed"], "validate.seed", integer=True)
        if seed < 0:
            raise ConfigError("validate.seed", "must be nonnegative")
    if va["eta"] is not None:
        _float_list(va["eta"], "validate.eta")
    _number(va["points"], "validate.points", positive=True, integer=True)
    if not isinstance(va["modes"], list) or not va["modes"]:
        raise ConfigError("validate.modes", "expected a nonempty list")
    for m in va["modes"]:
        if m not in ("gaussian_surrogate", "full_sample"):
            raise ConfigError("validate.modes", f"unknown mode {m!r}")
    if va["timing"] not in ("continuous", "aligned"):
        raise ConfigError("validate.timing", f"unknown timing {va['timing']!r}")
    _number(va["sigma"], "validate.sigma", positive=True)
    _number(va["surrogate_floor"], "validate.surrogate_floor")
    _number(va["clt_budget"], "validate.clt_budget", positive=True)

    tp_ = cfg["throughput"]
    T = _number(tp_["T"], "throughput.T", positive=True)
    if tp_["tau"] is not None:
        for tau in _float_list(tp_["tau"], "throughput.tau"):
            if not 0 < tau <= T:
                raise ConfigError("throughput.tau", f"value {tau} outside (0, T={T}]")
    g = _number(tp_["gamma_s"], "throughput.gamma_s")
    if g < 0:
        raise ConfigError("throughput.gamma_s", "must be nonnegative")
    t = _number(tp_["target_pd"], "throughput.target_pd")
    if not 0 < t < 1:
        raise ConfigError("throughput.target_pd", f"must lie in (0, 1), got {t}")
    if tp_["eta"] is not None:
        _number(tp_["eta"], "throughput.eta")

    if cfg["output"] is not None and not isinstance(cfg["output"], str):
        raise ConfigError("output", "expected a path string")
