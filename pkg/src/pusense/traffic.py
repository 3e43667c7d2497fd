"""Holding-time laws of the on/off primary-user traffic process.

Times are in milliseconds.  A status change that happens in real time
``((g - 1) * t_s, g * t_s]`` is attributed to sample ``g``; the change-sample
PMF is therefore a first difference of the holding-time CDF on the sample grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import DomainError
from .numerics import erfc, reg_lower_gamma

__all__ = [
    "KINDS",
    "DEFAULT_SHAPES",
    "HoldingDist",
    "TrafficModel",
    "cdf",
    "change_pmf",
    "survival_beyond",
    "cdf_grid",
    "from_mean",
    "sample_holding",
]

Kind = Literal["exponential", "lognormal", "gamma", "erlang"]
KINDS: tuple[str, ...] = ("exponential", "lognormal", "gamma", "erlang")

# lognormal sigma, gamma shape k, erlang stage count m
DEFAULT_SHAPES: dict[str, float] = {"lognormal": 0.5, "gamma": 2.0, "erlang": 2}

_PARAM_NAMES = {
    "exponential": ("rate",),
    "lognormal": ("mu", "sigma"),
    "gamma": ("shape", "scale"),
    "erlang": ("shape", "rate"),
}


@dataclass(frozen=True)
class HoldingDist:
    """A parametric holding-time law.

    ``params`` holds, per kind: exponential ``(rate,)``; lognormal
    ``(mu, sigma)`` of the underlying normal, where mu may be any real;
    gamma ``(shape, scale)``; erlang ``(shape, rate)`` with integer shape.
    """

    kind: str
    params: tuple[float, ...]
    mean: float = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in _PARAM_NAMES:
            raise DomainError(f"unknown holding-time kind {self.kind!r}")
        names = _PARAM_NAMES[self.kind]
        if len(self.params) != len(names):
            raise DomainError(f"{self.kind} takes parameters {names}, got {self.params}")
        for name, value in zip(names, self.params):
            if name == "mu":
                if not math.isfinite(value):
                    raise DomainError(f"lognormal mu must be finite, got {value}")
                continue
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{self.kind} parameter {name} must be positive, got {value}")
        if self.kind == "erlang" and float(self.params[0]) != int(self.params[0]):
            raise DomainError(f"erlang shape must be an integer, got {self.params[0]}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "mean", _analytic_mean(self.kind, self.params))

    @property
    def shape_param(self) -> float | None:
        """The free shape parameter (sigma, k or m), or None for exponential."""
        if self.kind == "lognormal":
            return self.params[1]
        if self.kind in ("gamma", "erlang"):
            return self.params[0]
        return None

    def describe(self) -> dict:
        return {"kind": self.kind, "mean": self.mean, "shape": self.shape_param,
                **dict(zip(_PARAM_NAMES[self.kind], self.params))}


def _analytic_mean(kind: str, params: tuple[float, ...]) -> float:
    if kind == "exponential":
        return 1.0 / params[0]
    if kind == "lognormal":
        mu, sigma = params
        return math.exp(mu + 0.5 * sigma * sigma)
    if kind == "gamma":
        return params[0] * params[1]
    return params[0] / params[1]


@dataclass(frozen=True)
class TrafficModel:
    """Idle law (ends in an arrival), busy law (ends in a departure), and the
    probability ``p_b`` that the channel is busy when sensing starts."""

    idle: HoldingDist
    busy: HoldingDist
    p_b: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_b <= 1.0:
            raise DomainError(f"p_b must lie in [0, 1], got {self.p_b}")

    @property
    def p_e(self) -> float:
        return 1.0 - self.p_b

    def law(self, busy: bool) -> HoldingDist:
        """Law of the interval currently running in the given state."""
        return self.busy if busy else self.idle

    def prior(self, busy: bool) -> float:
        return self.p_b if busy else self.p_e


def cdf(dist: HoldingDist, t):
    """CDF of ``dist`` at ``t`` milliseconds (scalar or array)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("holding-time CDF requires t >= 0")
    if dist.kind == "exponential":
        out = -np.expm1(-dist.params[0] * arr)
    elif dist.kind == "lognormal":
        mu, sigma = dist.params
        pos = arr > 0
        z = np.zeros_like(arr)
        z[pos] = (np.log(arr[pos]) - mu) / (sigma * math.sqrt(2.0))
        out = np.where(pos, 0.5 * erfc(-z), 0.0)
    else:
        if dist.kind == "gamma":
            k, scale = dist.params
        else:
            k, scale = dist.params[0], 1.0 / dist.params[1]
        flat = [reg_lower_gamma(k, v / scale) for v in arr.ravel()]
        out = np.asarray(flat, dtype=float).reshape(arr.shape)
    if out.ndim == 0:
        return float(out)
    return out


def change_pmf(dist: HoldingDist, gap: int, t_s: float) -> float:
    """Probability that a holding time ends in sample ``gap``.

    ``F(gap * t_s) - F((gap - 1) * t_s)``; ``gap`` counts samples from the
    start of the interval (or from sample 0, for absolute indexing).
    """
    if gap < 1:
        raise DomainError(f"gap must be >= 1, got {gap}")
    _check_ts(t_s)
    return cdf(dist, gap * t_s) - cdf(dist, (gap - 1) * t_s)


def survival_beyond(dist: HoldingDist, gap: int, t_s: float) -> float:
    """Probability that a holding time outlasts ``gap`` samples."""
    if gap < 0:
        raise DomainError(f"gap must be >= 0, got {gap}")
    _check_ts(t_s)
    return 1.0 - cdf(dist, gap * t_s)


@lru_cache(maxsize=256)
def cdf_grid(dist: HoldingDist, samples: int, t_s: float) -> np.ndarray:
    """``F(g * t_s)`` for ``g = 0..samples`` as a read-only array (cached)."""
    _check_ts(t_s)
    out = cdf(dist, np.arange(samples + 1, dtype=float) * t_s)
    out.setflags(write=False)
    return out


def _check_ts(t_s: float) -> None:
    if not t_s > 0:
        raise DomainError(f"sample duration must be positive, got {t_s}")


def from_mean(kind: str, mean: float, shape_hint: float | None = None) -> HoldingDist:
    """Build a law of the given kind with the requested mean.

    ``shape_hint`` is sigma for lognormal, k for gamma and m for erlang;
    when omitted the entries of ``DEFAULT_SHAPES`` are used.  Ignored for
    the exponential law.
    """
    if not (mean > 0 and math.isfinite(mean)):
        raise DomainError(f"mean must be positive, got {mean}")
    if kind not in _PARAM_NAMES:
        raise DomainError(f"unknown holding-time kind {kind!r}")
    if kind == "exponential":
        return HoldingDist(kind, (1.0 / mean,))
    shape = DEFAULT_SHAPES[kind] if shape_hint is None else shape_hint
    if not shape > 0:
        raise DomainError(f"shape for {kind} must be positive, got {shape}")
    if kind == "lognormal":
        return HoldingDist(kind, (math.log(mean) - 0.5 * shape * shape, shape))
    if kind == "gamma":
        return HoldingDist(kind, (shape, mean / shape))
    if float(shape) != int(shape):
        raise DomainError(f"erlang shape must be an integer, got {shape}")
    return HoldingDist(kind, (int(shape), int(shape) / mean))


def sample_holding(dist: HoldingDist, rng: np.random.Generator, size=None):
    """Draw holding times (ms) from ``dist``.

    Exponential draws invert the CDF, Erlang draws sum exponential stages, and
    gamma/lognormal use numpy's standard generators.
    """
    if dist.kind == "exponential":
        u = rng.random(size)
        # 1 - u lies in (0, 1], so the log is finite
        return -np.log1p(-u) / dist.params[0]
    if dist.kind == "erlang":
        m, rate = int(dist.params[0]), dist.params[1]
        shape = (m,) if size is None else (m, *np.atleast_1d(size))
        stages = -np.log1p(-rng.random(shape)) / rate
        return stages.sum(axis=0)
    if dist.kind == "gamma":
        return rng.gamma(dist.params[0], dist.params[1], size)
    return rng.lognormal(dist.params[0], dist.params[1], size)
