"""Energy-detector probabilities averaged over primary-user change patterns.

With unit noise variance and a constant per-sample signal power ``gamma_p``,
the detector output over ``I`` samples of which ``b`` carry the signal is
approximated as Gaussian with mean ``I + b*gamma_p`` and variance
``2I + 4b*gamma_p``.  False-alarm and detection probabilities are the
exceedance probabilities of that Gaussian, averaged over the weight tables
of terminal-idle and terminal-busy patterns respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DegenerateModelError, DomainError
from .hypothesis import MODES, WeightTable, weight_table
from .numerics import Tolerance, bisect, erfc
from .traffic import TrafficModel

__all__ = [
    "SensingConfig",
    "OperatingPoint",
    "RocCurve",
    "db_to_linear",
    "cond_stats",
    "cond_prob_exceed",
    "uncond_pfa",
    "uncond_pd",
    "build_tables",
    "np_threshold",
    "pfa_threshold",
    "pd_at_pfa",
    "default_eta_grid",
    "roc",
    "throughput",
]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SensingConfig:
    """Sensing window and detector setup.

    Attributes:
        I: samples in the sensing window.
        t_s: sample duration in ms.
        snr_db: received primary SNR per sample, in dB.
        N: largest number of status changes kept in the analysis.
        mode: ``"renewal"`` or ``"literal"`` pattern weighting.
    """

    I: int
    t_s: float = 1.0
    snr_db: float = -5.0
    N: int = 0
    mode: str = "renewal"
    gamma_p: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.I) != self.I or self.I < 1:
            raise DomainError(f"I must be a positive integer, got {self.I}")
        if not self.t_s > 0:
            raise DomainError(f"t_s must be positive, got {self.t_s}")
        if int(self.N) != self.N or not 0 <= self.N <= self.I:
            raise DomainError(f"N must be an integer in [0, I], got {self.N}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not math.isfinite(self.snr_db):
            raise DomainError(f"snr_db must be finite, got {self.snr_db}")
        object.__setattr__(self, "gamma_p", db_to_linear(self.snr_db))

    @property
    def tau(self) -> float:
        """Sensing time in ms."""
        return self.I * self.t_s


@dataclass(frozen=True)
class OperatingPoint:
    eta: float
    pfa: float
    pd: float


@dataclass(frozen=True)
class RocCurve:
    points: tuple[OperatingPoint, ...]
    config: SensingConfig
    model: TrafficModel

    @property
    def eta(self) -> np.ndarray:
        return np.array([p.eta for p in self.points])

    @property
    def pfa(self) -> np.ndarray:
        return np.array([p.pfa for p in self.points])

    @property
    def pd(self) -> np.ndarray:
        return np.array([p.pd for p in self.points])


def cond_stats(b, I: int, gamma_p: float):
    """Gaussian mean and variance of the detector output with ``b`` busy samples."""
    b_arr = np.asarray(b)
    if np.any(b_arr < 0) or np.any(b_arr > I):
        raise DomainError(f"busy count must lie in [0, {I}], got {b}")
    if gamma_p < 0:
        raise DomainError(f"gamma_p must be nonnegative, got {gamma_p}")
    mean = I + b_arr * gamma_p
    var = 2.0 * I + 4.0 * b_arr * gamma_p
    if b_arr.ndim == 0:
        return float(mean), float(var)
    return mean, var


def cond_prob_exceed(eta, mean, variance):
    """``P(Y > eta)`` for ``Y ~ Normal(mean, variance)``; broadcasts."""
    var = np.asarray(variance, dtype=float)
    if np.any(var <= 0):
        raise DomainError("variance must be positive")
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(np.isnan(eta_arr)):
        raise DomainError("threshold is NaN")
    # infinite thresholds saturate; keep erfc on finite arguments
    z = (eta_arr - mean) / np.sqrt(2.0 * var)
    z = np.clip(z, -40.0, 40.0)
    return 0.5 * erfc(z)


def _average(eta, table: WeightTable, config: SensingConfig):
    total = table.total
    if not total > 0:
        kind = "terminal-busy" if table.terminal_busy else "terminal-idle"
        raise DegenerateModelError(f"{kind} weight table has zero total weight")
    wb = table.by_busy_count
    bs = np.nonzero(wb)[0]
    mean, var = cond_stats(bs, table.I, config.gamma_p)
    eta_arr = np.asarray(eta, dtype=float)
    probs = cond_prob_exceed(eta_arr[..., None], mean, var)
    out = probs @ wb[bs] / total
    if np.ndim(out) == 0:
        return float(out)
    return out


def uncond_pfa(eta, table: WeightTable, config: SensingConfig):
    """Probability of false alarm averaged over terminal-idle patterns."""
    if table.terminal_busy:
        raise DomainError("uncond_pfa needs the terminal-idle table")
    return _average(eta, table, config)


def uncond_pd(eta, table: WeightTable, config: SensingConfig):
    """Probability of detection averaged over terminal-busy patterns."""
    if not table.terminal_busy:
        raise DomainError("uncond_pd needs the terminal-busy table")
    return _average(eta, table, config)


def build_tables(model: TrafficModel, config: SensingConfig) -> tuple[WeightTable, WeightTable]:
    """Terminal-idle and terminal-busy tables for ``config``."""
    idle = weight_table(model, config.I, config.t_s, config.N, False, config.mode)
    busy = weight_table(model, config.I, config.t_s, config.N, True, config.mode)
    return idle, busy


def _eta_bracket(config: SensingConfig, width: float = 10.0) -> tuple[float, float]:
    lo_mean, lo_var = cond_stats(0, config.I, config.gamma_p)
    hi_mean, hi_var = cond_stats(config.I, config.I, config.gamma_p)
    return lo_mean - width * math.sqrt(hi_var), hi_mean + width * math.sqrt(hi_var)


def _solve_eta(fn, target: float, config: SensingConfig, tol: Tolerance) -> float:
    lo, hi = _eta_bracket(config)
    try:
        return bisect(lambda e: fn(e) - target, lo, hi, tol)
    except Exception as exc:  # BracketError or ConvergenceError
        raise ConvergenceError(f"threshold search failed for target {target}: {exc}") from exc


def np_threshold(model: TrafficModel, config: SensingConfig, target_pd: float = 0.9,
                 tables: tuple[WeightTable, WeightTable] | None = None,
                 tol: Tolerance | None = None) -> OperatingPoint:
    """Threshold giving the requested detection probability, and its false-alarm rate."""
    if not 0.0 < target_pd < 1.0:
        raise DomainError(f"target_pd must lie in (0, 1), got {target_pd}")
    idle, busy = tables or build_tables(model, config)
    tol = tol or Tolerance(abs_tol=1e-12, max_iter=300)
    eta = _solve_eta(lambda e: uncond_pd(e, busy, config), target_pd, config, tol)
    return OperatingPoint(eta, uncond_pfa(eta, idle, config), uncond_pd(eta, busy, config))


def pfa_threshold(model: TrafficModel, config: SensingConfig, target_pfa: float,
                  tables: tuple[WeightTable, WeightTable] | None = None,
                  tol: Tolerance | None = None) -> OperatingPoint:
    """Threshold giving the requested false-alarm probability."""
    if not 0.0 < target_pfa < 1.0:
        raise DomainError(f"target_pfa must lie in (0, 1), got {target_pfa}")
    idle, busy = tables or build_tables(model, config)
    tol = tol or Tolerance(abs_tol=1e-12, max_iter=300)
    eta = _solve_eta(lambda e: uncond_pfa(e, idle, config), target_pfa, config, tol)
    return OperatingPoint(eta, uncond_pfa(eta, idle, config), uncond_pd(eta, busy, config))


def pd_at_pfa(model: TrafficModel, config: SensingConfig, pfa: float) -> float:
    """Detection probability of the ROC at a given false-alarm probability."""
    return pfa_threshold(model, config, pfa).pd


def default_eta_grid(config: SensingConfig, points: int = 201, width: float = 6.0) -> np.ndarray:
    """Descending thresholds spanning mean +- ``width`` sd of the extreme classes."""
    lo_mean, lo_var = cond_stats(0, config.I, config.gamma_p)
    hi_mean, hi_var = cond_stats(config.I, config.I, config.gamma_p)
    return np.linspace(hi_mean + width * math.sqrt(hi_var),
                       lo_mean - width * math.sqrt(lo_var), points)


def roc(model: TrafficModel, config: SensingConfig,
        eta_grid: Sequence[float] | np.ndarray | None = None) -> RocCurve:
    """ROC points, one per threshold, for a descending threshold grid."""
    grid = default_eta_grid(config) if eta_grid is None else np.asarray(eta_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("eta grid must be a nonempty 1-d sequence")
    if np.any(np.diff(grid) > 0):
        raise DomainError("eta grid must be sorted in descending order")
    idle, busy = build_tables(model, config)
    pfa = np.atleast_1d(uncond_pfa(grid, idle, config))
    pd = np.atleast_1d(uncond_pd(grid, busy, config))
    points = tuple(OperatingPoint(float(e), float(f), float(d)) for e, f, d in zip(grid, pfa, pd))
    return RocCurve(points, config, model)


def throughput(model: TrafficModel, config: SensingConfig, T: float, tau: float,
               gamma_s: float, eta: float,
               tables: tuple[WeightTable, WeightTable] | None = None) -> float:
    """Secondary-user throughput in bit/s/Hz for one frame of length ``T`` ms.

    The idle and busy hypothesis probabilities are the (N-truncated) table
    totals; ``tau`` must equal ``config.I * config.t_s``.
    """
    if not T > 0:
        raise DomainError(f"frame length must be positive, got {T}")
    if not 0 < tau <= T:
        raise DomainError(f"need 0 < tau <= T, got tau={tau}, T={T}")
    if not math.isclose(tau, config.tau, rel_tol=1e-9):
        raise DomainError(f"tau={tau} does not match I*t_s={config.tau}")
    if gamma_s < 0:
        raise DomainError(f"gamma_s must be nonnegative, got {gamma_s}")
    idle, busy = tables or build_tables(model, config)
    pfa = uncond_pfa(eta, idle, config)
    pd = uncond_pd(eta, busy, config)
    frac = (T - tau) / T
    idle_rate = idle.total * (1.0 - pfa) * math.log2(1.0 + gamma_s)
    busy_rate = busy.total * (1.0 - pd) * math.log2(1.0 + gamma_s / (1.0 + config.gamma_p))
    return (idle_rate + busy_rate) * frac
