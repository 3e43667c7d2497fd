"""Monte Carlo ground truth for the analytic detector probabilities.

Each trial draws an initial state, then alternating idle/busy holding times
starting fresh at time 0, maps every status change to the sample containing
it, and feeds the resulting busy/idle sample pattern into an energy
detector.

Trials are processed in fixed-size blocks.  Block ``j`` draws its traffic
from ``SeedSequence(seed, spawn_key=(j, 0))`` and its detector noise from
``spawn_key=(j, 1)``, so results do not depend on the number of worker
threads, and the two detector modes see identical traffic for a given seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .detector import SensingConfig, cond_stats
from .errors import DomainError, EstimationError
from .hypothesis import ChangePattern, busy_count
from .traffic import TrafficModel, sample_holding

__all__ = [
    "BLOCK_SIZE",
    "TrialRecord",
    "TraceBatch",
    "McEstimate",
    "gen_traces",
    "gen_trace",
    "run_trials",
]

BLOCK_SIZE = 8192

DetectorMode = Literal["full_sample", "gaussian_surrogate"]
Timing = Literal["continuous", "aligned"]
TIMINGS = ("continuous", "aligned")


@dataclass
class TrialRecord:
    initial_busy: bool
    change_samples: list[int]
    x: int
    terminal_busy: bool
    b: int
    Y: float | None = None
    decided_busy: bool | None = None
    discarded: bool = False


@dataclass
class TraceBatch:
    """Vectorised traffic traces for ``n`` trials.

    ``changes`` is ``(n, max_x)`` with ``-1`` padding.  ``coincident`` flags
    trials where two changes fell into the same sample; their ``x``/``b``
    are not meaningful.
    """

    initial_busy: np.ndarray
    terminal_busy: np.ndarray
    x: np.ndarray
    b: np.ndarray
    changes: np.ndarray
    coincident: np.ndarray

    def __len__(self) -> int:
        return self.x.shape[0]

    def busy_mask(self, I: int) -> np.ndarray:
        """Boolean ``(n, I)`` array, True where the PU occupies sample ``i``."""
        n = len(self)
        toggles = np.zeros((n, I + 2), dtype=np.int64)
        rows, cols = np.nonzero(self.changes >= 0)
        # a change at g flips the state from sample g + 1 (column g) onward
        np.add.at(toggles, (rows, self.changes[rows, cols]), 1)
        flips = np.cumsum(toggles[:, :I], axis=1) % 2
        return (flips == 1) ^ self.initial_busy[:, None]

    def record(self, k: int) -> TrialRecord:
        ch = [int(g) for g in self.changes[k] if g >= 0]
        return TrialRecord(bool(self.initial_busy[k]), ch, int(self.x[k]),
                           bool(self.terminal_busy[k]), int(self.b[k]),
                           discarded=bool(self.coincident[k]))


def gen_traces(model: TrafficModel, config: SensingConfig, n: int,
               rng: np.random.Generator, timing: Timing = "continuous") -> TraceBatch:
    """Simulate ``n`` independent traffic traces over the sensing window.

    With ``timing="continuous"`` holding times accumulate in real time and a
    change at time ``t`` lands in sample ``ceil(t / t_s)``; two changes in one
    sample flag the trial as coincident.  With ``timing="aligned"`` each
    holding time starts at the boundary of the sample holding the previous
    change, which is the discrete renewal process the analytic weights assume.
    """
    if timing not in TIMINGS:
        raise DomainError(f"timing must be one of {TIMINGS}, got {timing!r}")
    I, t_s = config.I, config.t_s
    initial = rng.random(n) < model.p_b
    state = initial.copy()
    t = np.zeros(n)
    last = np.zeros(n, dtype=np.int64)
    x = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    coincident = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    columns: list[np.ndarray] = []

    while active.any():
        idx = np.nonzero(active)[0]
        st = state[idx]
        d = np.empty(idx.size)
        busy_idx = np.nonzero(st)[0]
        idle_idx = np.nonzero(~st)[0]
        if busy_idx.size:
            d[busy_idx] = sample_holding(model.busy, rng, busy_idx.size)
        if idle_idx.size:
            d[idle_idx] = sample_holding(model.idle, rng, idle_idx.size)
        if timing == "continuous":
            t_new = t[idx] + d
            g = np.ceil(t_new / t_s).astype(np.int64)
        else:
            t_new = last[idx] * t_s + d
            g = last[idx] + np.ceil(d / t_s).astype(np.int64)

        col = np.full(n, -1, dtype=np.int64)
        ends = g > I
        clash = ~ends & (g <= last[idx])
        moves = ~ends & ~clash

        e = idx[ends]
        b[e] += np.where(state[e], I - last[e], 0)
        coincident[idx[clash]] = True

        m = idx[moves]
        gm = g[moves]
        b[m] += np.where(state[m], gm - last[m], 0)
        x[m] += 1
        state[m] = ~state[m]
        last[m] = gm
        t[m] = t_new[moves]
        col[m] = gm
        columns.append(col)

        active[idx[ends | clash]] = False

    changes = np.stack(columns, axis=1) if columns else np.zeros((n, 0), dtype=np.int64)
    if changes.shape[1]:
        changes = changes[:, (changes >= 0).any(axis=0)]
    return TraceBatch(initial, state.copy(), x, b, changes, coincident)


def gen_trace(model: TrafficModel, config: SensingConfig, rng: np.random.Generator,
              timing: Timing = "continuous") -> TrialRecord:
    """One trace as a :class:`TrialRecord` (no detector output yet)."""
    rec = gen_traces(model, config, 1, rng, timing).record(0)
    if not rec.discarded:
        assert rec.b == busy_count(ChangePattern(rec.initial_busy, tuple(rec.change_samples), config.I))
    return rec


@dataclass
class McEstimate:
    """Empirical detection statistics.

    ``pfa_hat``/``pd_hat`` and their standard errors are floats for a scalar
    threshold and arrays for a threshold sequence.  ``k2_histogram`` has
    shape ``(2, I + 1, I + 1)`` indexed ``[terminal_busy, x, b]`` and counts
    every non-coincident trial, including those with ``x > N``.
    """

    eta: float | np.ndarray
    pfa_hat: float | np.ndarray
    pd_hat: float | np.ndarray
    stderr_pfa: float | np.ndarray
    stderr_pd: float | np.ndarray
    trials_used_idle: int
    trials_used_busy: int
    trials_discarded: int
    trials_coincident: int
    k2_histogram: np.ndarray = field(repr=False)

    @property
    def trials_total(self) -> int:
        return self.trials_used_idle + self.trials_used_busy + self.trials_discarded

    def histogram(self, terminal_busy: bool) -> dict[tuple[int, int], int]:
        h = self.k2_histogram[int(terminal_busy)]
        xs, bs = np.nonzero(h)
        return {(int(x), int(b)): int(h[x, b]) for x, b in zip(xs, bs)}


@dataclass
class _BlockCounts:
    exceed_idle: np.ndarray
    exceed_busy: np.ndarray
    used_idle: int
    used_busy: int
    discarded: int
    coincident: int
    hist: np.ndarray


def _detector_output(traces: TraceBatch, config: SensingConfig, mode: str,
                     rng: np.random.Generator) -> np.ndarray:
    I = config.I
    n = len(traces)
    if mode == "gaussian_surrogate":
        b = np.clip(traces.b, 0, I)
        mean, var = cond_stats(b, I, config.gamma_p)
        return mean + np.sqrt(var) * rng.standard_normal(n)
    signal = math.sqrt(config.gamma_p) * traces.busy_mask(I)
    r = signal + rng.standard_normal((n, I))
    return np.einsum("ij,ij->i", r, r)


def _run_block(model: TrafficModel, config: SensingConfig, etas: np.ndarray, n: int,
               mode: str, seed_seq: np.random.SeedSequence, block: int,
               timing: Timing) -> _BlockCounts:
    traffic_rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed_seq.entropy, spawn_key=(*seed_seq.spawn_key, block, 0))))
    noise_rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed_seq.entropy, spawn_key=(*seed_seq.spawn_key, block, 1))))
    traces = gen_traces(model, config, n, traffic_rng, timing)
    Y = _detector_output(traces, config, mode, noise_rng)
    valid = ~traces.coincident
    kept = valid & (traces.x <= config.N)
    idle = kept & ~traces.terminal_busy
    busy = kept & traces.terminal_busy
    above = Y[:, None] > etas[None, :]
    hist = np.zeros((2, config.I + 1, config.I + 1), dtype=np.int64)
    np.add.at(hist, (traces.terminal_busy[valid].astype(np.int64),
                     traces.x[valid], traces.b[valid]), 1)
    return _BlockCounts(
        exceed_idle=above[idle].sum(axis=0),
        exceed_busy=above[busy].sum(axis=0),
        used_idle=int(idle.sum()),
        used_busy=int(busy.sum()),
        discarded=int((~kept).sum()),
        coincident=int((~valid).sum()),
        hist=hist,
    )


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)) and seed >= 0:
        return np.random.SeedSequence(int(seed))
    raise DomainError(f"seed must be a nonnegative integer or SeedSequence, got {seed!r}")


def run_trials(model: TrafficModel, config: SensingConfig, eta: float | Sequence[float],
               n: int, mode: DetectorMode = "gaussian_surrogate", seed=0,
               threads: int = 1, timing: Timing = "continuous") -> McEstimate:
    """Estimate false-alarm and detection probabilities by simulation.

    ``full_sample`` builds every received sample ``r_i = s_i + n_i`` with
    ``s_i = sqrt(gamma_p)`` on busy samples and sums ``r_i**2``;
    ``gaussian_surrogate`` draws the detector output from the Gaussian
    approximation for the trial's busy count.  Trials with more than
    ``config.N`` changes, or with coincident changes, are left out of both
    estimates and counted in ``trials_discarded``.

    Raises:
        EstimationError: no usable trial ended idle (or busy).
    """
    if n < 1:
        raise DomainError(f"need at least one trial, got {n}")
    if mode not in ("full_sample", "gaussian_surrogate"):
        raise DomainError(f"unknown detector mode {mode!r}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    scalar = np.ndim(eta) == 0
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    seed_seq = _as_seed_sequence(seed)
    sizes = [min(BLOCK_SIZE, n - start) for start in range(0, n, BLOCK_SIZE)]

    def work(j: int) -> _BlockCounts:
        return _run_block(model, config, etas, sizes[j], mode, seed_seq, j, timing)

    if threads == 1:
        blocks = [work(j) for j in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(work, range(len(sizes))))

    used_idle = sum(c.used_idle for c in blocks)
    used_busy = sum(c.used_busy for c in blocks)
    if used_idle == 0:
        raise EstimationError("no usable terminal-idle trials; cannot estimate pfa")
    if used_busy == 0:
        raise EstimationError("no usable terminal-busy trials; cannot estimate pd")
    pfa = sum(c.exceed_idle for c in blocks) / used_idle
    pd = sum(c.exceed_busy for c in blocks) / used_busy
    se_pfa = np.sqrt(pfa * (1.0 - pfa) / used_idle)
    se_pd = np.sqrt(pd * (1.0 - pd) / used_busy)
    if scalar:
        eta_out, pfa, pd, se_pfa, se_pd = (float(v[0]) for v in (etas, pfa, pd, se_pfa, se_pd))
    else:
        eta_out = etas
    return McEstimate(
        eta=eta_out,
        pfa_hat=pfa,
        pd_hat=pd,
        stderr_pfa=se_pfa,
        stderr_pd=se_pd,
        trials_used_idle=used_idle,
        trials_used_busy=used_busy,
        trials_discarded=sum(c.discarded for c in blocks),
        trials_coincident=sum(c.coincident for c in blocks),
        k2_histogram=sum(c.hist for c in blocks),
    )
