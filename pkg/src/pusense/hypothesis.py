"""Change patterns inside the sensing window and their occurrence weights.

A pattern is the initial channel state plus the strictly increasing samples
``g_1 < ... < g_x`` in ``[1, I]`` at which the state flips.  A change at
sample ``g`` takes effect from sample ``g + 1``, so the runs of constant state
are ``[1, g_1]``, ``[g_1 + 1, g_2]``, ..., ``[g_x + 1, I]``.

Two weighting conventions are supported:

``renewal``
    every holding interval restarts at the change that opened it; the PMF
    factor of change ``j`` is evaluated at the gap ``g_j - g_{j-1}`` and the
    final run contributes the survival ``1 - F(I - g_x)``.
``literal``
    factors are evaluated at the absolute change sample ``g_j`` and the final
    run contributes ``1 - (F(I) - F(g_x))``.

Both agree for ``x = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Literal

import numpy as np

from .errors import DomainError
from .traffic import TrafficModel, cdf_grid

__all__ = [
    "MODES",
    "ChangePattern",
    "WeightTable",
    "busy_count",
    "pattern_weight",
    "enumerate_patterns",
    "weight_table",
    "naive_weight_table",
]

Mode = Literal["renewal", "literal"]
MODES = ("renewal", "literal")


@dataclass(frozen=True)
class ChangePattern:
    initial_busy: bool
    changes: tuple[int, ...]
    I: int

    def __post_init__(self) -> None:
        if self.I < 1:
            raise DomainError(f"window length must be >= 1, got {self.I}")
        changes = tuple(int(g) for g in self.changes)
        object.__setattr__(self, "changes", changes)
        prev = 0
        for g in changes:
            if g <= prev or g > self.I:
                raise DomainError(
                    f"changes must be strictly increasing within [1, {self.I}], got {changes}")
            prev = g

    @property
    def x(self) -> int:
        return len(self.changes)

    @property
    def terminal_busy(self) -> bool:
        return self.initial_busy ^ (self.x % 2 == 1)

    @cached_property
    def b(self) -> int:
        return busy_count(self)

    def runs(self) -> Iterator[tuple[bool, int, int]]:
        """Yield ``(busy, start_boundary, end_boundary)`` for each run.

        The run covers samples ``start_boundary + 1 .. end_boundary``.
        """
        state = self.initial_busy
        start = 0
        for g in self.changes:
            yield state, start, g
            state = not state
            start = g
        yield state, start, self.I


def busy_count(pattern: ChangePattern) -> int:
    """Number of samples in ``[1, I]`` during which the PU is present."""
    return sum(end - start for busy, start, end in pattern.runs() if busy)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


def pattern_weight(pattern: ChangePattern, model: TrafficModel, t_s: float,
                   mode: Mode = "renewal") -> float:
    """Occurrence probability of one change pattern.

    Computed as a direct product over the pattern's runs; the dynamic
    program in :func:`weight_table` is checked against this.
    """
    _check_mode(mode)
    I = pattern.I
    weight = model.prior(pattern.initial_busy)
    runs = list(pattern.runs())
    for busy, start, end in runs[:-1]:
        F = cdf_grid(model.law(busy), I, t_s)
        at = end - start if mode == "renewal" else end
        weight *= F[at] - F[at - 1]
    busy, start, _ = runs[-1]
    F = cdf_grid(model.law(busy), I, t_s)
    if mode == "renewal":
        weight *= 1.0 - F[I - start]
    else:
        weight *= 1.0 - (F[I] - F[start])
    return float(weight)


def enumerate_patterns(I: int, N: int, terminal_busy: bool,
                       initial_busy: bool) -> Iterator[ChangePattern]:
    """All patterns with ``x <= N`` changes that start and end as requested."""
    if not 0 <= N <= I:
        raise DomainError(f"need 0 <= N <= I, got N={N}, I={I}")
    parity = int(initial_busy != terminal_busy)
    for x in range(parity, N + 1, 2):
        for combo in itertools.combinations(range(1, I + 1), x):
            yield ChangePattern(initial_busy, combo, I)


@dataclass(frozen=True)
class WeightTable:
    """Aggregated pattern weights for one terminal state.

    ``weights[x, b]`` is the total weight of all patterns with ``x`` changes,
    ``b`` busy samples and the table's terminal state.
    """

    terminal_busy: bool
    weights: np.ndarray

    @property
    def N(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def I(self) -> int:
        return self.weights.shape[1] - 1

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def totals_by_x(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    @property
    def by_busy_count(self) -> np.ndarray:
        """Weights aggregated over ``x``, indexed by ``b``."""
        return self.weights.sum(axis=0)

    def entries(self) -> dict[tuple[int, int], float]:
        """Nonzero entries as ``{(x, b): weight}``."""
        xs, bs = np.nonzero(self.weights)
        return {(int(x), int(b)): float(self.weights[x, b]) for x, b in zip(xs, bs)}

    def __getitem__(self, key: tuple[int, int]) -> float:
        return float(self.weights[key])


def _validate_window(I: int, N: int) -> None:
    if I < 1:
        raise DomainError(f"window length must be >= 1, got {I}")
    if not 0 <= N <= I:
        raise DomainError(f"need 0 <= N <= I, got N={N}, I={I}")


def weight_table(model: TrafficModel, I: int, t_s: float, N: int,
                 terminal_busy: bool, mode: Mode = "renewal") -> WeightTable:
    """Aggregate pattern weights by ``(x, b)`` with a dynamic program.

    The state after each change is (last change sample ``p``, busy count so
    far ``b``) per current channel state; each layer adds one change.  The
    cost is ``O(N * I)`` array shifts of size ``I^2``.
    """
    _check_mode(mode)
    _validate_window(I, N)
    F = {busy: cdf_grid(model.law(busy), I, t_s) for busy in (False, True)}
    pmf = {busy: np.diff(F[busy]) for busy in (False, True)}  # pmf[s][g-1]
    out = np.zeros((N + 1, I + 1))
    g = np.arange(I + 1)

    # layer[s][p, b]: weight of partial patterns whose last change is at p,
    # accumulated busy count b, currently in state s
    layer = {s: np.zeros((I + 1, I + 1)) for s in (False, True)}
    for s in (False, True):
        layer[s][0, 0] = model.prior(s)

    for x in range(N + 1):
        # close the current run at the window end
        for s in (False, True):
            if s != terminal_busy or not layer[s].any():
                continue
            if mode == "renewal":
                tail = 1.0 - F[s][I - g]
            else:
                tail = 1.0 - (F[s][I] - F[s][g])
            closed = layer[s] * tail[:, None]
            if s:
                run = I - g  # busy samples added by the final run
                for p in range(I + 1):
                    out[x, run[p]:] += closed[p, :I + 1 - run[p]]
            else:
                out[x] += closed.sum(axis=0)
        if x == N:
            break
        nxt = {s: np.zeros((I + 1, I + 1)) for s in (False, True)}
        for s in (False, True):
            cur = layer[s]
            if not cur.any():
                continue
            dest = nxt[not s]
            for k in range(1, I + 1):
                # change at sample p + k for every p in [0, I - k]
                if mode == "renewal":
                    factor = np.full(I + 1 - k, pmf[s][k - 1])
                else:
                    factor = pmf[s][k - 1:I]
                src = cur[:I + 1 - k] * factor[:, None]
                if s:
                    dest[k:, k:] += src[:, :I + 1 - k]
                else:
                    dest[k:] += src
        layer = nxt
    return WeightTable(terminal_busy, out)


def naive_weight_table(model: TrafficModel, I: int, t_s: float, N: int,
                       terminal_busy: bool, mode: Mode = "renewal") -> WeightTable:
    """Same table by explicit enumeration; exponential cost, use for small I."""
    _check_mode(mode)
    _validate_window(I, N)
    out = np.zeros((N + 1, I + 1))
    for initial in (False, True):
        for pat in enumerate_patterns(I, N, terminal_busy, initial):
            out[pat.x, pat.b] += pattern_weight(pat, model, t_s, mode)
    return WeightTable(terminal_busy, out)
