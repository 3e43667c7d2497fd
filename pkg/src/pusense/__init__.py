"""Spectrum sensing with multiple primary-user status changes.

Closed-form false-alarm/detection probabilities of an energy detector when
the primary user may switch on and off several times inside the sensing
window, plus a Monte Carlo simulator that checks them.
"""

from .detector import (
    OperatingPoint,
    RocCurve,
    SensingConfig,
    build_tables,
    cond_prob_exceed,
    cond_stats,
    np_threshold,
    pd_at_pfa,
    pfa_threshold,
    roc,
    throughput,
    uncond_pd,
    uncond_pfa,
)
from .hypothesis import ChangePattern, WeightTable, busy_count, pattern_weight, weight_table
from .montecarlo import McEstimate, TrialRecord, gen_trace, run_trials
from .traffic import HoldingDist, TrafficModel, from_mean

__version__ = "0.1.0"

__all__ = [
    "ChangePattern",
    "HoldingDist",
    "McEstimate",
    "OperatingPoint",
    "RocCurve",
    "SensingConfig",
    "TrafficModel",
    "TrialRecord",
    "WeightTable",
    "build_tables",
    "busy_count",
    "cond_prob_exceed",
    "cond_stats",
    "from_mean",
    "gen_trace",
    "np_threshold",
    "pattern_weight",
    "pd_at_pfa",
    "pfa_threshold",
    "roc",
    "run_trials",
    "throughput",
    "uncond_pd",
    "uncond_pfa",
    "weight_table",
]
