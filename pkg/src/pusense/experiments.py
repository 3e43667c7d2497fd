"""Row generators behind the CLI subcommands.

Each generator takes a resolved configuration dict and returns
:class:`CsvTable` objects; the CLI only formats and writes them.  Keeping the
computation here lets a CSV be replayed from the configuration stored in its
header.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, build_model, build_sensing
from .detector import (
    build_tables,
    default_eta_grid,
    np_threshold,
    pfa_threshold,
    throughput,
    uncond_pd,
    uncond_pfa,
)
from .errors import ConvergenceError
from .montecarlo import run_trials
from .traffic import DEFAULT_SHAPES, TrafficModel

log = logging.getLogger(__name__)

__all__ = ["CsvTable", "COMMANDS", "run_command", "format_value", "render", "header_lines"]


@dataclass
class CsvTable:
    """One output file: columns, rows and extra '#' header notes."""

    suffix: str | None
    columns: list[str]
    rows: list[tuple]
    notes: list[str] = field(default_factory=list)
    ok: bool = True


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def header_lines(command: str, cfg: dict, table: CsvTable) -> list[str]:
    lines = [f"# pusense {command}",
             f"# config: {json.dumps(cfg, sort_keys=True, separators=(',', ':'))}"]
    lines += [f"# {note}" for note in table.notes]
    return lines


def render(command: str, cfg: dict, table: CsvTable) -> str:
    """Full CSV text with LF line endings."""
    lines = header_lines(command, cfg, table)
    lines.append(",".join(table.columns))
    lines += [",".join(format_value(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def _model_notes(model: TrafficModel) -> list[str]:
    notes = [f"p_b = {format_value(model.p_b)}"]
    for name, law in (("idle", model.idle), ("busy", model.busy)):
        desc = law.describe()
        parts = ", ".join(f"{k}={format_value(v) if v is not None else 'none'}"
                          for k, v in desc.items())
        notes.append(f"{name} law: {parts}")
    return notes


def _sensing_notes(sc) -> list[str]:
    return [f"I = {sc.I}, t_s = {format_value(sc.t_s)} ms, snr_db = {format_value(sc.snr_db)}, "
            f"gamma_p = {format_value(sc.gamma_p)}, N = {sc.N}, mode = {sc.mode}"]


def _roc_rows(model: TrafficModel, sc, grid: np.ndarray) -> list[tuple]:
    idle, busy = build_tables(model, sc)
    pfa = np.atleast_1d(uncond_pfa(grid, idle, sc))
    pd = np.atleast_1d(uncond_pd(grid, busy, sc))
    return [(float(e), float(f), float(d), sc.N) for e, f, d in zip(grid, pfa, pd)]


def _grid(cfg_eta, points: int, sc) -> np.ndarray:
    if cfg_eta is not None:
        return np.asarray(cfg_eta, dtype=float)
    return default_eta_grid(sc, points)


def roc_tables(cfg: dict, **_) -> list[CsvTable]:
    model = build_model(cfg)
    section = cfg["roc"]
    Ns = section["N"] if section["N"] is not None else [cfg["sensing"]["N"]]
    tables = []
    for n in Ns:
        sc = build_sensing(cfg, N=n)
        grid = _grid(section["eta"], section["points"], sc)
        rows = _roc_rows(model, sc, grid)
        suffix = f"N{n}" if len(Ns) > 1 else None
        tables.append(CsvTable(suffix, ["eta", "pfa", "pd", "N"], rows,
                               _model_notes(model) + _sensing_notes(sc)))
    return tables


def threshold_tables(cfg: dict, **_) -> list[CsvTable]:
    model = build_model(cfg)
    section = cfg["threshold"]
    target = float(section["target_pd"])
    rows = []
    ok = True
    for snr in section["snr_db"]:
        for n in section["N"]:
            sc = build_sensing(cfg, snr_db=snr, N=n)
            try:
                op = np_threshold(model, sc, target)
                rows.append((float(snr), n, op.eta, op.pfa))
            except ConvergenceError as exc:
                log.error("threshold search failed at snr_db=%s, N=%s: %s", snr, n, exc)
                rows.append((float(snr), n, math.nan, math.nan))
                ok = False
    notes = _model_notes(model) + [f"target_pd = {format_value(target)}"]
    return [CsvTable(None, ["snr_db", "N", "eta", "pfa"], rows, notes, ok)]


def models_tables(cfg: dict, **_) -> list[CsvTable]:
    section = cfg["models"]
    kinds: list[str] = []
    for k in section["kinds"]:
        if k in kinds:
            log.warning("duplicate model %r ignored", k)
            continue
        kinds.append(k)
    tables = []
    for kind in kinds:
        shape = section["shapes"].get(kind, DEFAULT_SHAPES.get(kind))
        model = build_model(cfg, kind=kind, mean=section["mean"], shape=shape)
        sc = build_sensing(cfg, N=section["N"])
        grid = _grid(section["eta"], section["points"], sc)
        rows = _roc_rows(model, sc, grid)
        notes = [f"model = {kind}, shape = {format_value(shape) if shape is not None else 'none'}"]
        suffix = kind if len(kinds) > 1 else None
        tables.append(CsvTable(suffix, ["eta", "pfa", "pd", "N"], rows,
                               notes + _model_notes(model) + _sensing_notes(sc)))
    return tables


def validation_etas(model: TrafficModel, sc, points: int) -> np.ndarray:
    """Descending thresholds between analytic pfa = 0.01 and analytic pd = 0.99."""
    tables = build_tables(model, sc)
    hi = pfa_threshold(model, sc, 0.01, tables).eta
    lo = np_threshold(model, sc, 0.99, tables).eta
    return np.linspace(hi, lo, points)


def validate_tables(cfg: dict, threads: int = 1, **_) -> list[CsvTable]:
    section = cfg["validate"]
    if section["trials"] < 10_000:
        raise ConfigError("validate.trials", f"need at least 10000 trials, got {section['trials']}")
    if section["seed"] is None:
        raise ConfigError("validate.seed", "a seed is required (config or --seed)")
    model = build_model(cfg)
    sc = build_sensing(cfg)
    etas = (np.asarray(section["eta"], dtype=float) if section["eta"] is not None
            else validation_etas(model, sc, section["points"]))
    idle, busy = build_tables(model, sc)
    a_pfa = np.atleast_1d(uncond_pfa(etas, idle, sc))
    a_pd = np.atleast_1d(uncond_pd(etas, busy, sc))
    rows = []
    notes = _model_notes(model) + _sensing_notes(sc)
    ok = True
    for mode in section["modes"]:
        est = run_trials(model, sc, etas, int(section["trials"]), mode, seed=int(section["seed"]),
                         threads=threads, timing=section["timing"])
        notes.append(f"{mode}: used_idle = {est.trials_used_idle}, used_busy = "
                     f"{est.trials_used_busy}, discarded = {est.trials_discarded} "
                     f"(coincident = {est.trials_coincident})")
        for k, eta in enumerate(etas):
            d_pfa = abs(est.pfa_hat[k] - a_pfa[k])
            d_pd = abs(est.pd_hat[k] - a_pd[k])
            if mode == "gaussian_surrogate":
                floor = float(section["surrogate_floor"])
                pfa_ok = d_pfa <= max(floor, section["sigma"] * est.stderr_pfa[k])
                pd_ok = d_pd <= max(floor, section["sigma"] * est.stderr_pd[k])
            else:
                pfa_ok = d_pfa <= section["clt_budget"]
                pd_ok = d_pd <= section["clt_budget"]
            ok = ok and bool(pfa_ok) and bool(pd_ok)
            rows.append((float(eta), mode, float(a_pfa[k]), float(est.pfa_hat[k]),
                         float(est.stderr_pfa[k]), float(a_pd[k]), float(est.pd_hat[k]),
                         float(est.stderr_pd[k]), bool(pfa_ok), bool(pd_ok)))
    columns = ["eta", "mode", "pfa_analytic", "pfa_mc", "stderr_pfa", "pd_analytic", "pd_mc",
               "stderr_pd", "pfa_ok", "pd_ok"]
    return [CsvTable(None, columns, rows, notes, ok)]


def throughput_tau_grid(cfg: dict) -> list[float]:
    section = cfg["throughput"]
    t_s = float(cfg["sensing"]["t_s"])
    T = float(section["T"])
    if section["tau"] is not None:
        return [float(t) for t in section["tau"]]
    samples = sorted({max(1, int(round(k * T / 20 / t_s))) for k in range(1, 21)})
    return [s * t_s for s in samples if s * t_s <= T * (1 + 1e-12)]


def throughput_tables(cfg: dict, **_) -> list[CsvTable]:
    section = cfg["throughput"]
    model = build_model(cfg)
    t_s = float(cfg["sensing"]["t_s"])
    T = float(section["T"])
    rows = []
    for tau in throughput_tau_grid(cfg):
        if not 0 < tau <= T:
            raise ConfigError("throughput.tau", f"value {tau} outside (0, T={T}]")
        I_float = tau / t_s
        I = int(round(I_float))
        if I < 1 or abs(I_float - I) > 1e-9 * max(1.0, I_float):
            raise ConfigError("throughput.tau", f"tau={tau} is not a whole number of samples")
        sc = build_sensing(cfg, I=I, N=min(int(cfg["sensing"]["N"]), I))
        tables = build_tables(model, sc)
        if section["eta"] is not None:
            eta = float(section["eta"])
        else:
            eta = np_threshold(model, sc, float(section["target_pd"]), tables).eta
        R = throughput(model, sc, T, I * t_s, float(section["gamma_s"]), eta, tables)
        rows.append((I * t_s, eta, R))
    notes = _model_notes(model) + [
        f"T = {format_value(T)} ms, gamma_s = {format_value(float(section['gamma_s']))}, "
        f"snr_db = {format_value(float(cfg['sensing']['snr_db']))}, N = {cfg['sensing']['N']}"]
    return [CsvTable(None, ["tau_ms", "eta", "R"], rows, notes)]


COMMANDS = {
    "roc": roc_tables,
    "threshold": threshold_tables,
    "models": models_tables,
    "validate": validate_tables,
    "throughput": throughput_tables,
}


def run_command(command: str, cfg: dict, threads: int = 1) -> list[CsvTable]:
    return COMMANDS[command](cfg, threads=threads)
