"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line (printed in the pytest terminal summary
under "acceptance criteria") before asserting, so failing criteria still
report their measured values.
"""

import math

import numpy as np
import pytest

from pusense.detector import (
    SensingConfig,
    build_tables,
    cond_stats,
    np_threshold,
    pd_at_pfa,
    throughput,
    uncond_pd,
    uncond_pfa,
)
from pusense.hypothesis import MODES, enumerate_patterns, naive_weight_table, pattern_weight, weight_table
from pusense.montecarlo import run_trials
from pusense.numerics import erfc, reg_lower_gamma
from pusense.traffic import KINDS, cdf
from pusense.experiments import validation_etas

from conftest import ACCEPTANCE_RESULTS, symmetric_model

FIG1_PFA = (0.05, 0.1, 0.2)
SNRS = (-20.0, -15.0, -10.0, -5.0, 0.0)


def record(cid: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((cid, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")


def fig1_curves(mean=5.0, snr_db=-5.0, Ns=range(5), pfas=FIG1_PFA):
    m = symmetric_model(mean=mean)
    return np.array([[pd_at_pfa(m, SensingConfig(20, 1.0, snr_db, n), p) for p in pfas]
                     for n in Ns])


# --- 1 ---------------------------------------------------------------------------

def test_c1_no_change_closed_forms():
    worst = 0.0
    I, t_s = 20, 1.0
    for kind in KINDS:
        for p_b in (0.3, 0.5):
            m = symmetric_model(kind, 5.0, p_b=p_b)
            for mode in MODES:
                idle = weight_table(m, I, t_s, 0, False, mode)
                busy = weight_table(m, I, t_s, 0, True, mode)
                e0 = (1 - p_b) * (1 - cdf(m.idle, I * t_s))
                e1 = p_b * (1 - cdf(m.busy, I * t_s))
                worst = max(worst, abs(idle[0, 0] - e0), abs(busy[0, I] - e1),
                            abs(idle.total - e0), abs(busy.total - e1))
    ok = worst <= 1e-12
    record("1", ok, f"x=0 weights vs closed form, max |dev| = {worst:.3g} (tol 1e-12)")
    assert ok


# --- 2 ---------------------------------------------------------------------------

def test_c2_dp_matches_enumeration():
    worst = 0.0
    for kind in KINDS:
        m = symmetric_model(kind, 5.0, p_b=0.4)
        for mode in MODES:
            for I in range(1, 16):
                for terminal in (False, True):
                    full = naive_weight_table(m, I, 1.0, min(4, I), terminal, mode).weights
                    for N in range(0, min(4, I) + 1):
                        dp = weight_table(m, I, 1.0, N, terminal, mode).weights
                        worst = max(worst, float(np.max(np.abs(dp - full[:N + 1]))))
    ok = worst <= 1e-12
    record("2", ok, f"DP vs enumeration, I<=15, N<=4, both modes, all laws, "
                    f"max |dev| = {worst:.3g} (tol 1e-12)")
    assert ok


# --- 3 ---------------------------------------------------------------------------

def test_c3_renewal_normalization():
    worst = 0.0
    for kind in KINDS:
        m = symmetric_model(kind, 5.0)
        for I in (5, 10, 20):
            total = sum(weight_table(m, I, 1.0, I, t, "renewal").total for t in (False, True))
            worst = max(worst, abs(total - 1.0))
    ok = worst <= 1e-9
    record("3", ok, f"renewal total weight with N=I, max |total-1| = {worst:.3g} (tol 1e-9)")
    assert ok


# --- 4 ---------------------------------------------------------------------------

def test_c4_averaging_identity():
    from scipy.special import erfc as ref_erfc

    I, N = 12, 3
    etas = np.linspace(8.0, 30.0, 12)
    worst = 0.0
    for kind in ("exponential", "lognormal"):
        m = symmetric_model(kind, 5.0)
        for mode in MODES:
            sc = SensingConfig(I, 1.0, -5.0, N, mode)
            idle, busy = build_tables(m, sc)
            for terminal, table, fn in ((False, idle, uncond_pfa), (True, busy, uncond_pd)):
                num = np.zeros_like(etas)
                den = 0.0
                for init in (False, True):
                    for pat in enumerate_patterns(I, N, terminal, init):
                        w = pattern_weight(pat, m, 1.0, mode)
                        mean = I + pat.b * sc.gamma_p
                        var = 2 * I + 4 * pat.b * sc.gamma_p
                        num += w * 0.5 * ref_erfc((etas - mean) / math.sqrt(2 * var))
                        den += w
                worst = max(worst, float(np.max(np.abs(fn(etas, table, sc) - num / den))))
    ok = worst <= 1e-12
    record("4", ok, f"table average vs per-pattern average at I=12, N=3, "
                    f"max |dev| = {worst:.3g} (tol 1e-12)")
    assert ok


# --- 5 ---------------------------------------------------------------------------

def test_c5a_roc_degrades_with_N():
    pd = fig1_curves()
    bad = [(n, p) for n in range(4) for j, p in enumerate(FIG1_PFA) if not pd[n + 1, j] < pd[n, j]]
    ok = not bad
    rows = "; ".join(f"N={n}: " + "/".join(f"{v:.4f}" for v in pd[n]) for n in range(5))
    record("5a", ok, f"pd at pfa {FIG1_PFA}: {rows}; violations (N->N+1, pfa) = {bad}")
    assert ok


def test_c5b_degradation_shrinks():
    pd = fig1_curves()
    gaps = pd[:-1] - pd[1:]
    bad = [(n, p) for n in range(3) for j, p in enumerate(FIG1_PFA)
           if not gaps[n + 1, j] < gaps[n, j]]
    ok = not bad
    rows = "; ".join(f"pfa={p}: " + "/".join(f"{g:+.4f}" for g in gaps[:, j])
                     for j, p in enumerate(FIG1_PFA))
    record("5b", ok, f"consecutive pd gaps N->N+1 {rows}; violations = {bad}")
    assert ok


@pytest.fixture(scope="module")
def fig1_validation():
    m = symmetric_model()
    sc = SensingConfig(20, 1.0, -5.0, 4)
    etas = validation_etas(m, sc, 10)
    idle, busy = build_tables(m, sc)
    analytic = (uncond_pfa(etas, idle, sc), uncond_pd(etas, busy, sc))
    runs = {mode: run_trials(m, sc, etas, 200_000, mode, seed=20240601)
            for mode in ("gaussian_surrogate", "full_sample")}
    return analytic, runs


def test_c5c_surrogate_within_3_sigma(fig1_validation):
    (a_pfa, a_pd), runs = fig1_validation
    est = runs["gaussian_surrogate"]
    z_pfa = np.abs(est.pfa_hat - a_pfa) / est.stderr_pfa
    z_pd = np.abs(est.pd_hat - a_pd) / est.stderr_pd
    ok = bool(np.all(z_pfa <= 3) and np.all(z_pd <= 3))
    record("5c-surrogate", ok, f"2e5 trials at 10 eta, max |dev|/sigma pfa = {z_pfa.max():.2f}, "
                               f"pd = {z_pd.max():.2f} (tol 3)")
    assert ok


def test_c5c_full_sample_within_budget(fig1_validation):
    (a_pfa, a_pd), runs = fig1_validation
    est = runs["full_sample"]
    d_pfa = np.abs(est.pfa_hat - a_pfa)
    d_pd = np.abs(est.pd_hat - a_pd)
    ok = bool(np.all(d_pfa <= 0.03) and np.all(d_pd <= 0.03))
    record("5c-full-sample", ok, f"2e5 trials at 10 eta, max |dev| pfa = {d_pfa.max():.4f}, "
                                 f"pd = {d_pd.max():.4f} (tol 0.03)")
    assert ok


# --- 6 ---------------------------------------------------------------------------

def test_c6_longer_holding_times_degrade_less():
    fig1 = fig1_curves(5.0, Ns=(0, 4), pfas=(0.1,))
    fig2 = fig1_curves(20.0, Ns=(0, 4), pfas=(0.1,))
    loss1 = fig1[0, 0] - fig1[1, 0]
    loss2 = fig2[0, 0] - fig2[1, 0]
    ok = loss2 < loss1
    record("6", ok, f"pd loss N=4 vs N=0 at pfa=0.1: means 20 ms {loss2:.4f} "
                    f"< means 5 ms {loss1:.4f}")
    assert ok


# --- 7 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fig3_points():
    m = symmetric_model()
    out = {}
    for snr in SNRS:
        for n in range(5):
            sc = SensingConfig(20, 1.0, snr, n)
            tables = build_tables(m, sc)
            op = np_threshold(m, sc, 0.9, tables)
            out[snr, n] = (op, float(uncond_pd(op.eta, tables[1], sc)))
    return out


def test_c7_pd_fixed(fig3_points):
    worst = max(abs(pd - 0.9) for _, pd in fig3_points.values())
    ok = worst <= 1e-9
    record("7-pd", ok, f"pd at solved threshold, max |pd-0.9| = {worst:.3g} (tol 1e-9)")
    assert ok


def test_c7_pfa_nondecreasing_in_N(fig3_points):
    bad = [(snr, n) for snr in SNRS for n in range(4)
           if fig3_points[snr, n + 1][0].pfa < fig3_points[snr, n][0].pfa]
    ok = not bad
    rows = "; ".join(f"{snr:g} dB: " + "/".join(f"{fig3_points[snr, n][0].pfa:.4f}"
                                                 for n in range(5)) for snr in SNRS)
    record("7-N", ok, f"pfa at pd=0.9 by N {rows}; decreases at (snr, N->N+1) = {bad}")
    assert ok


def test_c7_pfa_decreasing_in_snr(fig3_points):
    bad = [(n, snr) for n in range(5) for snr, nxt in zip(SNRS, SNRS[1:])
           if not fig3_points[nxt, n][0].pfa < fig3_points[snr, n][0].pfa]
    ok = not bad
    record("7-SNR", ok, f"pfa strictly decreasing in SNR for every N; violations = {bad}")
    assert ok


# --- 8 ---------------------------------------------------------------------------

def test_c8_model_sensitivity_report():
    pds = {}
    for kind in KINDS:
        m = symmetric_model(kind, 5.0)
        pds[kind] = pd_at_pfa(m, SensingConfig(20, 1.0, -5.0, 5), 0.1)
    best = max(pds, key=pds.get)
    worst = min(pds, key=pds.get)
    detail = ", ".join(f"{k} {v:.4f}" for k, v in pds.items())
    record("8", True, f"report only; pd at pfa=0.1, N=5: {detail}; gamma least degraded: "
                      f"{best == 'gamma'}; lognormal most degraded: {worst == 'lognormal'}")
    assert all(0 < v < 1 for v in pds.values())


# --- 9 ---------------------------------------------------------------------------

# 50-digit reference values, rounded to 20 significant digits
ERFC_REF = [
    (-5, 1.9999999999984625402),
    (-2.5, 1.9995930479825550411),
    (-1, 1.8427007929497148693),
    (-0.3, 1.3286267594591274162),
    (0, 1.0),
    (0.1, 0.8875370839817151016),
    (0.5, 0.47950012218695346232),
    (1, 0.15729920705028513066),
    (1.5, 0.033894853524689272933),
    (1.99, 0.0048885868003830029527),
    (2, 0.0046777349810472658379),
    (2.01, 0.0044751506447517629202),
    (3, 0.000022090496998585441373),
    (4.5, 1.9661604415428874763e-10),
    (6, 2.1519736712498913117e-17),
    (8, 1.122429717298292708e-29),
    (10, 2.088487583762544757e-45),
    (15, 7.2129941724512066666e-100),
    (20, 5.3958656116079009289e-176),
    (25, 8.300172571196522752e-274),
]

GAMMA_REF = [
    (0.5, 0.1, 0.34527915398142297956),
    (0.5, 2, 0.9544997361036415856),
    (1, 1, 0.6321205588285576784),
    (1, 30, 0.99999999999990642377),
    (2, 0.5, 0.090204010431049864594),
    (2, 2, 0.59399415029016192432),
    (2, 10, 0.99950060077261266663),
    (2.5, 3.5, 0.77935969206328920921),
    (3, 1, 0.080301397071394196011),
    (3, 7, 0.97036383611947822324),
    (5, 2, 0.052653017343711156742),
    (5, 5, 0.55950671493478758856),
    (5, 12, 0.99239960931893300453),
    (10, 5, 0.031828057306204811737),
    (10, 10, 0.54207028552814779169),
    (10, 20, 0.99500458769169241283),
    (25, 20, 0.15677262182623772638),
    (25, 30, 0.84275797276160839646),
    (50, 45, 0.24680203440017027271),
    (100, 110, 0.8417213299399129062),
]


def test_c9_special_functions():
    d_erfc = max(abs(erfc(float(x)) - ref) for x, ref in ERFC_REF)
    d_gamma = max(abs(reg_lower_gamma(float(a), float(x)) - ref) for a, x, ref in GAMMA_REF)
    ok = d_erfc <= 1e-12 and d_gamma <= 1e-12
    record("9", ok, f"20 points each, max |dev| erfc = {d_erfc:.3g}, "
                    f"reg_lower_gamma = {d_gamma:.3g} (tol 1e-12)")
    assert ok


# --- 10 --------------------------------------------------------------------------

def test_c10_throughput_sanity():
    m = symmetric_model()
    T, t_s, gamma_s, N = 100.0, 1.0, 10.0, 4
    values = {}
    for I in (1, 5, 10, 20, 40, 60, 80, 100):
        sc = SensingConfig(I, t_s, -5.0, min(N, I))
        eta = np_threshold(m, sc, 0.9).eta
        values[I] = throughput(m, sc, T, I * t_s, gamma_s, eta)
    at_T = values[100]
    nonneg = all(v >= 0 for v in values.values())

    # hand assembly at tau = 20 ms with a fixed threshold
    sc = SensingConfig(20, t_s, -5.0, N)
    eta = 24.0
    h0 = sum(weight_table(m, 20, t_s, N, False).weights.ravel())
    h1 = sum(weight_table(m, 20, t_s, N, True).weights.ravel())
    idle = weight_table(m, 20, t_s, N, False).by_busy_count
    busy = weight_table(m, 20, t_s, N, True).by_busy_count
    b = np.arange(21)
    mean, var = cond_stats(b, 20, sc.gamma_p)
    from scipy.special import erfc as ref_erfc
    cond = 0.5 * ref_erfc((eta - mean) / np.sqrt(2 * var))
    pfa = float(np.dot(idle, cond) / h0)
    pd = float(np.dot(busy, cond) / h1)
    gp = 10 ** (-0.5)
    hand = (h0 * (1 - pfa) * math.log2(1 + gamma_s)
            + h1 * (1 - pd) * math.log2(1 + gamma_s / (1 + gp))) * (T - 20.0) / T
    lib = throughput(m, sc, T, 20.0, gamma_s, eta)
    ok = at_T == 0.0 and nonneg and abs(lib - hand) <= 1e-10
    record("10", ok, f"R(tau=T) = {at_T}, min R over grid = {min(values.values()):.4f}, "
                     f"|library - hand| = {abs(lib - hand):.3g} (tol 1e-10)")
    assert ok
