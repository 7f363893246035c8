"""Acceptance criteria 1 to 10, each printed as a PASS or FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts appear in the
"acceptance criteria" section at the end of the output. A criterion that
cannot be met by a faithful implementation is marked ``xfail(strict=True)``:
its check still runs and prints FAIL, and the suite stays green only while it
keeps failing.
"""
import math
import time
import warnings

import numpy as np
import pytest
from scipy import integrate as sint, optimize, stats

import conftest
from fogrelay import analytic, oracle
from fogrelay import montecarlo as mc
from fogrelay.analytic import DeterministicPathLoss, ThresholdAboveSupportWarning
from fogrelay.channel import (DEFAULT_TURBULENCE, FogParams, Mode, PointingParams, PowerLawLink, build_link,
                              combined_snr_cdf, combined_snr_pdf, ew_turbulence_cdf, fog_cdf, pointing_cdf,
                              real_k_cdf_in_u, turbulence_pointing_params)
from fogrelay.relay import RelayPair
from fogrelay.units import gamma0_from_power, linear_to_db

POINT = PointingParams.from_normalized(25, 3)
TURB = DEFAULT_TURBULENCE
LIGHT, MODERATE = (2.32, 13.12), (5.49, 12.06)
GAMMA_TH = 10 ** 0.6
# per-km attenuation for the fixed-loss model, from the Kim visibility law at
# V = 1 km and 1550 nm; this value is not given alongside the claim it serves
PSI_PER_KM = 2.329


def verdict(label: str, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def db(x):
    return float(linear_to_db(x))


def link(k, beta, d, mode="FP", point=POINT):
    return build_link(mode, FogParams(k, beta, d), point, TURB)


def hop_cdf(lk, g, g0):
    if lk.integer_k:
        return combined_snr_cdf(g, lk, g0)
    return real_k_cdf_in_u(lk, lk.log_gain(g, g0))


# -- 1 ---------------------------------------------------------------------

def test_criterion_01_cdf_equals_integrated_pdf():
    sets = [
        (LIGHT, "FP", 0.25, POINT),
        (LIGHT, "FPT", 0.4, POINT),
        (MODERATE, "FP", 0.4, POINT),
        (MODERATE, "FPT", 0.25, POINT),
        (LIGHT, "FP", 0.4, PointingParams.from_normalized(15, 2)),
    ]
    t0 = time.perf_counter()
    worst = 0.0
    for (k, beta), mode, d, pt in sets:
        for kk in (k, round(k)):   # tabulated real shape and its integer neighbour
            lk, g0 = link(kk, beta, d, mode, pt), 1e9
            top = lk.support(g0)
            grid = np.geomspace(1e-12, 1.0, 50) * top
            dens = lambda v: combined_snr_pdf(top * math.exp(-2 * v), lk, g0) * 2 * top * math.exp(-2 * v)
            vs = np.concatenate([[0.0], 0.5 * np.log(top / grid[::-1])])
            pieces = [sint.quad(dens, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)[0] for a, b in zip(vs[:-1], vs[1:])]
            integrated = (1.0 - np.cumsum(pieces))[::-1]
            closed = np.array([hop_cdf(lk, g, g0) for g in grid])
            worst = max(worst, float(np.max(np.abs(closed - integrated))))
    dt = time.perf_counter() - t0
    verdict(1, worst <= 1e-6 and dt < 5, f"max |CDF - int pdf| = {worst:.2e} over 10 laws, {dt:.2f} s")


# -- 2 ---------------------------------------------------------------------

def test_criterion_02_cdf_reaches_one_at_support_edge():
    worst = 0.0
    for k in (1, 2, 3, 6):
        for mode, d in (("FP", 0.25), ("FPT", 0.4)):
            lk = link(k, 13.12, d, mode)
            worst = max(worst, abs(lk.cdf_expoly()(0.0) - 1.0),
                        abs(combined_snr_cdf(lk.support(1e9), lk, 1e9) - 1.0))
    verdict(2, worst <= 1e-9, f"max |F(a^2 gamma0) - 1| = {worst:.1e} for k in 1,2,3,6")


# -- 3 ---------------------------------------------------------------------

def test_criterion_03_sampler_fidelity():
    n = 10 ** 6
    fog = FogParams(*LIGHT, 0.25)
    t0 = time.perf_counter()
    ks = {
        "fog": stats.kstest(mc.sample_fog(fog, np.random.default_rng(101), n), lambda h: fog_cdf(h, fog)).statistic,
        "pointing": stats.kstest(mc.sample_pointing(POINT, np.random.default_rng(102), n),
                                 lambda h: pointing_cdf(h, POINT)).statistic,
        "turbulence": stats.kstest(mc.sample_turbulence(TURB, np.random.default_rng(103), n),
                                   lambda h: ew_turbulence_cdf(h, TURB)).statistic,
    }
    dt = time.perf_counter() - t0
    ok = max(ks.values()) < 0.002 and dt < 10
    verdict(3, ok, ", ".join(f"KS {k} {v:.5f}" for k, v in ks.items()) + f", {dt:.2f} s")


# -- 4 ---------------------------------------------------------------------

def test_criterion_04_outage_matches_monte_carlo():
    lk = link(2, 13.12, 0.25)
    t0 = time.perf_counter()
    parts, ok = [], True
    for p in (15, 25, 35):
        g0 = gamma0_from_power(p)
        ref = analytic.outage_df(RelayPair(lk, lk, g0), GAMMA_TH)
        hop = mc.HopModel(POINT, FogParams(2, 13.12, 0.25))
        est = mc.estimate("outage", mc.SimScenario(Mode.FP, (hop, hop), g0),
                          mc.SimConfig(10 ** 7, 4000 + p, "DF", workers=4), gamma_th=GAMMA_TH)
        z = abs(est.value - ref) / est.std_error
        ok &= z < 3
        parts.append(f"{p} dBm {ref:.4e} vs {est.value:.4e} ({z:.2f} se)")
    dt = time.perf_counter() - t0
    verdict(4, ok and dt < 60, "; ".join(parts) + f"; {dt:.1f} s")


# -- 5 ---------------------------------------------------------------------

def test_criterion_05_specialization_chain():
    rng = np.random.default_rng(55)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        beta = rng.uniform(8, 25)
        d = rng.uniform(0.1, 0.6)
        pt = PointingParams.from_normalized(rng.uniform(10, 30), rng.uniform(1.5, 4))
        lk = link(2, beta, d, rng.choice(["FP", "FPT"]) if pt.rho ** 2 > 8.6 else "FP", pt)
        g0 = 10 ** rng.uniform(5, 13)
        pair = RelayPair(lk, lk, g0)
        for general, sym, k2 in (
            (analytic.avg_snr_general(pair), analytic.avg_snr_symmetric(lk, g0), analytic.avg_snr_k2(lk, g0)),
            (analytic.ergodic_rate_general(pair), analytic.ergodic_rate_symmetric(lk, g0),
             analytic.ergodic_rate_k2(lk, g0)),
        ):
            worst = max(worst, abs(general.value - sym.value) / abs(sym.value),
                        abs(sym.value - k2.value) / abs(k2.value))
    dt = time.perf_counter() - t0
    verdict(5, worst < 1e-8 and dt < 1, f"max relative gap {worst:.1e} over 20 draws, {dt:.2f} s")


# -- 6 ---------------------------------------------------------------------

def _pl_link(g_loss):
    a, phi = turbulence_pointing_params(POINT, TURB)
    return PowerLawLink(a, phi, g_loss)


def test_criterion_06_closed_forms_pass_quadrature_gates():
    t0 = time.perf_counter()
    sym = link(2, 13.12, 0.25)
    asym = RelayPair(link(2, 13.12, 0.2, point=PointingParams.from_normalized(10, 3)),
                     link(2, 13.12, 0.3, point=PointingParams.from_normalized(15, 2)), 1.0)
    pl = _pl_link(math.exp(-PSI_PER_KM * 0.4))
    worst = {"avg_snr": 0.0, "ber": 0.0}
    literal_fail = set()

    def gate(name, key, closed, literal, exact, tol):
        rel = abs(closed - exact) / abs(exact)
        worst[key] = max(worst[key], rel)
        if abs(literal - exact) / abs(exact) > tol:
            literal_fail.add(name)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdAboveSupportWarning)
        for p in (0, 10, 20, 30, 40):
            g0 = gamma0_from_power(p)
            spair = RelayPair(sym, sym, g0)
            apair = asym.with_gamma0(g0)
            q_sym = oracle.metric_by_quadrature("avg_snr", oracle.SnrLaw.df(spair))
            q_asym = oracle.metric_by_quadrature("avg_snr", oracle.SnrLaw.df(apair))
            gate("symmetric avg SNR", "avg_snr", analytic.avg_snr_symmetric(sym, g0).value,
                 analytic.avg_snr_symmetric(sym, g0, "literal").value, q_sym, 1e-5)
            gate("k=2 avg SNR", "avg_snr", analytic.avg_snr_k2(sym, g0).value,
                 analytic.avg_snr_k2(sym, g0).value, q_sym, 1e-5)
            gate("general avg SNR", "avg_snr", analytic.avg_snr_general(apair).value,
                 analytic.avg_snr_general(apair, "literal").value, q_asym, 1e-5)
            q_ber = oracle.metric_by_quadrature("ber", oracle.SnrLaw.df(apair))
            gate("k=2 BER", "ber", analytic.avg_ber_k2(apair).value,
                 analytic.avg_ber_k2(apair, form="literal").value, q_ber, 1e-6)
            gpt = 1e3 * g0   # the fixed-loss link needs more SNR to reach the same BER range
            q_det = oracle.metric_by_quadrature("ber", oracle.SnrLaw.power_law(pl, gpt, True))
            gate("fixed-loss BER", "ber", analytic.avg_ber_power_law(pl, gpt).value,
                 analytic.avg_ber_power_law(pl, gpt, form="literal").value, q_det, 1e-6)
    dt = time.perf_counter() - t0
    ok = worst["avg_snr"] <= 1e-5 and worst["ber"] <= 1e-6 and dt < 30
    verdict(6, ok, f"corrected: max rel avg SNR {worst['avg_snr']:.1e}, BER {worst['ber']:.1e}; "
                   f"printed forms failing the gate: {', '.join(sorted(literal_fail)) or 'none'}; {dt:.1f} s")


# -- 7 ---------------------------------------------------------------------

def test_criterion_07_rate_bound_direction_and_tightness():
    lk = link(2, 13.12, 0.25)
    below, gap40 = True, None
    for p in range(0, 41, 5):
        pair = RelayPair(lk, lk, gamma0_from_power(p))
        bound = analytic.ergodic_rate_general(pair).value
        exact = oracle.metric_by_quadrature("rate", oracle.SnrLaw.df(pair))
        below &= bound <= exact
        if p == 40:
            gap40 = exact - bound
    verdict(7, below and gap40 < 0.05, f"bound <= exact at 0..40 dBm: {below}; gap at 40 dBm {gap40:.2e} bit/s/Hz")


# -- 8 ---------------------------------------------------------------------

def test_criterion_08_outage_slope_matches_diversity_order():
    lk = link(2, 13.12, 0.25)
    p = np.arange(10, 41, 1.0)   # top 30 dB of the 0-40 dBm sweep
    g0 = np.array([gamma0_from_power(x) for x in p])
    out = [analytic.outage_df(RelayPair(lk, lk, g), GAMMA_TH) for g in g0]
    slope = -np.polyfit(np.log10(g0), np.log10(out), 1)[0]
    m = analytic.diversity_order(RelayPair(lk, lk, 1.0))
    ratio = slope / m.value
    verdict(8, abs(ratio - 1) <= 0.1, f"slope {slope:.4f}, M {m.value:.4f} ({m.limiter}), ratio {ratio:.3f}")


# -- 9 ---------------------------------------------------------------------

def _mc_avg_snr_db(mode, k, d, g0, protocol="DF", n=10 ** 6, seed=909):
    hop = mc.HopModel(POINT, FogParams(k, 13.12, d), TURB if mode != "FP" else None)
    est = mc.estimate("avg_snr", mc.SimScenario(Mode(mode), (hop, hop), g0), mc.SimConfig(n, seed, protocol, 4))
    return db(est.value)


def test_criterion_09a_fixed_loss_overestimates_average_snr():
    g0 = gamma0_from_power(30)
    fpt = link(2, 13.12, 0.4, "FPT")
    random_fog = db(analytic.avg_snr_symmetric(fpt, g0).value)
    fixed = db(analytic.deterministic_metrics(POINT, TURB, DeterministicPathLoss(PSI_PER_KM, 0.8), g0, True)["avg_snr"])
    gap = fixed - random_fog
    verdict("9a", abs(gap - 10) <= 2, f"fixed-loss minus random-fog avg SNR at 800 m = {gap:.2f} dB "
                                      f"(psi = {PSI_PER_KM}/km)")


def test_criterion_09b_ber_target_power():
    lk = link(2, 13.12, 0.25)
    p = optimize.brentq(lambda x: math.log10(analytic.avg_ber_k2(RelayPair(lk, lk, gamma0_from_power(x))).value) + 3,
                        0, 40, xtol=1e-6)
    verdict("9b", abs(p - 15) <= 3, f"symmetric 500 m DF reaches BER 1e-3 at {p:.2f} dBm")


def test_criterion_09c_turbulence_negligible_under_fog():
    g0 = gamma0_from_power(30)
    fp = _mc_avg_snr_db("FP", LIGHT[0], 0.4, g0)
    fpt = _mc_avg_snr_db("FPT", LIGHT[0], 0.4, g0)
    verdict("9c", abs(fp - fpt) <= 1, f"FP {fp:.2f} dB vs FPT {fpt:.2f} dB at 30 dBm, 800 m, k = 2.32")


def test_criterion_09d_integer_k_analysis_vs_real_k_simulation():
    g0 = gamma0_from_power(30)
    ana = db(analytic.avg_snr_symmetric(link(2, 13.12, 0.4), g0).value)
    sim = _mc_avg_snr_db("FP", LIGHT[0], 0.4, g0)
    gap = ana - sim
    verdict("9d", abs(gap - 2) <= 1, f"k = 2 analysis {ana:.2f} dB vs k = 2.32 simulation {sim:.2f} dB, gap {gap:.2f} dB")


# -- 10 --------------------------------------------------------------------

def _af_df_chunks(n, seed=1010):
    hop = mc.HopModel(POINT, FogParams(*LIGHT, 0.25))
    scn = mc.SimScenario(Mode.FP, (hop, hop), gamma0_from_power(25))
    return mc.iter_hop_snrs(scn, mc.SimConfig(n, seed, "DF"))


def test_criterion_10a_af_never_beats_df_per_sample():
    violations, n = 0, 0
    for g in _af_df_chunks(10 ** 7):
        violations += int(np.count_nonzero(mc.combine(g, "AF") > mc.combine(g, "DF")))
        n += g[0].size
    verdict("10a", violations == 0, f"{violations} violations of AF <= DF in {n} paired draws")


@pytest.mark.xfail(strict=True, reason="AF trails DF by about 1.5 dB in average SNR in this channel model")
def test_criterion_10b_af_df_average_snr_difference_marginal():
    sa = sd = 0.0
    n = 0
    for g in _af_df_chunks(10 ** 6):
        sa += float(mc.combine(g, "AF").sum())
        sd += float(mc.combine(g, "DF").sum())
        n += g[0].size
    diff = db(sd / n) - db(sa / n)
    verdict("10b", diff < 1, f"DF minus AF average SNR at 25 dBm, light fog = {diff:.2f} dB")
