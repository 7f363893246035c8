"""Evaluate a scenario over its transmit-power grid with each requested method."""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import analytic, montecarlo, oracle, units
from .analytic import DeterministicPathLoss, ThresholdAboveSupportWarning
from .channel import Mode
from .errors import ConvergenceError, NanIntegrandError, TermError
from .relay import RelayPair
from .scenario import ScenarioConfig

COLUMNS = ("p_t_dbm", "gamma0_db", "method", "outage", "avg_snr_db", "rate_bps_hz", "ber",
           "mc_se_outage", "mc_se_avg_snr", "mc_se_rate", "mc_se_ber")
METRIC_COLUMNS = ("outage", "avg_snr_db", "rate_bps_hz", "ber")

MODULE_OF_METHOD = {"analytic": "analytic_metrics", "quadrature": "quadrature_oracle",
                    "mc": "montecarlo"}


class PointFailure(ConvergenceError):
    """Numerical failure at one sweep point, naming the module and term."""

    def __init__(self, module: str, term: str, p_t_dbm: float, cause: Exception):
        super().__init__(f"{module}: term {term} failed at P_t = {p_t_dbm:g} dBm: {cause}")
        self.module = module
        self.term = term
        self.p_t_dbm = p_t_dbm


@dataclass
class PointResult:
    row: dict
    seconds: float
    terms: dict = field(default_factory=dict)


def closed_form_sources(cfg: ScenarioConfig) -> dict[str, str]:
    """Which transcribed function supplies each metric (for defect lookup)."""
    if not cfg.relayed:
        return {}
    if cfg.mode is Mode.PT:
        return {"ber": "avg_ber_deterministic_terms"}
    out = {"avg_snr": "avg_snr_general_terms", "rate": "ergodic_rate_general_terms"}
    if cfg.fog.analytic_k == 2:
        out["ber"] = "avg_ber_k2_terms"
    return out


def _call(term: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except TermError as exc:
        raise _Named(f"{term}/{exc.term}", exc) from exc
    except NanIntegrandError as exc:
        raise _Named(f"{term} (integrand at {exc.point!r})", exc) from exc
    except ConvergenceError as exc:
        raise _Named(term, exc) from exc


class _Named(Exception):
    def __init__(self, term, cause):
        super().__init__(term)
        self.term = term
        self.cause = cause


def _analytic(cfg: ScenarioConfig, g0: float, form: str) -> tuple[dict, dict]:
    gth = cfg.gamma_th
    if cfg.mode is Mode.PT:
        pl = cfg.power_law_link()
        f = pl.cdf(gth, g0)
        out = 2.0 * f - f * f if cfg.relayed else f
        det = analytic.power_law_metrics(pl.a, pl.phi, DeterministicPathLoss(cfg.psi, cfg.d),
                                         g0, cfg.relayed)
        ber = _call("ber", analytic.avg_ber_power_law, pl, g0, cfg.ook, form, cfg.relayed)
        return ({"outage": out, "avg_snr": det["avg_snr"], "rate": det["ergodic_rate"],
                 "ber": ber.value}, {"ber": ber.terms})
    links = cfg.links()
    if not cfg.relayed:
        m = _call("single_hop", analytic.single_hop_metrics, links[0], g0, cfg.ook)
        out = _call("outage", analytic.outage_per_hop, links[0], g0, gth)
        return {"outage": out, "avg_snr": m["avg_snr"], "rate": m["ergodic_rate"], "ber": m["ber"]}, {}
    pair = RelayPair(links[0], links[1], g0)
    snr = _call("avg_snr", analytic.avg_snr_general, pair, form)
    rate = _call("rate", analytic.ergodic_rate_general, pair, form)
    if cfg.fog.analytic_k == 2:
        ber = _call("ber", analytic.avg_ber_k2, pair, cfg.ook, form)
    else:
        ber = _call("ber", analytic.avg_ber_integer_k, pair, cfg.ook)
    out = _call("outage", analytic.outage_df, pair, gth)
    vals = {"outage": out, "avg_snr": snr.value, "rate": rate.value, "ber": ber.value}
    return vals, {"avg_snr": snr.terms, "rate": rate.terms, "ber": ber.terms}


def _quadrature(cfg: ScenarioConfig, g0: float) -> dict:
    if cfg.mode is Mode.PT:
        law = oracle.SnrLaw.power_law(cfg.power_law_link(), g0, cfg.relayed)
    else:
        links = cfg.links(analytic=False)
        law = (oracle.SnrLaw.df(RelayPair(links[0], links[1], g0)) if cfg.relayed
               else oracle.SnrLaw.single(links[0], g0))
    q = oracle.metric_by_quadrature
    return {
        "outage": _call("outage", q, "outage", law, gamma_th=cfg.gamma_th),
        "avg_snr": _call("avg_snr", q, "avg_snr", law),
        "rate": _call("rate", q, "rate_bound", law),
        "ber": _call("ber", q, "ber", law, ook=cfg.ook),
    }


def _mc(cfg: ScenarioConfig, g0: float) -> tuple[dict, dict]:
    est = montecarlo.estimate_all(cfg.sim_scenario(g0), cfg.sim_config(), cfg.gamma_th, cfg.ook)
    vals = {"outage": est["outage"].value, "avg_snr": est["avg_snr"].value,
            "rate": est["rate_bound"].value, "ber": est["ber"].value}
    se = {"outage": est["outage"].std_error, "avg_snr": est["avg_snr"].std_error,
          "rate": est["rate_bound"].std_error, "ber": est["ber"].std_error}
    return vals, se


def evaluate_point(cfg: ScenarioConfig, p_t_dbm: float, method: str,
                   form: str = "corrected") -> PointResult:
    g0 = cfg.gamma0(p_t_dbm)
    t0 = time.perf_counter()
    terms, se = {}, {}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ThresholdAboveSupportWarning)
            if method == "analytic":
                vals, terms = _analytic(cfg, g0, form)
            elif method == "quadrature":
                vals = _quadrature(cfg, g0)
            elif method == "mc":
                vals, se = _mc(cfg, g0)
            else:
                raise ValueError(f"unknown method {method!r}")
    except _Named as exc:
        raise PointFailure(MODULE_OF_METHOD[method], exc.term, p_t_dbm, exc.cause) from exc.cause
    row = {
        "p_t_dbm": float(p_t_dbm),
        "gamma0_db": float(units.linear_to_db(g0)),
        "method": method,
        "outage": vals["outage"],
        # a non-positive mean SNR (possible with the literal closed forms) has no dB value
        "avg_snr_db": float(units.linear_to_db(vals["avg_snr"])) if vals["avg_snr"] > 0 else math.nan,
        "rate_bps_hz": vals["rate"],
        "ber": vals["ber"],
        "mc_se_outage": se.get("outage"),
        "mc_se_avg_snr": se.get("avg_snr"),
        "mc_se_rate": se.get("rate"),
        "mc_se_ber": se.get("ber"),
    }
    return PointResult(row, time.perf_counter() - t0, terms)


def run_sweep(cfg: ScenarioConfig, methods, form: str = "corrected",
              workers: int | None = None) -> list[PointResult]:
    """All (P_t, method) points in grid order, whatever order they finish in."""
    jobs = [(float(p), m) for p in cfg.sweep.grid() for m in methods]
    n = workers or cfg.workers
    if n == 1:
        return [evaluate_point(cfg, p, m, form) for p, m in jobs]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(lambda job: evaluate_point(cfg, job[0], job[1], form), jobs))
