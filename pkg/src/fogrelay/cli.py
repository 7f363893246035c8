"""Command-line front end.

    fogrelay run SCENARIO.json [--out DIR] [--seed N] [--samples N]
                 [--methods analytic,quadrature,mc] [--paper-literal] [--pt-dbm P] [--workers N]
    fogrelay compare A.csv B.csv [--rtol R] [--atol A] [--method-a M] [--method-b M] [--report FILE]

``run`` writes ``results.csv`` and ``manifest.json`` into ``--out``. A
manifest can be passed back to ``run`` in place of a scenario to repeat the
run exactly.

Exit codes: 0 success, 1 configuration or input error, 2 numerical
non-convergence (run) or tolerance exceeded (compare).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
import warnings
from pathlib import Path

from . import __version__, transcribed
from .errors import ConfigError, ConvergenceError
from .scenario import METHODS, ScenarioConfig
from .sweep import COLUMNS, METRIC_COLUMNS, PointFailure, closed_form_sources, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
MANIFEST = "manifest.json"
RESULTS = "results.csv"



def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return repr(float(v))


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    if not rows:
        return []
    missing = [c for c in ("p_t_dbm", "method", *METRIC_COLUMNS) if c not in rows[0]]
    if missing:
        raise ConfigError(str(path), f"missing columns {missing}")
    for r in rows:
        for c in ("p_t_dbm", *METRIC_COLUMNS):
            r[c] = float(r[c])
        for c in COLUMNS:
            if c.startswith("mc_se_") and c in r:
                r[c] = float(r[c]) if r[c] else None
    return rows


# -- run -------------------------------------------------------------------

def _load_run_input(path: str) -> tuple[ScenarioConfig, dict]:
    """Scenario or manifest -> (config, recorded run options)."""
    cfg_path = Path(path)
    try:
        doc = json.loads(cfg_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    if isinstance(doc, dict) and doc.get("kind") == "fogrelay-manifest":
        return ScenarioConfig.from_dict(doc.get("config")), {
            "methods": doc.get("methods"), "form": doc.get("analytic_form")}
    return ScenarioConfig.from_dict(doc), {}


def cmd_run(args) -> int:
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cfg, recorded = _load_run_input(args.config)
        cfg = cfg.with_overrides(seed=args.seed, n_samples=args.samples, pt_dbm=args.pt_dbm)
    for msg in dict.fromkeys(str(w.message) for w in caught):
        print(f"warning: {msg}", file=sys.stderr)

    if args.methods:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    else:
        methods = recorded.get("methods") or list(cfg.available_methods())
    methods = cfg.check_methods(methods)
    form = "literal" if args.paper_literal else (recorded.get("form") or "corrected")

    results = run_sweep(cfg, methods, form, args.workers)
    text = rows_to_csv([r.row for r in results])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / RESULTS).write_text(text, encoding="utf-8")
    manifest = {
        "kind": "fogrelay-manifest",
        "tool": "fogrelay",
        "version": __version__,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "methods": list(methods),
        "analytic_form": form,
        "closed_form_sources": closed_form_sources(cfg),
        "columns": list(COLUMNS),
        "results": RESULTS,
        "results_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "wall_time_s": time.perf_counter() - t0,
        "points": [{"p_t_dbm": r.row["p_t_dbm"], "method": r.row["method"],
                    "seconds": r.seconds, "terms": r.terms} for r in results],
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n",
                                encoding="utf-8")
    print(f"wrote {len(results)} rows to {out / RESULTS}")
    return EXIT_OK


def _json_default(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return float(v)


# -- compare ---------------------------------------------------------------

def _select(rows: list[dict], method: str | None, which: str) -> list[dict]:
    methods = sorted({r["method"] for r in rows})
    if method is None:
        return rows
    if method not in methods:
        raise ConfigError(f"--method-{which}", f"no rows with method {method!r} (have {methods})")
    return [r for r in rows if r["method"] == method]


def _same(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


def _rel(a: float, b: float) -> float:
    if _same(a, b):
        return 0.0
    if not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else math.inf


def _manifest_for(csv_path: str) -> dict | None:
    p = Path(csv_path).with_name(MANIFEST)
    if not p.exists():
        return None
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return None


def flagged_terms(man_a: dict | None, man_b: dict | None, rtol: float) -> dict[str, list[str]]:
    """Term groups whose change between two analytic runs exceeds ``rtol`` of
    the metric, annotated with the recorded defect of the printed form."""
    if not man_a or not man_b:
        return {}
    sources = man_a.get("closed_form_sources") or man_b.get("closed_form_sources") or {}
    pts_a = [p for p in man_a.get("points", []) if p.get("method") == "analytic"]
    pts_b = [p for p in man_b.get("points", []) if p.get("method") == "analytic"]
    out: dict[str, list[str]] = {}
    for pa, pb in zip(pts_a, pts_b):
        for metric, groups_a in (pa.get("terms") or {}).items():
            groups_b = (pb.get("terms") or {}).get(metric, {})
            defects = transcribed.KNOWN_DEFECTS.get(sources.get(metric, ""), {})
            scale = max(abs(math.fsum(map(float, groups_a.values()))),
                        abs(math.fsum(map(float, groups_b.values()))))
            for g in sorted(set(groups_a) | set(groups_b)):
                va, vb = float(groups_a.get(g, 0.0)), float(groups_b.get(g, 0.0))
                # a group matters when its change is visible in the metric total
                if abs(va - vb) > rtol * scale:
                    note = defects.get(g) or defects.get("*") or "no recorded defect"
                    label = f"{g}: {note}"
                    if label not in out.setdefault(metric, []):
                        out[metric].append(label)
    return out


def compare_rows(a: list[dict], b: list[dict], rtol: float, atol: float) -> dict:
    if len(a) != len(b):
        raise ConfigError("grid", f"row counts differ ({len(a)} vs {len(b)})")
    for i, (ra, rb) in enumerate(zip(a, b)):
        if ra["p_t_dbm"] != rb["p_t_dbm"]:
            raise ConfigError("grid", f"row {i}: P_t {ra['p_t_dbm']} vs {rb['p_t_dbm']}")
    rows, summary = [], {}
    for c in METRIC_COLUMNS:
        summary[c] = {"max_abs_delta": 0.0, "max_rel_delta": 0.0}
    for ra, rb in zip(a, b):
        entry = {"p_t_dbm": ra["p_t_dbm"], "method_a": ra["method"], "method_b": rb["method"]}
        for c in METRIC_COLUMNS:
            x, y = ra[c], rb[c]
            d = 0.0 if _same(x, y) else y - x
            rel = _rel(x, y)
            entry[c] = d
            s = summary[c]
            ad = math.inf if math.isnan(d) else abs(d)
            if ad > s["max_abs_delta"]:
                s["max_abs_delta"] = ad
            if rel > s["max_rel_delta"]:
                s["max_rel_delta"] = rel
        rows.append(entry)
    for s in summary.values():
        s["pass"] = s["max_rel_delta"] <= rtol or s["max_abs_delta"] <= atol
    return {"rows": rows, "summary": summary, "rtol": rtol, "atol": atol,
            "pass": all(s["pass"] for s in summary.values())}


def cmd_compare(args) -> int:
    a = _select(read_csv(args.a), args.method_a, "a")
    b = _select(read_csv(args.b), args.method_b, "b")
    report = compare_rows(a, b, args.rtol, args.atol)
    report["flagged_terms"] = flagged_terms(_manifest_for(args.a), _manifest_for(args.b), args.rtol)

    print(f"{'P_t':>7} " + " ".join(f"{c:>14}" for c in METRIC_COLUMNS))
    for r in report["rows"]:
        print(f"{r['p_t_dbm']:7.2f} " + " ".join(f"{r[c]:14.6g}" for c in METRIC_COLUMNS))
    for c, s in report["summary"].items():
        state = "ok" if s["pass"] else "FAIL"
        print(f"{c:>12}: max|d| = {s['max_abs_delta']:.3e}  max rel = {s['max_rel_delta']:.3e}  {state}")
    for metric, labels in report["flagged_terms"].items():
        for label in labels:
            print(f"flagged {metric} term {label}")
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, default=_json_default) + "\n",
                                     encoding="utf-8")
    return EXIT_OK if report["pass"] else EXIT_NUMERIC


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fogrelay", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"fogrelay {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a scenario over its power sweep")
    run.add_argument("config", help="scenario JSON, or a manifest from an earlier run")
    run.add_argument("--out", default="out", help="output directory (default: ./out)")
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int, help="Monte Carlo samples per point")
    run.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    run.add_argument("--paper-literal", action="store_true",
                     help="evaluate closed forms exactly as printed, defects included")
    run.add_argument("--pt-dbm", type=float, help="evaluate a single transmit power")
    run.add_argument("--workers", type=int, help="sweep points evaluated in parallel")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="per-row deltas between two result files")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--rtol", type=float, default=1e-5)
    cmp_.add_argument("--atol", type=float, default=0.0)
    cmp_.add_argument("--method-a", help="use only rows of this method from A")
    cmp_.add_argument("--method-b", help="use only rows of this method from B")
    cmp_.add_argument("--report", help="also write the report as JSON")
    cmp_.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PointFailure as exc:
        print(f"numerical failure in {exc.module}, term {exc.term}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
