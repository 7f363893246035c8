import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from fogrelay import analytic
from fogrelay.cli import main, read_csv
from fogrelay.errors import TermError
from fogrelay.sweep import COLUMNS

ROOT = Path(__file__).resolve().parents[1]
FIG4A = ROOT / "scenarios" / "fig4a_fp_light_df.json"


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(tmp_path, cfg, *flags, out="out"):
    d = tmp_path / out
    code = main(["run", str(cfg), "--out", str(d), *flags])
    return code, d


@pytest.fixture(scope="module")
def fig4a(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("fig4a")
    code = main(["run", str(FIG4A), "--out", str(tmp), "--workers", "4"])
    assert code == 0
    return tmp


def test_fig4a_rows_and_schema(fig4a):
    with open(fig4a / "results.csv", newline="") as fh:
        reader = csv.reader(fh)
        assert tuple(next(reader)) == COLUMNS
    rows = read_csv(fig4a / "results.csv")
    for method in ("analytic", "quadrature", "mc"):
        assert sum(r["method"] == method for r in rows) == 41
    assert [r["p_t_dbm"] for r in rows[::3]] == [float(p) for p in range(41)]


def test_fig4a_outage_analytic_within_3_sigma_of_mc(fig4a):
    rows = read_csv(fig4a / "results.csv")
    ana = {r["p_t_dbm"]: r["outage"] for r in rows if r["method"] == "analytic"}
    for r in (r for r in rows if r["method"] == "mc"):
        n = 100_000
        # a zero-count point has no spread; allow the 3-event Poisson bound instead
        tol = 3 * r["mc_se_outage"] if r["mc_se_outage"] > 0 else 3 / n
        assert abs(r["outage"] - ana[r["p_t_dbm"]]) <= tol, r["p_t_dbm"]


def test_fig4a_manifest(fig4a):
    man = json.loads((fig4a / "manifest.json").read_text())
    assert man["kind"] == "fogrelay-manifest" and man["seed"] == 2024
    assert man["config"]["mode"] == "FP" and man["version"]
    assert len(man["points"]) == 123 and all(p["seconds"] >= 0 for p in man["points"])
    assert man["wall_time_s"] > 0


def test_manifest_replay_gives_identical_bytes(fig4a, tmp_path):
    code, d = run(tmp_path, fig4a / "manifest.json", "--workers", "2")
    assert code == 0
    assert (d / "results.csv").read_bytes() == (fig4a / "results.csv").read_bytes()


def test_identical_files_compare_to_zero(fig4a, tmp_path, capsys):
    report = tmp_path / "r.json"
    path = str(fig4a / "results.csv")
    assert main(["compare", path, path, "--report", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert all(s["max_abs_delta"] == 0 for s in rep["summary"].values())


def test_analytic_vs_quadrature_agree(fig4a):
    path = str(fig4a / "results.csv")
    assert main(["compare", path, path, "--method-a", "analytic", "--method-b", "quadrature",
                 "--rtol", "1e-5"]) == 0


def test_literal_vs_corrected_names_flagged_terms(tmp_path, capsys):
    cfg = ROOT / "scenarios" / "asym_fp_df.json"
    assert run(tmp_path, cfg, "--methods", "analytic", out="cor")[0] == 0
    assert run(tmp_path, cfg, "--methods", "analytic", "--paper-literal", out="lit")[0] == 0
    capsys.readouterr()
    code = main(["compare", str(tmp_path / "lit" / "results.csv"), str(tmp_path / "cor" / "results.csv")])
    out = capsys.readouterr().out
    assert code == 2
    assert "flagged avg_snr term C2(2)D1(2)" in out
    assert "flagged ber term D2(1)" in out


def test_grid_mismatch_is_a_config_error(tmp_path, fig4a):
    code, d = run(tmp_path, FIG4A, "--pt-dbm", "25", "--methods", "analytic")
    assert code == 0
    assert main(["compare", str(d / "results.csv"), str(fig4a / "results.csv"), "--method-b", "analytic"]) == 1


def test_single_point_sweep(tmp_path):
    doc = json.loads(FIG4A.read_text())
    doc["power_sweep"] = {"start_dbm": 20, "stop_dbm": 20}
    code, d = run(tmp_path, write(tmp_path, "one.json", doc), "--methods", "analytic")
    assert code == 0
    assert len(read_csv(d / "results.csv")) == 1


def test_pt_with_fog_exits_1(tmp_path, capsys):
    doc = json.loads(FIG4A.read_text())
    doc["mode"] = "PT"
    doc["path_loss"] = {"psi": 2.0}
    code, _ = run(tmp_path, write(tmp_path, "pt.json", doc))
    assert code == 1
    assert "mode/fog conflict" in capsys.readouterr().err


def test_bad_json_exits_1(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(tmp_path, p)[0] == 1


def test_numerical_failure_exits_2_naming_module_and_term(tmp_path, monkeypatch, capsys):
    def broken(*a, **k):
        raise TermError("C1(2)D2(1)", ArithmeticError("1F1 pole"))

    monkeypatch.setattr(analytic, "avg_snr_general", broken)
    code, _ = run(tmp_path, FIG4A, "--pt-dbm", "20", "--methods", "analytic")
    err = capsys.readouterr().err
    assert code == 2
    assert "analytic_metrics" in err and "C1(2)D2(1)" in err


def test_mc_seed_override_changes_rows(tmp_path):
    a = read_csv(run(tmp_path, FIG4A, "--pt-dbm", "20", "--methods", "mc", "--samples", "2000", out="a")[1]
                 / "results.csv")
    b = read_csv(run(tmp_path, FIG4A, "--pt-dbm", "20", "--methods", "mc", "--samples", "2000", "--seed", "5",
                     out="b")[1] / "results.csv")
    assert a[0]["avg_snr_db"] != b[0]["avg_snr_db"]


def test_real_k_scenario_skips_closed_forms(tmp_path):
    doc = json.loads(FIG4A.read_text())
    doc["fog"] = {"class": "light"}
    doc["power_sweep"] = {"start_dbm": 25, "stop_dbm": 25}
    code, d = run(tmp_path, write(tmp_path, "real.json", doc), "--methods", "quadrature,mc", "--samples", "200000")
    assert code == 0
    q, m = read_csv(d / "results.csv")
    assert abs(q["outage"] - m["outage"]) < 3 * m["mc_se_outage"]
    assert run(tmp_path, write(tmp_path, "real.json", doc), "--methods", "analytic")[0] == 1


@pytest.mark.parametrize("name", ["fpt_light_df.json", "pt_df.json", "af_light.json"])
def test_bundled_scenarios_run(tmp_path, name):
    code, d = run(tmp_path, ROOT / "scenarios" / name, "--samples", "20000")
    assert code == 0
    rows = read_csv(d / "results.csv")
    assert rows and all(math.isfinite(r["ber"]) for r in rows)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "fogrelay", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("fogrelay ")
