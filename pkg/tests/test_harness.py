import json
import math
import time

import numpy as np
import pytest

from qmixlab import cli
from qmixlab.bounds import QuantInputs, beta_of_lambda, delta_for_epsilon, rhs_quantitative
from qmixlab.config import CHECK_IDS, SuiteConfig, load_config, parse_config
from qmixlab.errors import ConfigError
from qmixlab.modelzoo import circle_model, lhs_double_sum, mixing_statistic, window_count, write_spectrum
from qmixlab.suite import CheckResult, exit_code, render_report, run_suite


def test_beta_map():
    assert beta_of_lambda(0.0) == 0.0
    assert beta_of_lambda(0.25) == 1.0 and beta_of_lambda(0.3) == 1.0
    assert beta_of_lambda(3 / 16) == pytest.approx(0.5, abs=1e-15)
    x = np.linspace(0, 1, 4001)
    v = np.array([beta_of_lambda(t) for t in x])
    assert np.all(np.diff(v) >= 0)
    # continuity at the threshold
    assert abs(beta_of_lambda(0.25 - 1e-12) - 1.0) < 1e-5
    with pytest.raises(ValueError):
        beta_of_lambda(-0.1)


def test_rhs_examples():
    unit = rhs_quantitative(QuantInputs(1, 1, 1, 1, 1, 1, 1))
    assert unit == pytest.approx(50000 * math.pi * (1 + 8 * math.pi ** 2 * math.e ** 6), rel=1e-12)
    thick = rhs_quantitative(QuantInputs(2, 3, 0.5, 4, 9, 0, 1))
    assert thick == pytest.approx(50000 * math.pi * 16 * 4 / (3 * 0.125), rel=1e-14)
    half = rhs_quantitative(QuantInputs(2, 3, 0.25, 4, 9, 0, 1))
    assert half / thick == pytest.approx(8, rel=1e-14)
    with pytest.raises(ValueError):
        QuantInputs(1, 1, 1.5, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        QuantInputs(1, 1, 1, -1, 1, 1, 1)
    with pytest.raises(ValueError):
        QuantInputs(1, float("inf"), 1, 1, 1, 1, 1)


def test_rhs_monotonicity():
    rng = np.random.default_rng(3)
    fields = ("rho_max", "T", "beta", "a_l2_sq", "a_sup_sq", "thin_vol", "inj_rad")
    up = ("rho_max", "a_l2_sq", "a_sup_sq", "thin_vol")
    down = ("beta", "inj_rad")
    for _ in range(50):
        base = dict(zip(fields, (rng.uniform(0.5, 3), rng.uniform(0.2, 2), rng.uniform(0.1, 0.9),
                                  rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2),
                                  rng.uniform(0.2, 2))))
        v0 = rhs_quantitative(QuantInputs(**base))
        for name in up + down:
            bumped = dict(base, **{name: base[name] * 1.01 + 1e-3})
            v1 = rhs_quantitative(QuantInputs(**bumped))
            assert (v1 > v0) if name in up else (v1 < v0)


def test_delta_for_epsilon():
    d = delta_for_epsilon(0.1, 1.0, 2.0, 0.5, 1.0, 1.0)
    # 0.1 / (4 * 50000 pi * 16 / (0.125 pi))
    assert d == pytest.approx(3.90625e-9, rel=1e-14)
    assert delta_for_epsilon(0.05, 1.0, 2.0, 0.5, 1.0, 1.0) == pytest.approx(d / 2, rel=1e-14)
    assert delta_for_epsilon(1e12, 1.0, 2.0, 0.5, 1.0, 1.0) == pytest.approx(2 / 9)
    with pytest.raises(ValueError):
        delta_for_epsilon(0.1, 1.0, 2.0, 0.0, 1.0, 1.0)


def test_lhs_matches_statistic():
    s = circle_model(16)
    I = (0, 8)
    assert lhs_double_sum(s, I, 0.5, 1.0) + lhs_double_sum(s, I, 0.5, -1.0) == window_count(s, I)
    for tau in (-1.0, 0.0, 1.0, 2.0):
        assert lhs_double_sum(s, I, 0.5, tau) / window_count(s, I) == mixing_statistic(s, I, 0.5, tau)


def test_config_roundtrip_and_errors(tmp_path):
    cfg = SuiteConfig().with_value("specwin.grid", "12").with_value("suite.checks", "specwin, models")
    assert parse_config(cfg.dump()) == cfg
    assert cfg.checks == ("models.circle", "models.torus", "specwin.bound_sweep", "specwin.closed_vs_quad")
    assert "spectrum.ingested" not in SuiteConfig().checks
    assert len(SuiteConfig().checks) == len(CHECK_IDS) - 1
    with pytest.raises(ConfigError, match="line 2.*weight.nope"):
        parse_config("# comment\nweight.nope = 3\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("specwin.grid = many\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just some text\n")
    with pytest.raises(ConfigError):
        parse_config("suite.format = xml\n")
    with pytest.raises(ConfigError):
        parse_config("suite.checks = nothing\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_exit_code_precedence():
    ok = CheckResult("a", "pass", {})
    bad = CheckResult("b", "fail", {})
    err = CheckResult("c", "error", {})
    assert exit_code([ok]) == 0
    assert exit_code([ok, bad]) == 1
    assert exit_code([bad, err]) == 3


def _tiny_specwin(tmp_path, fmt="json"):
    return (SuiteConfig()
            .with_value("suite.checks", "specwin")
            .with_value("suite.out", str(tmp_path))
            .with_value("suite.format", fmt)
            .with_value("specwin.grid", 8)
            .with_value("specwin.random", 10000)         # the check's sample floor
            .with_value("specwin.quad_samples", 20)
            .with_value("specwin.ridge_n", 11))


def test_minimal_suite_run(tmp_path):
    t0 = time.perf_counter()
    code, results = run_suite(_tiny_specwin(tmp_path).with_value("suite.plots", True))
    assert time.perf_counter() - t0 < 10
    assert code == 0 and [r.status for r in results] == ["pass", "pass"]
    report = json.loads((tmp_path / "report.json").read_text())
    assert {r["check_id"] for r in report} == {"specwin.bound_sweep", "specwin.closed_vs_quad"}
    for r in report:
        assert set(r) == {"check_id", "status", "metrics", "artifacts"}
        for a in r["artifacts"]:
            assert (tmp_path / a).exists()
    assert any(a.endswith(".svg") for r in report for a in r["artifacts"])
    assert parse_config((tmp_path / "config.echo").read_text()) == _tiny_specwin(tmp_path).with_value(
        "suite.plots", True)


def test_csv_report(tmp_path):
    code, results = run_suite(_tiny_specwin(tmp_path, "csv"))
    text = (tmp_path / "report.csv").read_text()
    assert text.splitlines()[0] == "check_id,status,metric,value"
    assert text == render_report(results, "csv")


def test_spectrum_check_runs_only_with_file(tmp_path):
    p = tmp_path / "circle.txt"
    write_spectrum(circle_model(8), p)
    cfg = (SuiteConfig().with_value("spectrum.path", str(p)).with_value("suite.checks", "spectrum")
           .with_value("suite.out", str(tmp_path / "o")).with_value("spectrum.window", "0, 4")
           .with_value("spectrum.tau", 1.0).with_value("spectrum.delta", 0.2))
    code, results = run_suite(cfg)
    assert results[0].check_id == "spectrum.ingested"
    assert results[0].metrics["lhs"] == 4.0 and code == 0


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("specwin.grid = 10\nspecwin.bogus = 1\n")
    assert cli.main(["specwin", "--config", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["suite", "--set", "nosuchkey"]) == 2
    assert cli.main(["models", "--print-config", "--seed", "7"]) == 0
    assert "suite.seed = 7" in capsys.readouterr().out
    good = tmp_path / "tiny.cfg"
    good.write_text(_tiny_specwin(tmp_path / "cli").dump())
    assert cli.main(["specwin", "--config", str(good), "--format", "csv"]) == 0
    assert (tmp_path / "cli" / "report.csv").exists()
    # too few samples for the sweep's floor: an assertion failure, exit 1
    code = cli.main(["specwin", "--config", str(good), "--set", "specwin.random=10",
                     "--out", str(tmp_path / "cli2")])
    assert code == 1
    assert "specwin.bound_sweep: fail" in capsys.readouterr().out
