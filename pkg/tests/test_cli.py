import csv
import io
import json

import pytest

from nctorus import cli
from nctorus.suites import SUITES, ConfigError, EngineConfig, VerificationReport, checks_for, run_suite, sweep


def run(capsysbinary, *argv):
    code = cli.main(list(argv))
    return code, capsysbinary.readouterr().out


def test_json_report(capsysbinary):
    code, out = run(capsysbinary, "run", "--suite", "axioms", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == cli.SCHEMA_VERSION
    ids = [r["check_id"] for r in doc["reports"]]
    assert ids == sorted(ids) and len(ids) == 5
    for r in doc["reports"]:
        assert list(r) == ["check_id", "anchor", "parameters", "defect", "tolerance", "passed"]
        assert r["passed"] == (r["defect"] <= r["tolerance"])
        assert r["parameters"]["N"] == 4


def test_byte_identical_reruns(capsysbinary):
    args = ("run", "--suite", "twist", "--format", "json", "--seed", "3", "--theta", "1,0.5j")
    _, a = run(capsysbinary, *args)
    _, b = run(capsysbinary, *args)
    assert a == b


def test_seed_changes_random_checks(capsysbinary):
    _, a = run(capsysbinary, "run", "--suite", "twist", "--format", "json", "--seed", "1")
    _, b = run(capsysbinary, "run", "--suite", "twist", "--format", "json", "--seed", "2")
    assert a != b


def test_csv_has_fixed_columns(capsysbinary):
    code, out = run(capsysbinary, "run", "--suite", "theta", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out.decode())))
    assert tuple(rows[0]) == cli.CSV_HEADER
    assert all(len(r) == len(cli.CSV_HEADER) for r in rows)
    assert code == 0 and len(rows) == 1 + len(checks_for("theta"))


def test_text_and_timings(capsysbinary):
    code, out = run(capsysbinary, "run", "--suite", "axioms", "--timings")
    text = out.decode()
    assert code == 0 and text.rstrip().endswith("5/5 checks passed")
    assert "s\n" in text
    _, js = run(capsysbinary, "run", "--suite", "axioms", "--timings", "--format", "json")
    assert all("wall_time" in r for r in json.loads(js)["reports"])


def test_failures_give_exit_one(capsysbinary):
    code, out = run(capsysbinary, "run", "--suite", "axioms", "--tol-symbolic", "1e-30")
    assert code == 1 and b"FAIL" in out


@pytest.mark.parametrize("argv", [
    ("run", "--suite", "bogus"),
    ("run", "--order", "0"),
    ("run", "--tol-analytic", "-1"),
    ("run", "--theta", "one,two"),
    ("run", "--format", "xml"),
    (),
])
def test_usage_errors_give_exit_two(capsysbinary, argv):
    assert cli.main(list(argv)) == 2


def test_environment_defaults(capsysbinary, monkeypatch):
    monkeypatch.setenv("NCTORUS_ORDER", "2")
    monkeypatch.setenv("NCTORUS_FORMAT", "json")
    _, out = run(capsysbinary, "run", "--suite", "axioms")
    assert {r["parameters"]["N"] for r in json.loads(out)["reports"]} == {2}


def test_theta_spec_parsing():
    assert cli.parse_theta("1, 0.5 ,-2") == (1.0, 0.5, -2.0)
    assert cli.parse_theta("0.1+0.2j") == (0.1 + 0.2j,)
    with pytest.raises(ConfigError):
        cli.parse_theta(" , ")
    cfg = EngineConfig(order=3, theta=(1.0, 2.0, 3.0, 4.0))
    assert list(cfg.parameter().coeffs) == [0, 1, 2, 3]


def test_config_invariants():
    for bad in (dict(order=0), dict(tol_symbolic=0), dict(samples=0), dict(theta=()), dict(format="yaml")):
        with pytest.raises(ConfigError):
            EngineConfig(**bad)


def test_emit_empty():
    assert json.loads(cli.emit([], "json"))["reports"] == []
    assert cli.emit([], "text") == b"no checks\n"
    assert cli.emit([], "csv").decode().strip().split(",") == list(cli.CSV_HEADER)


def test_emit_rounds_to_three_digits():
    r = VerificationReport("x", "a", {}, 1.23456e-9, 1e-8, True, 0.5)
    assert json.loads(cli.emit([r], "json"))["reports"][0]["defect"] == 1.23e-9


def test_unknown_suite_in_library():
    with pytest.raises(ConfigError):
        run_suite("nope", EngineConfig())


def test_every_suite_has_checks():
    for s in SUITES:
        assert checks_for(s)
    assert len(checks_for("all")) == sum(len(checks_for(s)) for s in SUITES)


def test_first_order_run_passes():
    reports = run_suite("all", EngineConfig(order=1))
    assert reports and all(r.passed for r in reports)


def test_sweep_reports_second_order_obstructions(capsysbinary):
    obs = sweep(EngineConfig(order=4))
    assert len(obs) == 6
    assert all(o.leading_order == 2 for o in obs)
    code, out = run(capsysbinary, "sweep", "--format", "json")
    assert code == 0
    assert [r["leading_order"] for r in json.loads(out)["sweep"]] == [2] * 6
