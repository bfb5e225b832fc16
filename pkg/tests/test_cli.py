import json
import subprocess
import sys

import pytest

from fibcalc import cli
from fibcalc import suites as S
from fibcalc.cli import Report, emit, main, parse_args


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_parse_classify():
    cfg = parse_args(["classify", "--fib", "q.json"])
    assert cfg.command == "classify" and cfg.inputs == {"fib": "q.json"}


def test_parse_gray():
    cfg = parse_args(["gray", "1", "1", "--format", "json"])
    assert cfg.command == "gray" and cfg.options == {"m": 1, "n": 1} and cfg.format == "json"


def test_parse_verify():
    cfg = parse_args(["verify", "--suite", "mates", "--base", "B2.json"])
    assert cfg.command == "verify" and cfg.suites == ("mates",)
    assert cfg.inputs["base"] == "B2.json"


def test_parse_verify_all():
    cfg = parse_args(["verify", "--suite", "all"])
    assert cfg.suites == tuple(S.SUITES)


def test_empty_report_bytes():
    assert emit(Report(), "json") == b'{"version":1,"records":[]}'


def test_suite_criterion_mapping():
    assert sorted(c for c, _ in S.SUITES.values()) == list(range(1, 12))


def test_env_caps(monkeypatch):
    monkeypatch.setenv("FIBCALC_CAPS", "8,50,2")
    assert cli.env_caps() == (8, 50)
    monkeypatch.setenv("FIBCALC_CAPS", "x")
    with pytest.raises(cli.UsageError):
        cli.env_caps()


def test_exit_ok(capsys):
    code, out = _run(["classify", "--fib", "q.json", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == 1 and doc["result"]["flags"]["gray"]


def test_exit_fail_on_precondition(capsys):
    code, out = _run(["dualize", "--fib", "ar1.json", "--format", "json"], capsys)
    assert code == 1
    rec = json.loads(out)["records"][0]
    assert rec["status"] == "fail" and rec["witness"]["witness"] is not None


@pytest.mark.parametrize("fib,side,direction", [
    ("q.json", "A", "ct"), ("q.json", "A", "cc"), ("q.json", "B", "ct"),
    ("q.json", "B", "cc"), ("ar1.json", "B", "ct"), ("q_prime.json", "A", "ct"),
])
def test_dualize_output_flag(capsys, fib, side, direction):
    code, out = _run(["dualize", "--fib", fib, "--side", side, "--direction", direction,
                      "--format", "json"], capsys)
    recs = {r["anchor"]: r for r in json.loads(out)["records"]}
    assert code == 0
    assert recs["dualise/output"]["status"] == "pass"
    assert recs["dualise/fibres"]["status"] == "pass"


def test_exit_usage(capsys):
    assert main(["verify", "--suite", "nope"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["gray", "-1", "1"]) == 2


def test_exit_usage_bad_caps(monkeypatch, capsys):
    monkeypatch.setenv("FIBCALC_CAPS", "1")
    assert main(["gray", "1", "1"]) == 2


def test_exit_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", "--fib", str(bad)]) == 3
    assert main(["classify", "--fib", str(tmp_path / "missing.json")]) == 3
    assert main(["gray", "4", "1"]) == 3


def test_gray_and_scaling(capsys):
    code, out = _run(["gray", "1", "1", "--format", "json"], capsys)
    assert code == 0 and all(r["status"] == "pass" for r in json.loads(out)["records"])
    code, out = _run(["scaling", "--format", "json"], capsys)
    assert code == 0


def test_mate_default_matches_bundled_case(capsys):
    _, a = _run(["mate", "--format", "json"], capsys)
    _, b = _run(["mate", "--case", "mate_example.json", "--format", "json"], capsys)
    assert a == b
    assert all(r["status"] == "pass" for r in json.loads(a)["records"])


def test_unit_command(capsys):
    code, out = _run(["unit", "--format", "json"], capsys)
    assert code == 0


def test_straighten_command(capsys):
    code, out = _run(["straighten", "--fib", "q.json", "--variance", "contravariant",
                      "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["result"]


def test_text_format(capsys):
    code, out = _run(["gray", "1", "0"], capsys)
    assert code == 0
    assert out.splitlines()[-1].endswith("0 failing")


def test_determinism_across_jobs(capsys):
    argv = ["verify", "--suite", "gray", "--suite", "artw", "--format", "json"]
    _, one = _run(argv, capsys)
    _, again = _run(argv, capsys)
    _, two = _run(argv + ["--jobs", "2"], capsys)
    assert one == again == two


def test_strict_promotes_informational(capsys):
    code, out = _run(["verify", "--suite", "localisation", "--format", "json"], capsys)
    ref = [r for r in json.loads(out)["records"] if r["anchor"] == "localise/reflective"][0]
    assert code == 0 and ref["status"] == "info"
    code, out = _run(["verify", "--suite", "localisation", "--strict", "--format", "json"], capsys)
    ref = [r for r in json.loads(out)["records"] if r["anchor"] == "localise/reflective"][0]
    assert code == 1 and ref["status"] == "fail"


def test_timings_flag(capsys):
    _, out = _run(["verify", "--suite", "artw", "--format", "json", "--timings"], capsys)
    assert "seconds" in json.loads(out)["records"][0]
    _, out = _run(["verify", "--suite", "artw", "--format", "json"], capsys)
    assert "seconds" not in json.loads(out)["records"][0]


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "fibcalc.cli", "gray", "0", "0", "--format", "json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["version"] == 1
