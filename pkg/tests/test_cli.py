import json

import pytest

from urnlab import __version__
from urnlab.main import build_parser, main

from conftest import read_csv

T23_FLAGS = ["--a", "2", "--b", "3", "--s", "1", "--a0", "2", "--b0", "0"]


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def test_dist_csv(tmp_path):
    assert run(tmp_path, "dist", *T23_FLAGS, "--n", "4") == 0
    lines = (tmp_path / "dist_n4.csv").read_text().splitlines()
    assert lines == ["x,numerator,denominator,float", "0,2,5,0.4", "6,3,5,0.6"]
    manifest = json.loads((tmp_path / "dist_manifest.json").read_text())
    assert manifest["outputs"] == ["dist_n4.csv"]
    assert manifest["parameters"] == {"format": "csv", "n": 4}
    assert manifest["spec"] == {"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0}
    assert manifest["tool_version"] == __version__


def test_dist_json_from_spec_file(tmp_path):
    spec_file = tmp_path / "t23.json"
    spec_file.write_text(json.dumps({"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0}))
    assert run(tmp_path, "dist", "--spec", str(spec_file), "--n", "4", "--format", "json") == 0
    data = json.loads((tmp_path / "dist_n4.json").read_text())
    assert data == {"n": 4, "probs": {"0": "2/5", "6": "3/5"}}


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert run(out, "dist", *T23_FLAGS, "--n", "9") == 0
    for name in ("dist_n9.csv", "dist_manifest.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_untenable_spec_exits_2(tmp_path, capsys):
    code = run(tmp_path, "dist", "--a", "2", "--b", "2", "--s", "1", "--a0", "2", "--b0", "0", "--n", "3")
    assert code == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "TenabilityViolation"
    assert "b+s" in error["message"]


def test_malformed_spec_exits_1(tmp_path, capsys):
    spec_file = tmp_path / "broken.json"
    spec_file.write_text("{not json")
    assert run(tmp_path, "dist", "--spec", str(spec_file), "--n", "3") == 1
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "SpecParseError"


def test_spec_and_inline_flags_conflict(tmp_path):
    spec_file = tmp_path / "t23.json"
    spec_file.write_text(json.dumps({"a": 2, "b": 3, "s": 1, "a0": 2, "b0": 0}))
    assert run(tmp_path, "dist", "--spec", str(spec_file), "--a", "2", "--n", "3") == 1


def test_missing_spec_exits_1(tmp_path):
    assert run(tmp_path, "dist", "--a", "2", "--n", "3") == 1


def test_unknown_flag_exits_1(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        run(tmp_path, "dist", *T23_FLAGS, "--n", "3", "--bogus")
    assert excinfo.value.code == 1


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["dist", "--help"])
    assert excinfo.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--spec", "--a0", "--b0", "--n", "--format", "--out", "--verbose"):
        assert flag in text


def test_classify_lists_six_urns(tmp_path):
    assert run(tmp_path, "classify", "--s-max", "10") == 0
    verdicts = json.loads((tmp_path / "classify.json").read_text())
    assert sorted(v["matched_case"] for v in verdicts) == list("ABCDEF")
    assert json.loads((tmp_path / "classify_manifest.json").read_text())["spec"] == {}


def test_analyze_t23(tmp_path, capsys):
    assert run(tmp_path, "analyze", *T23_FLAGS) == 0
    report = json.loads((tmp_path / "analyze.json").read_text())
    assert report["elliptic"]["matched_case"] == "A"
    assert report["asymptotics"]["mean_slope"] == "4/7"
    assert float(report["profile"]["rho"]) == pytest.approx(1.4022, abs=1e-4)
    assert "[Rho]" in capsys.readouterr().out


def test_moments_table(tmp_path):
    assert run(tmp_path, "moments", *T23_FLAGS, "--r-max", "1", "--n-max", "8") == 0
    rows = read_csv(tmp_path / "moments.csv")
    assert len(rows) == 9
    assert rows[6] == {"n": "6", "r": "1", "exact": "32/7", "closed_form": "32/7", "difference": "0"}


def test_simulate_writes_histogram_and_clt(tmp_path):
    assert run(tmp_path, "simulate", *T23_FLAGS, "--horizon", "4", "--trials", "1000", "--seed", "3") == 0
    assert (tmp_path / "simulate_n4.csv").exists()
    assert json.loads((tmp_path / "clt_n4.json").read_text())["n"] == 4


def test_simulate_skips_clt_for_constant_law(tmp_path):
    assert run(tmp_path, "simulate", *T23_FLAGS, "--horizon", "1", "--trials", "100") == 0
    manifest = json.loads((tmp_path / "simulate_manifest.json").read_text())
    assert manifest["outputs"] == ["simulate_n1.csv"]


def test_kite_and_series(tmp_path):
    assert run(tmp_path, "kite", *T23_FLAGS, "--samples", "8") == 0
    assert len(read_csv(tmp_path / "polygon.csv")) == 3 * 15
    assert run(tmp_path, "series", *T23_FLAGS, "--order", "6") == 0
    report = json.loads((tmp_path / "series.json").read_text())
    assert report["singular_expansion"]["a_k"][:3] == ["1", "-1/7", "1/637"]
    assert report["k_at_one"][1] == [1, 1, -4, 7]


def test_out_of_range_exits_1(tmp_path):
    assert run(tmp_path, "kite", *T23_FLAGS, "--samples", "4") == 1


@pytest.mark.parametrize("argv", [["dist", "--n", "-1"], ["series", "--order", "0"]])
def test_bad_sizes_report_error_json(tmp_path, capsys, argv):
    assert run(tmp_path, argv[0], *T23_FLAGS, *argv[1:]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "OutOfRange"


@pytest.mark.slow
def test_rate_left_and_right(tmp_path):
    assert run(tmp_path, "rate", *T23_FLAGS, "--grid", "2") == 0
    assert len(read_csv(tmp_path / "rate_left.csv")) == 2
    assert run(tmp_path, "rate", *T23_FLAGS, "--grid", "2", "--right") == 0
    assert len(read_csv(tmp_path / "rate_right.csv")) == 2
