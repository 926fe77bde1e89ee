import dataclasses
import json
import math

import pytest

import hyperwitten
from hyperwitten import resource
from hyperwitten.main import Command, RunConfig, main
from hyperwitten.errors import ConfigError


@pytest.fixture
def two_well_file(write_json):
    return write_json("two_well.json", resource.load("paper_example.json"))


@pytest.fixture
def sine_file(write_json):
    return write_json("sine.json", resource.load("sine_example.json"))


def test_version(capsys):
    assert main(argv=["--version"]) == 0
    assert capsys.readouterr().out.strip() == hyperwitten.__version__


def test_newton_solve_default_equation(capsys):
    assert main(argv=["newton-solve"]) == 0
    result = json.loads(capsys.readouterr().out)
    rates = [s["levels"][0]["rate"] for s in result["solutions"]]
    assert rates == pytest.approx([1.0, 4.0])
    assert result["slopes"] == pytest.approx([4.0, 1.0])


def test_newton_solve_csv(capsys):
    assert main(argv=["newton-solve", "--format", "csv", "--depth", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "solution,level,rate,re,im,h2"
    assert len(lines) == 3


def test_newton_solve_degenerate_edge(write_json, capsys):
    series = write_json(
        "square.json",
        {
            "terms": [
                {"re": 1.0, "im": 0.0, "e": 2, "h2": 0, "rate": 0.0},
                {"re": -2.0, "im": 0.0, "e": 1, "h2": 0, "rate": -1.0},
                {"re": 1.0, "im": 0.0, "e": 0, "h2": 0, "rate": -2.0},
            ]
        },
    )
    assert main(argv=["newton-solve", "--series", str(series)]) == 2
    assert "polygon: DegenerateEdge" in capsys.readouterr().err


def test_asymptotics_two_well(two_well_file, capsys):
    assert main(argv=["asymptotics", "--potential", str(two_well_file)]) == 0
    result = json.loads(capsys.readouterr().out)
    zero, mode = result["eigenvalues"]
    assert zero["is_zero_mode"]
    assert mode["rate"] == pytest.approx(9 / (8 * math.pi), rel=1e-10)
    assert mode["prefactor"]["re"] == pytest.approx(2 * math.sqrt(45), rel=1e-10)
    assert "note" not in result


def test_asymptotics_sine(sine_file, capsys):
    assert main(argv=["asymptotics", "--potential", str(sine_file)]) == 0
    captured = capsys.readouterr()
    result = json.loads(captured.out)
    assert len(result["eigenvalues"]) == 1
    assert result["note"] == "no nonzero exponentially small eigenvalue"
    assert "no nonzero exponentially small eigenvalue" in captured.err


def test_output_is_deterministic(two_well_file, tmp_path):
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    for out in (first, second):
        assert main(argv=["analyze", "--potential", str(two_well_file), "--out", str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding="utf-8"))
    assert report["morse"]["n"] == 2
    assert len(report["morse"]["critical_points"]) == 4
    assert len(report["tunneling"]["monodromy"]) == 4


def test_analyze_with_eps(two_well_file, capsys):
    assert main(argv=["analyze", "--potential", str(two_well_file), "--eps", "0.02"]) == 0
    assert len(json.loads(capsys.readouterr().out)["connections"]) == 4


def test_numeric_csv(sine_file, capsys):
    argv = ["numeric", "--potential", str(sine_file), "--h", "0.1,0.05", "--grid", "64", "--format", "csv"]
    assert main(argv=argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "h,N,lambda0,lambda1,lambda2"
    assert [line.split(",")[0] for line in lines[1:]] == ["0.10000000000000001", "0.050000000000000003"]


def test_compare_sine(sine_file, capsys):
    argv = ["compare", "--potential", str(sine_file), "--h", "0.1,0.07,0.05", "--grid", "128"]
    assert main(argv=argv) == 0
    assert json.loads(capsys.readouterr().out)["count_ok"] is True


def test_compare_count_mismatch(two_well_file, capsys):
    # h**1.99 drops below the tunnelling eigenvalue at h = 0.1
    argv = ["compare", "--potential", str(two_well_file), "--h", "0.1,0.05", "--grid", "128", "--threshold-power", "1.99"]
    assert main(argv=argv) == 3
    captured = capsys.readouterr()
    assert "numeric: CountMismatch" in captured.err
    assert json.loads(captured.out)["count_ok"] is False


@pytest.mark.slow
def test_paper_example_command(capsys):
    assert main(argv=["paper-example", "--h", "0.1,0.07,0.05", "--grid", "256"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["golden_match"] is True
    assert len(result["comparison"]["rows"]) == 3


def test_missing_potential(capsys):
    assert main(argv=["asymptotics"]) == 1
    assert "config: ConfigError" in capsys.readouterr().err


def test_unreadable_potential(tmp_path, capsys):
    assert main(argv=["asymptotics", "--potential", str(tmp_path / "missing.json")]) == 1
    assert "io: FileNotFoundError" in capsys.readouterr().err


def test_malformed_potential(write_json, tmp_path, capsys):
    path = tmp_path / "nan.json"
    path.write_text('{"a": [0.0, NaN], "b": [1.0]}', encoding="utf-8")
    assert main(argv=["analyze", "--potential", str(path)]) == 1
    assert "potential: PotentialFormatError" in capsys.readouterr().err


def test_degenerate_potential(write_json, capsys):
    path = write_json("flat.json", {"a": [0.0, 1.0, 0.25], "b": [0.0, 0.0]})
    assert main(argv=["asymptotics", "--potential", str(path)]) == 2
    assert "morse:" in capsys.readouterr().err


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(Command.NUMERIC, N=63)
    with pytest.raises(ConfigError):
        RunConfig(Command.NUMERIC, h_list=(0.1, -0.1))
    with pytest.raises(ConfigError):
        RunConfig(Command.NUMERIC, depth=0)
    with pytest.raises(ConfigError):
        RunConfig(Command.NUMERIC, threshold_power=2.5)
    config = RunConfig(Command.NUMERIC, h_list=(0.05, 0.1, 0.05))
    assert config.h_list == (0.1, 0.05)


def test_odd_grid_exit_code(sine_file, capsys):
    assert main(argv=["numeric", "--potential", str(sine_file), "--grid", "63"]) == 1
    assert "ConfigError" in capsys.readouterr().err


def test_thread_cap_from_environment(sine_file, monkeypatch, capsys):
    monkeypatch.setenv("WITTEN_THREADS", "zero")
    assert main(argv=["numeric", "--potential", str(sine_file), "--grid", "64"]) == 1
    assert "WITTEN_THREADS" in capsys.readouterr().err


def test_verbose_is_a_logging_switch_only(capsys):
    assert "verbose" not in {f.name for f in dataclasses.fields(RunConfig)}
    assert main(argv=["newton-solve", "--verbose", "--depth", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["solutions"]
