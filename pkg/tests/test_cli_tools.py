import shlex
from io import StringIO
from pathlib import Path

import pandas as pd
import pytest

from hetalu.cli import main
from hetalu.services.calibration_service import fit_default_calibration, load_calibration, render_calibration
from hetalu.services.workload_service import load_profile
from tests.conftest import REPO_ROOT


def _read_report(path):
    """Tables of a report file, manifest stripped."""
    text = path.read_text(encoding="utf-8")
    body = [line for line in text.splitlines() if not line.startswith("#")]
    sections = "\n".join(body).split("\n\n")
    return [pd.read_csv(StringIO(section)) for section in sections]


def test_analyze_writes_profile(sample_trace, tmp_path, capsys):
    """Test analyze writes a profile CSV with a manifest header."""
    out = tmp_path / "profile.csv"
    assert main(["analyze", str(sample_trace), "--out", str(out)]) == 0

    text = out.read_text(encoding="utf-8")
    assert text.startswith("# hetalu ")
    assert "# subcommand: analyze" in text
    assert load_profile(out).as_dict() == {4: 2, 12: 1, 16: 1, 64: 1}

    captured = capsys.readouterr()
    assert "ADD operations: 5" in captured.out
    assert "non-ADD ignored: 2" in captured.out


def test_analyze_to_stdout(sample_trace, capsys):
    """Test the summary moves to stderr when the profile goes to stdout."""
    assert main(["analyze", str(sample_trace)]) == 0
    captured = capsys.readouterr()
    assert "bucket_bits,count" in captured.out
    assert "ADD operations: 5" in captured.err


def test_analyze_errors(tmp_path, capsys):
    """Test missing and malformed traces exit with status 2."""
    assert main(["analyze", str(tmp_path / "absent.trace")]) == 2
    assert "hetalu analyze: error" in capsys.readouterr().err

    bad = tmp_path / "bad.trace"
    bad.write_text("ADD 1 2\nADD 0xZZ 3\n", encoding="utf-8")
    assert main(["analyze", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err

    binary = tmp_path / "binary.trace"
    binary.write_bytes(b"ADD 1 2\nADD 3 4\nADD \xff\xfe 1\n")
    assert main(["analyze", str(binary)]) == 2
    assert "line 3: not valid UTF-8" in capsys.readouterr().err

    empty = tmp_path / "empty.trace"
    empty.write_text("# nothing\nMOV 1 2\n", encoding="utf-8")
    assert main(["analyze", str(empty)]) == 2
    assert "no ADD operations" in capsys.readouterr().err


def test_simulate_homogeneous(tmp_path):
    """Test simulate on the 64-bit homogeneous core."""
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--dhrystone", "--policy", "homog:64", "--out", str(out)]) == 0
    (frame,) = _read_report(out)
    row = frame.iloc[0]
    assert row["label"] == "homog:64"
    assert row["avg_cpi"] == 6.0
    assert row["normalized_cpi"] == 1.0
    assert row["area_units"] == 64


def test_simulate_governor_tier(tmp_path):
    """Test the 25% tier runs everything on the 8-bit adder."""
    out = tmp_path / "gov.csv"
    argv = ["simulate", "--dhrystone", "--policy", "governor", "--power-level", "25", "--detail", "--out", str(out)]
    assert main(argv) == 0
    report, detail = _read_report(out)
    assert report.iloc[0]["label"] == "governor@25"
    assert report.iloc[0]["avg_cpi"] == pytest.approx(5.780, abs=1e-3)
    assert set(detail["adder_width"]) == {8}


def test_simulate_from_profile(sample_trace, tmp_path):
    """Test analyze output feeds simulate."""
    profile = tmp_path / "profile.csv"
    out = tmp_path / "sim.csv"
    assert main(["analyze", str(sample_trace), "--out", str(profile)]) == 0
    assert main(["simulate", "--profile", str(profile), "--policy", "hetero-perf", "--out", str(out)]) == 0
    (frame,) = _read_report(out)
    # buckets 4,4,12,16,64 -> 1+1+2+2+6 cycles
    assert frame.iloc[0]["avg_cpi"] == pytest.approx(12 / 5)


def test_simulate_rejects_bad_arguments(capsys):
    """Test argument validation exits with status 2."""
    with pytest.raises(SystemExit) as excinfo:
        main(["simulate", "--dhrystone", "--policy", "homog:128"])
    assert excinfo.value.code == 2

    with pytest.raises(SystemExit) as excinfo:
        main(["simulate", "--dhrystone", "--power-level", "75"])
    assert excinfo.value.code == 2

    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2

    assert main(["simulate", "--dhrystone", "--policy", "homog:64", "--arch", "32"]) == 2
    assert "does not fit" in capsys.readouterr().err


def test_compare_architectures(tmp_path):
    """Test heterogeneous CPI against the widest homogeneous core."""
    out = tmp_path / "cmp64.csv"
    configs = "homog:4,homog:8,homog:16,homog:32,homog:64,hetero-perf"
    assert main(["compare", "--dhrystone", "--configs", configs, "--baseline", "homog:64",
                 "--out", str(out)]) == 0
    (frame,) = _read_report(out)
    assert frame["label"].tolist() == configs.split(",")
    rows = frame.set_index("label")
    assert rows.loc["hetero-perf", "normalized_cpi"] == pytest.approx(0.740, abs=0.005)

    out = tmp_path / "cmp32.csv"
    configs = "homog:4,homog:8,homog:16,homog:32,hetero-perf"
    assert main(["compare", "--dhrystone", "--arch", "32", "--configs", configs, "--baseline", "homog:32",
                 "--out", str(out)]) == 0
    rows = _read_report(out)[0].set_index("label")
    assert rows.loc["hetero-perf", "normalized_cpi"] == pytest.approx(0.887, abs=0.005)


def test_compare_errors(capsys):
    """Test compare input errors."""
    assert main(["compare", "--dhrystone", "--configs", "homog:8,homog:64", "--baseline", "homog:32"]) == 2
    assert "Unknown baseline" in capsys.readouterr().err

    assert main(["compare", "--dhrystone", "--configs", "homog:8", "--baseline", "homog:8"]) == 2
    assert "at least two" in capsys.readouterr().err

    assert main(["compare", "--dhrystone", "--configs", "homog:8,governor@75", "--baseline", "homog:8"]) == 2
    assert "power level" in capsys.readouterr().err


def test_gen_trace(tmp_path):
    """Test gen-trace writes n seeded records."""
    out = tmp_path / "t.trace"
    argv = ["gen-trace", "--dist", "4:1", "--n", "10", "--seed", "3", "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    lines = [line for line in first.decode().splitlines() if not line.startswith("#")]
    assert len(lines) == 10
    assert all(line.startswith("ADD 0x") for line in lines)
    assert "# seed: 3" in first.decode()

    assert main(argv) == 0
    assert out.read_bytes() == first

    profile = tmp_path / "p.csv"
    assert main(["analyze", str(out), "--out", str(profile)]) == 0
    assert load_profile(profile).as_dict() == {4: 10}


def test_gen_trace_exact_counts(tmp_path):
    """Test --exact treats weights as counts."""
    out = tmp_path / "exact.trace"
    profile = tmp_path / "p.csv"
    assert main(["gen-trace", "--dist", "8:3,64:2", "--exact", "--out", str(out)]) == 0
    assert main(["analyze", str(out), "--out", str(profile)]) == 0
    assert load_profile(profile).as_dict() == {8: 3, 64: 2}


def test_gen_trace_errors(capsys):
    """Test malformed distributions exit with status 2."""
    assert main(["gen-trace", "--dist", "4=1"]) == 2
    assert "malformed distribution" in capsys.readouterr().err
    assert main(["gen-trace", "--dist", "10:1"]) == 2
    assert main(["gen-trace", "--dist", "4:1.5", "--exact"]) == 2
    assert main(["gen-trace", "--dist", "4:1", "--n", "0"]) == 2


def test_calibrate_writes_loadable_table(tmp_path, capsys):
    """Test calibrate output loads back as the built-in table."""
    out = tmp_path / "cal.ini"
    assert main(["calibrate", "--out", str(out)]) == 0
    assert load_calibration(out) == fit_default_calibration()
    assert "anchor add4_on4" in capsys.readouterr().err

    shipped = tmp_path / "shipped.ini"
    anchors = REPO_ROOT / "calibration" / "anchors.ini"
    assert main(["calibrate", "--anchors", str(anchors), "--out", str(shipped)]) == 0
    assert load_calibration(shipped).widths == (4, 8, 16, 32, 64)


def test_calibration_override_from_environment(tmp_path, monkeypatch):
    """Test $HETALU_CALIBRATION changes simulated energy."""
    base_out, scaled_out = tmp_path / "base.csv", tmp_path / "scaled.csv"
    argv = ["simulate", "--dhrystone", "--policy", "homog:32"]
    assert main(argv + ["--out", str(base_out)]) == 0

    path = tmp_path / "double.ini"
    path.write_text(render_calibration(fit_default_calibration().scaled(2.0)), encoding="utf-8")
    monkeypatch.setenv("HETALU_CALIBRATION", str(path))
    assert main(argv + ["--out", str(scaled_out)]) == 0

    base = _read_report(base_out)[0].iloc[0]
    scaled = _read_report(scaled_out)[0].iloc[0]
    assert scaled["total_energy_pj"] == pytest.approx(2 * base["total_energy_pj"], rel=1e-4)
    assert scaled["avg_cpi"] == base["avg_cpi"]
    assert str(path) in scaled_out.read_text(encoding="utf-8")


def test_main_reads_sys_argv_and_explicit_calibration(tmp_path, mocker, monkeypatch):
    """Test main() falls back to sys.argv and --calibration wins over the environment."""
    from hetalu.services import calibration_service

    cal = tmp_path / "cal.ini"
    cal.write_text(render_calibration(fit_default_calibration()), encoding="utf-8")
    monkeypatch.setenv("HETALU_CALIBRATION", str(tmp_path / "absent.ini"))
    spy = mocker.spy(calibration_service, "load_calibration")
    out = tmp_path / "sim.csv"
    mocker.patch("sys.argv", ["hetalu", "simulate", "--dhrystone", "--calibration", str(cal), "--out", str(out)])

    assert main() == 0
    spy.assert_called_once()
    assert str(spy.call_args.args[0]) == str(cal)
    assert f"# command: hetalu simulate --dhrystone --calibration {cal}" in out.read_text(encoding="utf-8")


def _recorded_argv(path):
    """Arguments recorded in a report's '# command:' header line."""
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("# command: "):
            words = shlex.split(line[len("# command: "):])
            assert words[0] == "hetalu"
            return words[1:]
    raise AssertionError(f"{path} has no command line")


def test_manifest_command_reproduces_output(sample_trace, tmp_path):
    """Test re-running the command recorded in each output header rewrites identical bytes."""
    trace = tmp_path / "gen trace.txt"
    profile = tmp_path / "profile.csv"
    runs = [
        ["gen-trace", "--dist", "4:3,16:2,64:5", "--n", "200", "--seed", "11", "--out", str(trace)],
        ["analyze", str(sample_trace), "--out", str(profile)],
        ["simulate", "--profile", str(profile), "--policy", "governor", "--power-level", "50", "--detail",
         "--out", str(tmp_path / "sim.csv")],
        ["compare", "--dhrystone", "--arch", "32", "--configs", "homog:8,homog:32,hetero-energy",
         "--baseline", "homog:32", "--out", str(tmp_path / "cmp.csv")],
        ["calibrate", "--out", str(tmp_path / "cal.ini")],
    ]
    for argv in runs:
        assert main(argv) == 0
        out = Path(argv[-1])
        first = out.read_bytes()
        recorded = _recorded_argv(out)
        assert recorded == argv

        out.unlink()
        assert main(recorded) == 0
        assert out.read_bytes() == first


def test_invalid_calibration_numbers_exit_cleanly(tmp_path, capsys):
    """Test out-of-range calibration and anchor values are reported, not raised."""
    cal = tmp_path / "stopped.ini"
    cal.write_text(render_calibration(fit_default_calibration()).replace("frequency_ghz = 1.0", "frequency_ghz = 0"),
                   encoding="utf-8")
    assert main(["simulate", "--dhrystone", "--policy", "homog:8", "--calibration", str(cal)]) == 2
    assert "hetalu simulate: error: Invalid calibration" in capsys.readouterr().err

    shipped = (REPO_ROOT / "calibration" / "anchors.ini").read_text(encoding="utf-8")
    anchors = tmp_path / "anchors.ini"
    anchors.write_text(shipped.replace("latency_ns_per_bit = 0.09", "latency_ns_per_bit = -0.09"), encoding="utf-8")
    assert main(["calibrate", "--anchors", str(anchors)]) == 2
    assert "latency_ns_per_bit" in capsys.readouterr().err

    with pytest.raises(SystemExit) as excinfo:
        main(["simulate", "--dhrystone", "--freq-ghz", "nan"])
    assert excinfo.value.code == 2
