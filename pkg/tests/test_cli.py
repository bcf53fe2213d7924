import json
import math
import subprocess
import sys

import numpy as np
import pytest

from koopman_sampling.cli import main
from koopman_sampling.sampling import SampleSet


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_preset(capsys):
    code, out, _ = run(capsys, "spectrum", "--signal", "paper-a")
    assert code == 0
    assert "critical_period: 0.7853981633974483" in out


def test_spectrum_json_with_verdict(capsys):
    code, out, _ = run(capsys, "spectrum", "--signal", "paper-b", "--ts", "0.79", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "aliasing" and d["max_abs_imag"] == 4.0


def test_spectrum_from_data(capsys):
    code, out, _ = run(capsys, "spectrum", "--signal", "paper-c", "--ts", "0.6", "--from-data", "--format", "json")
    d = json.loads(out)
    assert code == 0 and abs(d["max_abs_imag"] - 4) < 1e-6 and d["verdict"] == "no_aliasing"


def test_reconstruct_preset_d(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run(
        capsys, "reconstruct", "--method", "kr", "--signal", "paper-d", "--ts", "0.78", "--n", "20", "--dim", "8",
        "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,truth,reconstruction,abs_error" and len(lines) == 1001


@pytest.mark.parametrize("method", ["spline", "pchip", "polyfit12", "sinc", "poly-exp", "kr-windowed"])
def test_reconstruct_methods(method, capsys):
    code, out, _ = run(capsys, "reconstruct", "--method", method, "--signal", "paper-b", "--ts", "0.3", "--grid", "200")
    assert code == 0 and len(out.splitlines()) == 201


def test_exp_sinc_needs_alpha(capsys):
    with pytest.raises(SystemExit) as e:
        main(["reconstruct", "--method", "exp-sinc", "--signal", "paper-b", "--ts", "0.3"])
    assert e.value.code == 2


def test_bound(capsys):
    code, out, _ = run(
        capsys, "bound", "--alpha", "0", "--c", "2", "--ts", "1.0", "--energy", "1.5707963",
        "--n1", "100", "--n2", "100", "--t", "0.5",
    )
    expected = 2 * math.sqrt(1.5707963 * 2 / math.pi) / (math.pi * (math.pi - 2)) * 0.02
    assert code == 0 and float(out) == pytest.approx(expected, rel=1e-15)


def test_bound_precondition_exit_code(capsys):
    code, _, err = run(capsys, "bound", "--c", "4", "--ts", "1.0", "--energy", "1", "--n1", "5", "--n2", "5", "--t", "0.5")
    assert code == 2 and "PreconditionError" in err


def test_sample_identify_reconstruct_pipeline(tmp_path, capsys):
    s, m = tmp_path / "s.json", tmp_path / "m.json"
    assert run(capsys, "sample", "--signal", "paper-b", "--ts", "0.4", "--n", "20", "--format", "json", "--out", str(s))[0] == 0
    ss = SampleSet.load(s)
    assert ss.N == 20
    assert run(capsys, "identify", "--samples", str(s), "--dim", "4", "--out", str(m))[0] == 0
    model = json.loads(m.read_text())
    assert model["M"] == 4 and len(model["L_gen"][0][0]) == 2
    code, out, _ = run(capsys, "reconstruct", "--samples", str(s), "--model", str(m), "--signal", "paper-b", "--grid", "100")
    assert code == 0
    err = np.array([float(line.split(",")[3]) for line in out.splitlines()[1:]])
    assert err.max() < 1e-9
    code, out, _ = run(capsys, "spectrum", "--model", str(m))
    assert code == 0 and "verdict: no_aliasing" in out


def test_sample_csv_with_noise(capsys):
    code, out, _ = run(capsys, "sample", "--signal", "paper-a", "--ts", "0.3", "--n", "6", "--snr-db", "20", "--seed", "3")
    assert code == 0 and out.startswith("# period=0.3") and "snr_db=20.0 seed=3" in out


def test_generate(capsys):
    code, out, _ = run(capsys, "generate", "--signal", "paper-a", "--ts", "0.5", "--n", "3", "--grid", "5")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "t,value" and len(rows) == 6
    t0, g0 = map(float, rows[1].split(","))
    assert t0 == 0.0 and g0 == pytest.approx(-0.25, abs=1e-14)
    assert rows[-1].startswith("1,")


def test_aliasing_boundary_exit_code(capsys):
    code, _, err = run(capsys, "reconstruct", "--signal", "paper-a", "--ts", repr(math.pi / 4), "--dim", "6")
    assert code == 4 and "aliasing boundary" in err


def test_numerical_failure_exit_code(tmp_path, capsys):
    # a model whose generator overflows when propagated over the requested range
    m = {
        "T_s": 1.0, "M": 1, "start_time": 0.0, "anchor": [1.0],
        "U_dt": [[[1e300, 0.0]]], "L_gen": [[[700.0, 0.0]]],
        "diagnostics": {"pinv_residual": 0.0, "branch_margin": 3.14, "rank": 1, "log_residual": 0.0},
    }
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m))
    code, _, err = run(capsys, "reconstruct", "--signal", "paper-a", "--ts", "1.0", "--n", "4", "--model", str(p))
    assert code == 3 and "numerical failure" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["reconstruct", "--format", "xml"])
    assert e.value.code == 2
    code, _, err = run(capsys, "reconstruct", "--signal", "no-such", "--ts", "0.3")
    assert code == 2


def test_experiment_subcommand(tmp_path, capsys):
    out = tmp_path / "fig"
    code, _, err = run(capsys, "experiment", "--suite", "fig6to9", "--signal", "paper-b", "--out", str(out), "--format", "json", "--no-plots")
    assert code == 0 and "2 cells" in err
    assert (out / "report.csv").exists() and json.loads((out / "report.json").read_text())["rows"]
    assert not list(out.glob("*.svg"))


def test_console_script_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "koopman_sampling.cli", "spectrum", "--signal", "paper-d", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert r.returncode == 0 and json.loads(r.stdout)["critical_period"] == pytest.approx(math.pi / 4)
