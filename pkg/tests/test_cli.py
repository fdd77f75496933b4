import json
import os
import subprocess
import sys

import pytest

from rvnorm.cli import main, read_config
from rvnorm.errors import ParseError
from rvnorm.matrix import dump_matrix, random_complex, random_hermitian


@pytest.fixture
def zfile(tmp_path):
    path = tmp_path / "z.json"
    dump_matrix(random_complex(3, 1), path)
    return path


@pytest.fixture
def afile(tmp_path):
    path = tmp_path / "a.json"
    dump_matrix(random_hermitian(3, 2), path)
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_closed_form(capsys, zfile):
    code, out, _ = run(capsys, "norm", "--spec", "normal:0,1", "--d", "2", "--in", str(zfile))
    rep = json.loads(out)
    assert code == 0
    assert rep["method"] == "closed_form_d2" and rep["stderr"] == 0.0
    assert rep["input"] == str(zfile) and rep["spec"] == "normal:0,1"


def test_norm_monte_carlo_repeatable(capsys, zfile):
    argv = ("norm", "--spec", "normal:0,1", "--d", "3", "--in", str(zfile), "--seed", "1",
            "--mc-samples", "2000", "--quad-nodes", "8")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and json.loads(a)["method"] == "monte_carlo"


def test_norm_hermitian_input(capsys, afile):
    _, out, _ = run(capsys, "norm", "--d", "3", "--in", str(afile), "--mc-samples", "1000")
    assert json.loads(out)["hermitian"] is True


def test_exit_codes(capsys, zfile, tmp_path):
    code, _, err = run(capsys, "norm", "--spec", "stable:1.5", "--d", "2", "--in", str(zfile))
    assert code == 3 and "d < alpha" in err
    code, _, err = run(capsys, "norm", "--spec", "bogus", "--in", str(zfile))
    assert code == 2
    code, _, _ = run(capsys, "norm", "--in", str(tmp_path / "nope.json"))
    assert code == 2
    code, _, _ = run(capsys, "norm", "--d", "0.5", "--in", str(zfile))
    assert code == 3
    code, _, _ = run(capsys, "stable", "--alpha", "2.5")
    assert code == 3
    code, _, _ = run(capsys, "stable", "--in", str(zfile))
    assert code == 3
    code, _, _ = run(capsys, "ratio", "--n-min", "1")
    assert code == 3
    with pytest.raises(SystemExit) as exc:
        main(["norm", "--d", "abc"])
    assert exc.value.code == 2


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--spec", "rademacher", "--d", "3", "--n", "3",
                       "--seeds", "2", "--mc-samples", "2000", "--quad-nodes", "8",
                       "--coefficient", "jensen")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# rvnorm")
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "name,d,n,spec,seed,lower,measured,upper,pass"
    rows = [l for l in lines if not l.startswith("#")][1:]
    assert len(rows) == 6
    assert lines[-1] == "# pass_rate=6/6"


def test_bounds_d2_equality_rows(capsys):
    _, out, _ = run(capsys, "bounds", "--spec", "normal:1,1", "--d", "2", "--seeds", "3",
                    "--which", "comparison")
    rows = [l.split(",") for l in out.splitlines() if l.startswith("d2_comparison")]
    assert len(rows) == 3
    for r in rows:
        # spec "normal:1,1" is quoted, so measured/lower/upper sit at the tail
        lower, measured, upper, passed = map(str.strip, r[-4:])
        assert abs(float(lower) - float(measured)) <= 1e-10 * float(measured)
        assert lower == upper and passed == "true"


def test_bounds_no_applicable_check(capsys):
    code, _, _ = run(capsys, "bounds", "--d", "3", "--which", "lower")
    assert code == 3


def test_submult_report(capsys):
    code, out, _ = run(capsys, "submult", "--spec", "normal:0,2", "--d", "2", "--n", "4",
                       "--restarts", "2", "--iters", "30")
    rep = json.loads(out)
    assert code == 0
    assert rep["criterion_d2"] is True and rep["c_estimate"] <= 1.0 and rep["margin"] >= 0


def test_ratio_sweep(capsys):
    _, out, _ = run(capsys, "ratio", "--spec", "normal:1,1", "--n-min", "2", "--n-max", "10")
    rows = [l.split(",") for l in out.splitlines() if not l.startswith("#")][1:]
    assert [int(r[0]) for r in rows] == list(range(2, 11))
    assert all(float(r[3]) <= 1e-10 for r in rows)
    assert rows[1][2].startswith("0.866025")


def test_stable_report(capsys, afile):
    code, out, _ = run(capsys, "stable", "--in", str(afile), "--seeds", "2", "--mc-samples",
                       "2000", "--quad-nodes", "8", "--d1-samples", "100000")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert lines[0] == "check,seed,lower,measured,upper,closed_form,rel_gap,pass"
    assert lines[1].startswith("stable_d1,") and len(lines) == 4


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nspec = normal:1,1\nn-max = 5\nn_min=3\n")
    _, out, _ = run(capsys, "ratio", "--config", str(cfg))
    rows = [l for l in out.splitlines() if not l.startswith("#")][1:]
    assert [r.split(",")[0] for r in rows] == ["3", "4", "5"]
    _, out, _ = run(capsys, "ratio", "--config", str(cfg), "--n-max", "4")
    rows = [l for l in out.splitlines() if not l.startswith("#")][1:]
    assert [r.split(",")[0] for r in rows] == ["3", "4"]
    assert "# spec=normal:1,1" in out


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("color=blue\n")
    with pytest.raises(ParseError):
        read_config(bad)
    bad.write_text("seed=abc\n")
    with pytest.raises(ParseError):
        read_config(bad)
    bad.write_text("just words\n")
    with pytest.raises(ParseError):
        read_config(bad)


def test_out_file_and_input_untouched(capsys, zfile, tmp_path):
    before = zfile.read_bytes()
    out = tmp_path / "report.json"
    code, stdout, _ = run(capsys, "norm", "--in", str(zfile), "--out", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["method"] == "closed_form_d2"
    assert zfile.read_bytes() == before


def _cli(args, threads):
    env = dict(os.environ, RVNORM_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "rvnorm", *args], env=env,
                          capture_output=True, check=True).stdout


def test_module_entry_point_thread_independent(zfile):
    args = ["norm", "--d", "3", "--in", str(zfile), "--mc-samples", "3000", "--quad-nodes", "16"]
    assert _cli(args, 1) == _cli(args, 4)
