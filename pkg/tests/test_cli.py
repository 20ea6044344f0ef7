import json
import subprocess
import sys

import pytest

from dickelab.cli import main
from dickelab.records import parse


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_separatrix(capsys):
    code, out, _ = run(["separatrix", "--omega-a-min", "0.25", "--omega-a-max", "4", "--omega-a-steps", "6"], capsys)
    assert code == 0
    df = parse(out)
    table = dict(zip(df.column("omega_a"), df.column("gamma_c")))
    assert table[1.0] == 0.5 and table[4.0] == 1.0 and table[0.25] == 0.25
    assert df.metadata["omega_a_steps"] == 6


def test_quadrature_scan_cs_zero_below_half(capsys):
    code, out, _ = run(["quadrature-scan", "--method", "cs", "--gamma-min", "0", "--gamma-max", "0.5", "--gamma-steps", "6"], capsys)
    assert code == 0
    assert all(q == 0 for q in parse(out).column("q_over_sqrtN"))


def test_universal_curve_starts_at_zero(capsys):
    code, out, _ = run(["universal-curve", "--method", "cs", "--gamma-min", "0.3", "--gamma-steps", "4", "--format", "json"], capsys)
    df = parse(out)
    assert code == 0 and df.column("theta")[0] == 0.0 and df.column("q_over_sqrtN")[0] == 0.0


def test_dynamics_first_row(capsys):
    code, out, _ = run(["dynamics", "--atomic-frequency", "19", "--samples", "201"], capsys)
    df = parse(out)
    assert code == 0
    assert df.rows[0][1:] == pytest.approx([1.0, 1.0], abs=1e-12)
    assert df.summary["max_deviation"] < 0.02


def test_exponent_summary(capsys):
    code, out, _ = run(["exponent", "--j-list", "2.5,5,10", "--grid-points", "12"], capsys)
    df = parse(out)
    assert code == 0
    assert set(df.summary) == {"exponent", "amplitude", "intercept", "sigma", "ci95", "n_points"}
    assert df.metadata["resolved_method"] == "exact-even"


def test_matrix_dump(capsys):
    code, out, _ = run(["matrix", "--n-atoms", "1", "--nu-max", "1", "--gamma", "0.5"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "4 6"
    assert "0 3 0.5" in lines


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nomega-a-min = 1\nomega_a_max = 2\nomega_a_steps = 3\n")
    code, out, _ = run(["separatrix", "--config", str(cfg), "--omega-a-max", "4"], capsys)
    assert code == 0
    assert parse(out).column("omega_a") == [1.0, 2.5, 4.0]


def test_errors_are_machine_readable(tmp_path, capsys):
    code, _, err = run(["matrix", "--n-atoms", "0"], capsys)
    assert code != 0 and json.loads(err)["error"] == "ValueError"
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 3\n")
    code, _, err = run(["separatrix", "--config", str(cfg)], capsys)
    assert code != 0 and "nonsense" in json.loads(err)["message"]
    code, _, err = run(["separatrix", "--omega-a-min", "3", "--omega-a-max", "1"], capsys)
    assert code != 0 and json.loads(err)["message"]


def test_output_file_byte_identical(tmp_path):
    argv = ["quadrature-scan", "--n-atoms", "4", "--gamma-steps", "4", "--format"]
    for fmt in ("csv", "json"):
        paths = [tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"]
        for p in paths:
            assert main(argv + [fmt, "--out", str(p)]) == 0
        a, b = (p.read_bytes() for p in paths)
        assert a == b
        assert parse(a.decode()).render(fmt).encode() == a


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dickelab", "separatrix", "--omega-a-steps", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("# dickelab separatrix")


def test_repro_quick(tmp_path, capsys):
    code, out, _ = run(["repro", "--quick", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "separatrix.csv" in names and "exponent_sas.csv" in names
    assert len(out.splitlines()) == len(names)
