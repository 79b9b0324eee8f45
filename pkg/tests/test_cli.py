import json
import subprocess
import sys

import pytest

from mpchain.analysis import CSV_HEADER, parse_csv
from mpchain.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return parse_csv(text.encode())


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--g", "0.2", "--sigma", "-1")
    assert code == 0
    assert out.splitlines()[0] == ",".join(CSV_HEADER)
    vals = {r.quantity: r.value for r in rows(out)}
    assert vals["lambda1"] == pytest.approx(1.4)
    assert vals["lambda3"] == pytest.approx(-1)


@pytest.mark.parametrize("argv,quantity", [
    (["entropy", "--g", "0.3", "--n", "15"], "entropy"),
    (["entropy", "--g", "0.3", "--mode", "thermo"], "entropy"),
    (["negativity", "--g", "0.05", "--n", "20", "--r", "3"], "negativity"),
    (["correlator", "--g", "0.1", "--r", "4", "--mode", "thermo"], "correlator-zz"),
    (["correlator", "--kind", "xy", "--g", "-0.1", "--r", "2", "--mode", "thermo"], "correlator-xy"),
])
def test_single_quantities(capsys, argv, quantity):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    (row,) = rows(out)
    assert row.quantity == quantity and row.error == ""


def test_log_base(capsys):
    _, out2, _ = run(capsys, "entropy", "--g", "0.3", "--n", "15")
    _, oute, _ = run(capsys, "entropy", "--g", "0.3", "--n", "15", "--log-base", "e")
    assert rows(oute)[0].value == pytest.approx(rows(out2)[0].value * 0.6931471805599453)


def test_range_and_nmax(capsys):
    _, out, _ = run(capsys, "range", "--g", "0.02")
    vals = {r.quantity: r.value for r in rows(out)}
    assert vals["range_exact"] == 15
    _, out, _ = run(capsys, "nmax", "--g", "0.15", "--r", "4", "--cap", "80")
    assert rows(out)[0].value == 8
    _, out, _ = run(capsys, "nmax", "--g", "0.3", "--r", "2", "--cap", "40")
    assert rows(out)[0].error == ">= 40"


def test_hamiltonian_check(capsys):
    code, out, _ = run(capsys, "hamiltonian", "--check", "--g", "1", "--sigma", "-1", "--n", "6")
    assert code == 0
    vals = {r.quantity: r.value for r in rows(out)}
    assert [vals[f"J{k}"] for k in range(1, 7)] == pytest.approx([3, 1, 0, 0, 0, 0])
    assert vals["ground_state_residual"] < 1e-10


def test_oracle_check(capsys):
    code, out, err = run(capsys, "oracle-check", "--n-max", "5")
    assert code == 0
    assert "pass" in err
    assert all(r.error == "" for r in rows(out))


def test_oracle_check_failure_exit(capsys):
    code, out, _ = run(capsys, "oracle-check", "--n-max", "4", "--tol", "-1")
    assert code == 2


def test_sweep_spec_file_and_json(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"quantity": "negativity", "g_values": [0.1], "N_list": [8], "r_list": [2, 3]}))
    out_path = tmp_path / "out.json"
    code, _, _ = run(capsys, "sweep", "--spec", str(spec), "--format", "json", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert [r["r"] for r in doc["rows"]] == [2, 3]


def test_sweep_preset_deterministic(capsys):
    _, a, _ = run(capsys, "sweep", "--preset", "fig5odd")
    _, b, _ = run(capsys, "sweep", "--preset", "fig5odd")
    assert a == b and len(rows(a)) == 61 * 5


@pytest.mark.parametrize("argv", [
    ["entropy", "--sigma", "3"],
    ["entropy", "--log-base", "10"],
    ["range", "--g", "0"],
    ["negativity", "--r", "30", "--n", "10"],
    ["sweep", "--spec", "/nonexistent.json"],
    ["sweep"],
    ["bogus"],
])
def test_validation_exit_code(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 1


def test_bad_out_path(capsys, tmp_path):
    code, _, err = run(capsys, "range", "--g", "0.1", "--out", str(tmp_path / "x" / "y.csv"))
    assert code == 1 and "y.csv" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mpchain", "range", "--g", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("sigma,mode,g,N,r,quantity,value,error")
