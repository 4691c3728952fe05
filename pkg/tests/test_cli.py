"""Command-line surface: argument handling, output contracts, exit codes.

Reference values used below are frozen from independent computations in
the library test modules: the N=4 vertical ratio 1.2155625241 and the
N=3 planar quadruple real part sqrt(2)/2 (test_spectrum), the closed
forms H+ = 4 pi w1/(w1+w2) and 2 pi w1/w2 for the five-body bounds
(test_minimize), and gamma(P12) = 16.589... (test_torsion).
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from unchained.cli import main
from unchained.spectrum import vertical_spectrum

TWO_PI = 2.0 * np.pi


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def csv_rows(text):
    rows = []
    for line in text.splitlines():
        if line.startswith("#") or line.startswith("varpi"):
            continue
        rows.append([float(tok) for tok in line.split(",")])
    return rows


def parsed_fields(text):
    fields = {}
    for line in text.splitlines():
        if " = " in line:
            key, _, val = line.partition(" = ")
            fields[key.strip()] = val.strip()
    return fields


# ---------------------------------------------------------------- spectrum

def test_spectrum_vertical_ratio_line(capsys):
    rc, out, _ = run(capsys, "spectrum", "4")
    assert rc == 0
    assert "1.2155625241" in out
    assert "vertical spectrum (units: omega1):" in out


def test_spectrum_horizontal_quadruple_n3(capsys):
    rc, out, _ = run(capsys, "spectrum", "3")
    assert rc == 0
    # 4N - 6 = 6 eigenvalues; the non-Kepler quadruple is +-sqrt(2)/2 +- i
    assert "6 eigenvalues" in out
    assert "0.7071067811865" in out


def test_spectrum_raw_units(capsys):
    rc, out, _ = run(capsys, "spectrum", "4", "--units", "raw")
    assert rc == 0
    assert "0.97831834347851" in out   # omega_1 = sqrt(2 sqrt 2 + 1)/2
    assert "1.1892071150027" in out    # omega_2 = 2**(1/4)


def test_spectrum_counts_grow_with_n(capsys):
    for n in (5, 6, 7):
        rc, out, _ = run(capsys, "spectrum", str(n))
        assert rc == 0
        assert f"{4 * n - 6} eigenvalues" in out


def test_spectrum_rejects_two_bodies(capsys):
    rc, _, err = run(capsys, "spectrum", "2")
    assert rc == 2
    assert "error" in err


def test_spectrum_out_file(capsys, tmp_path):
    path = tmp_path / "spec4.txt"
    rc, out, _ = run(capsys, "spectrum", "4", "--out", str(path))
    assert rc == 0
    assert out == ""
    assert "1.2155625241" in path.read_text()


# ------------------------------------------------------------------- group

def test_group_order_sixteen(capsys):
    rc, out, _ = run(capsys, "group", "4", "2", "1", "1", "1")
    assert rc == 0
    assert "order = 16" in out
    assert "orientation-preserving elements = 8" in out
    assert "dihedral x Z/2 presentation = yes" in out


def test_group_choreography_flag(capsys):
    rc, out, _ = run(capsys, "group", "5", "2", "-1", "2", "1",
                     "--check-choreo")
    assert rc == 0
    assert "simple choreography: yes" in out
    rc, out, _ = run(capsys, "group", "4", "2", "1", "1", "1",
                     "--check-choreo")
    assert rc == 0
    assert "simple choreography: no" in out


def test_group_find_isomorphism(capsys):
    rc, out, _ = run(capsys, "group", "5", "1", "-1", "4", "1",
                     "--find-iso", "5,2,-1,2")
    assert rc == 0
    assert "S(j) = -2 j (mod 5)" in out
    assert "permutation = 0 3 1 4 2" in out


def test_group_find_isomorphism_none(capsys):
    # r - r' odd: no relabelling exists
    rc, out, _ = run(capsys, "group", "5", "1", "-1", "4", "1",
                     "--find-iso", "5,1,-1,3")
    assert rc == 0
    assert "none" in out


def test_group_find_iso_malformed(capsys):
    rc, _, err = run(capsys, "group", "5", "1", "-1", "4", "1",
                     "--find-iso", "5,2")
    assert rc == 2
    assert "find-iso" in err


def test_group_bad_spec_exit_two(capsys):
    rc, _, err = run(capsys, "group", "3", "7", "1", "1", "1")
    assert rc == 2
    assert "mode index" in err


# ------------------------------------------------------------------ bounds

def test_bounds_five_body_chain(capsys):
    rc, out, _ = run(capsys, "bounds", "5", "1", "-1", "4", "1")
    assert rc == 0
    assert "bruteforce: consistent" in out
    spm = vertical_spectrum(5)
    w1, w2 = spm.omegas[0], spm.omegas[1]
    fields = parsed_fields(out)
    assert float(fields["H+"]) == pytest.approx(
        2.0 * TWO_PI * w1 / (w1 + w2), rel=1e-12)
    assert float(fields["H-"]) == pytest.approx(TWO_PI, rel=1e-12)


def test_bounds_five_body_eight_interval(capsys):
    rc, out, _ = run(capsys, "bounds", "5", "2", "-1", "2", "1")
    assert rc == 0
    assert "bruteforce: consistent" in out
    spm = vertical_spectrum(5)
    half = TWO_PI * spm.omegas[0] / spm.omegas[1]
    line = next(l for l in out.splitlines() if l.startswith("interval"))
    lo, hi = (float(tok) for tok in
              line.split("[")[1].split("]")[0].split(","))
    assert lo == pytest.approx(-half, rel=1e-12)
    assert hi == pytest.approx(half, rel=1e-12)


def test_bounds_battery_consistent(capsys):
    for spec in (("3", "1", "-1", "2", "1"), ("6", "2", "-1", "1", "1"),
                 ("7", "3", "1", "2", "3")):
        rc, out, _ = run(capsys, "bounds", *spec)
        assert rc == 0
        assert "bruteforce: consistent" in out


# ---------------------------------------------------------------- continue

def test_continue_csv_stdout(capsys):
    rc, out, _ = run(capsys, "continue", "3", "1", "-1", "2", "1",
                     "--steps", "2", "--step", "0.03")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "# spec=3,1,-1,2,1"
    assert lines[1] == "varpi,amplitude,action,period,angular_momentum_z"
    assert lines[-1] == "# end=max-steps"
    rows = csv_rows(out)
    assert len(rows) == 3
    # onset row: relative equilibrium at the bifurcation frame frequency
    assert rows[0][0] == pytest.approx(-TWO_PI, abs=1e-8)
    assert rows[0][1] == 0.0
    amp = [row[1] for row in rows]
    assert amp == sorted(amp)


def test_continue_out_file_and_summary(capsys, tmp_path):
    path = tmp_path / "p12.csv"
    rc, out, _ = run(capsys, "continue", "3", "1", "-1", "2", "1",
                     "--steps", "1", "--out", str(path))
    assert rc == 0
    assert "end=max-steps" in out
    assert str(path) in out
    assert csv_rows(path.read_text())


def test_continue_json_format(capsys):
    rc, out, _ = run(capsys, "continue", "3", "1", "1", "2", "1",
                     "--steps", "1", "--format", "json")
    assert rc == 0
    data = json.loads(out)
    assert data["spec"] == [3, 1, 1, 2, 1]
    assert data["end_reason"] == "max-steps"
    assert len(data["records"]) == 2
    assert data["records"][0]["amplitude"] == 0.0
    assert data["records"][0]["varpi"] == pytest.approx(-TWO_PI, abs=1e-8)


def test_continue_two_families_parallel(capsys, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    rc, out, _ = run(capsys, "continue",
                     "3", "1", "-1", "2", "1", "3", "1", "1", "2", "1",
                     "--jobs", "2", "--steps", "1",
                     "--out", str(out_a), "--out", str(out_b))
    assert rc == 0
    assert out_a.read_text().startswith("# spec=3,1,-1,2,1")
    assert out_b.read_text().startswith("# spec=3,1,1,2,1")
    assert len(csv_rows(out_a.read_text())) == 2


def test_continue_halved_tolerance_consistency(capsys):
    argv = ("continue", "3", "1", "-1", "2", "1", "--steps", "2",
            "--step", "0.03")
    rc, out_a, _ = run(capsys, *argv)
    rc_b, out_b, _ = run(capsys, *argv, "--tol", "5e-13")
    assert rc == rc_b == 0
    rows_a, rows_b = csv_rows(out_a), csv_rows(out_b)
    assert len(rows_a) == len(rows_b)
    for ra, rb in zip(rows_a, rows_b):
        assert ra[2] == pytest.approx(rb[2], abs=1e-6)


def test_continue_env_tolerance(capsys, monkeypatch):
    argv = ("continue", "3", "1", "1", "2", "1", "--steps", "1")
    monkeypatch.setenv("UNCHAINED_TOL", "1e-10")
    rc, out_env, _ = run(capsys, *argv)
    monkeypatch.delenv("UNCHAINED_TOL")
    rc_b, out_flag, _ = run(capsys, *argv, "--tol", "1e-10")
    assert rc == rc_b == 0
    assert out_env == out_flag


def test_continue_env_tolerance_malformed(capsys, monkeypatch):
    monkeypatch.setenv("UNCHAINED_TOL", "soon")
    rc, _, err = run(capsys, "continue", "3", "1", "1", "2", "1",
                     "--steps", "1")
    assert rc == 2
    assert "UNCHAINED_TOL" in err


def test_continue_spec_arity_checked(capsys):
    rc, _, err = run(capsys, "continue", "3", "1", "-1", "2")
    assert rc == 2
    assert "multiple of 5" in err


def test_continue_out_count_mismatch(capsys, tmp_path):
    rc, _, err = run(capsys, "continue", "3", "1", "-1", "2", "1",
                     "--out", str(tmp_path / "a.csv"),
                     "--out", str(tmp_path / "b.csv"))
    assert rc == 2
    assert "--out" in err or "families" in err


# ----------------------------------------------------------------- torsion

def test_torsion_json_p12(capsys):
    rc, out, _ = run(capsys, "torsion", "3", "1", "-1", "2", "1")
    assert rc == 0
    assert "16.589" in out
    data = json.loads(out)
    assert data["gamma"] == pytest.approx(16.589288688205574, rel=1e-9)
    assert data["spec"] == {"n_bodies": 3, "k": 1, "eta": -1, "r": 2, "s": 1}
    assert data["A2"] is None          # harmonic excluded by symmetry


def test_torsion_json_hiphop(capsys):
    rc, out, _ = run(capsys, "torsion", "4", "2", "1", "1", "1")
    assert rc == 0
    assert json.loads(out)["gamma"] > 19.0


def test_torsion_malformed_spec(capsys):
    # k out of range passes argument parsing, fails spec validation
    rc, _, err = run(capsys, "torsion", "3", "2", "1", "1", "1")
    assert rc == 2
    # eta outside {-1, 1} is rejected by the parser itself
    with pytest.raises(SystemExit) as excinfo:
        main(["torsion", "3", "1", "0", "1", "1"])
    assert excinfo.value.code == 2
    capsys.readouterr()


# ------------------------------------------------------------ global shape

def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["eigenvalues"])
    assert excinfo.value.code == 2


def test_reports_are_deterministic(capsys):
    for argv in (("spectrum", "5"), ("bounds", "4", "1", "1", "1", "1"),
                 ("torsion", "5", "2", "-1", "2", "1")):
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "unchained.cli", "spectrum", "3"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "omega_1 = 0.75983568565159" in proc.stdout
    assert "6 eigenvalues" in proc.stdout
