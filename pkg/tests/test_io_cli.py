import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpcircle import fourier as fs
from qpcircle.cli import EXIT_IO, EXIT_NOT_QP, EXIT_OK, EXIT_SOLVER, main, verify_circle
from qpcircle.io import SCHEMA_VERSION, CircleFile, FamilyFile, SchemaError

HENON_ARGS = ["--map", "henon", "--alpha-cos", "0.24"]


@pytest.fixture(scope="module")
def circle_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    out, plot = d / "circle.json", d / "samples.csv"
    code = main(["circle", *HENON_ARGS, "--seed", "0.1,0", "--out", str(out), "--plot", str(plot),
                 "--samples", "100"])
    assert code == EXIT_OK
    return out, plot


def test_circle_file_round_trip_is_byte_identical(circle_file, tmp_path):
    out, _ = circle_file
    text = out.read_text()
    again = tmp_path / "again.json"
    CircleFile.read(out).write(again)
    assert again.read_text() == text


@given(vals=st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=6, max_size=6),
       rho=st.floats(0, 1, allow_nan=False))
def test_round_trip_preserves_every_bit(henon_spec, vals, rho):
    a = fs.symmetrize(np.array(vals[:3]) + 1j * np.array(vals[3:]))
    cf = CircleFile(henon_spec, fs.CircleSystem(rho, [fs.FourierCircle(a, a[::-1].copy())]), final_defect=1e-15)
    back = CircleFile.loads(cf.dumps())
    np.testing.assert_array_equal(back.system.circles[0].a, cf.system.circles[0].a)
    assert back.rho == rho
    assert back.dumps() == cf.dumps()


def test_circle_file_contents(circle_file):
    obj = json.loads(circle_file[0].read_text())
    assert obj["schema_version"] == SCHEMA_VERSION and obj["d"] == 1
    assert len(obj["circles"][0]["a_re"]) == 2 * obj["N"] + 1
    assert obj["final_defect"] <= 1e-12
    assert obj["provenance"]["seed"] == [0.1, 0.0]


def test_plot_csv(circle_file):
    rows = list(csv.DictReader(circle_file[1].open()))
    assert len(rows) == 100
    assert all(r["component_index"] == "0" for r in rows)
    assert all(math.isfinite(float(r["x"])) and math.isfinite(float(r["y"])) for r in rows)


def test_verify_passes(circle_file, capsys):
    assert main(["verify", "--in", str(circle_file[0])]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_verify_fails_on_perturbed_coefficient(circle_file, tmp_path, capsys):
    obj = json.loads(circle_file[0].read_text())
    N = obj["N"]
    obj["circles"][0]["a_re"][N + 1] += 1e-3
    obj["circles"][0]["a_re"][N - 1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    assert main(["verify", "--in", str(bad)]) == EXIT_SOLVER
    rows = {name: ok for name, _, _, ok in verify_circle(CircleFile.read(bad))}
    assert not rows["defect"] and rows["conjugate symmetry"]


def test_verify_fails_on_broken_symmetry(circle_file, tmp_path):
    obj = json.loads(circle_file[0].read_text())
    obj["circles"][0]["a_im"][obj["N"] + 2] += 1e-6
    bad = tmp_path / "asym.json"
    bad.write_text(json.dumps(obj))
    rows = {name: ok for name, _, _, ok in verify_circle(CircleFile.read(bad))}
    assert not rows["conjugate symmetry"]
    assert main(["verify", "--in", str(bad)]) == EXIT_SOLVER


def test_schema_errors(tmp_path, circle_file):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        CircleFile.read(p)
    assert main(["verify", "--in", str(p)]) == EXIT_IO
    obj = json.loads(circle_file[0].read_text())
    obj["schema_version"] = 99
    p.write_text(json.dumps(obj))
    assert main(["verify", "--in", str(p)]) == EXIT_IO
    obj["schema_version"] = SCHEMA_VERSION
    obj["circles"][0]["a_re"] = [0.0]
    p.write_text(json.dumps(obj))
    with pytest.raises(SchemaError):
        CircleFile.read(p)
    assert main(["verify", "--in", str(tmp_path / "missing.json")]) == EXIT_IO


def test_family_file_rejected_as_circle(tmp_path, circle_file):
    p = tmp_path / "fam.json"
    assert main(["continue", "--in", str(circle_file[0]), "--step", "1e-14", "--out", str(p)]) == EXIT_OK
    with pytest.raises(SchemaError):
        CircleFile.read(p)


def test_classify_exit_codes(capsys, tmp_path):
    out = tmp_path / "c.json"
    assert main(["classify", *HENON_ARGS, "--seed", "0.4,0", "--m", "120000", "--json", str(out)]) == EXIT_OK
    assert "0.2061745148657" in capsys.readouterr().out
    assert main(["classify", *HENON_ARGS, "--seed", "0.3,-0.44", "--m", "120000"]) == EXIT_NOT_QP
    assert main(["classify", *HENON_ARGS, "--seed", "5,5"]) == EXIT_NOT_QP
    assert json.loads(out.read_text())


def test_classify_standard_map(capsys):
    code = main(["classify", "--map", "standard", "--alpha", "0.7853981633974483", "--seed", "3.14159265,1.0",
                 "--m", "100000"])
    assert code == EXIT_OK
    assert "0.8712" in capsys.readouterr().out


def test_circle_rejects_chaotic_seed():
    assert main(["circle", *HENON_ARGS, "--seed", "0.3,-0.44"]) == EXIT_NOT_QP


def test_continue_immediate_underflow(circle_file, tmp_path, capsys):
    out = tmp_path / "family.json"
    code = main(["continue", "--in", str(circle_file[0]), "--step", "1e-14", "--out", str(out)])
    assert code == EXIT_OK
    fam = FamilyFile.read(out)
    assert fam.stop_reason == "StepUnderflow" and len(fam.records) == 1
    assert "StepUnderflow" in capsys.readouterr().out


def test_continue_steps_and_round_trip(circle_file, tmp_path, capsys):
    out = tmp_path / "family.json"
    assert main(["continue", "--in", str(circle_file[0]), "--max-steps", "3", "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    fam = FamilyFile.loads(text)
    assert fam.stop_reason == "MaxSteps" and len(fam.records) == 4
    assert fam.dumps() == text
    rhos = [r["system"].rho for r in fam.records]
    assert all(b > a for a, b in zip(rhos, rhos[1:]))
    spec = fam.spec
    assert all(fs.defect(r["system"], spec) <= 1e-11 for r in fam.records)
    assert "log10 S5" in capsys.readouterr().out


def test_grid_output(capsys):
    assert main(["grid", *HENON_ARGS, "--x", "0.1:0.3:2", "--y", "0:0:1", "--m", "2000"]) == EXIT_OK
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 2 and {r["classification"] for r in rows} <= {"Quasiperiodic", "NonConvergent"}


def test_thread_env(monkeypatch, circle_file):
    monkeypatch.setenv("QPCIRCLE_NUM_THREADS", "1")
    assert main(["verify", "--in", str(circle_file[0])]) == EXIT_OK


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["classify", "--seed", "1"])
