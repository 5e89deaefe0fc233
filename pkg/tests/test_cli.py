import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from cvstab import pipeline
from cvstab.cli import main
from cvstab.dsl import parse

HALF_SHIFT = "code gkp d1=2\ninit 0 0\ndispq 0 1/2\nhomodyne 0\n"
HADAMARD = "code gkp d1=2\ninit 0 0\nfourier 0\nhomodyne 0\n"
CAT = "code rsb d1=2 N=2 primitive=coherent:6\ninit 0 0\ntfourier 0\nkerr 0 1/16 0\ntfourier 0\nphasemeas 0\n"


def cli(tmp_path, text, *args):
    path = tmp_path / "c.cv"
    path.write_text(text)
    out, err = io.StringIO(), io.StringIO()
    code = main([args[0], str(path), *args[1:]], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_strong_run_json(tmp_path):
    code, out, _ = cli(tmp_path, HALF_SHIFT, "run", "--strong", "--report", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "cvstab-report/1"
    assert rep["plan"]["d2"] == 8
    assert rep["strong"]["marginals"]["q0"] == {"1": "1/2", "5": "1/2"}
    assert rep["strong"]["decoded"]["q0"]["1"]["logical"] is None


def test_hadamard_strong_text(tmp_path):
    code, out, _ = cli(tmp_path, HADAMARD, "run")
    assert code == 0
    assert "q0: 0: 1/2 (logical 0), 1: 1/2 (logical 1)" in out


def test_weak_run_reproducible_and_unbiased(tmp_path):
    a = cli(tmp_path, HALF_SHIFT, "run", "--shots", "10000", "--seed", "11", "--report", "json")[1]
    b = cli(tmp_path, HALF_SHIFT, "run", "--shots", "10000", "--seed", "11", "--report", "json")[1]
    assert a == b
    counts = json.loads(a)["weak"]["counts"]["q0"]
    assert set(counts) == {"1", "5"}
    sigma = np.sqrt(10000 * 0.25)
    assert abs(counts["1"] - 5000) <= 3 * sigma


def test_model_postselection(tmp_path):
    code, out, _ = cli(tmp_path, CAT, "run", "--shots", "4000", "--seed", "2", "--model-postselection", "--report", "json")
    rep = json.loads(out)
    ps = rep["weak"]["postselection"]
    assert ps["accepted"] + ps["aborted"] == 4000
    assert abs(ps["accepted"] - 1000) <= 3 * np.sqrt(4000 * 0.25 * 0.75)
    assert rep["postselection_probability"] == "1/4"
    assert sum(rep["weak"]["counts"]["n0"].values()) == ps["accepted"]


def test_dump_state(tmp_path):
    _, out, _ = cli(tmp_path, HALF_SHIFT, "run", "--dump-state", "--report", "json")
    text = json.loads(out)["state"]
    assert text.startswith("tableau d=8 n=1")


@pytest.mark.parametrize("text", [HALF_SHIFT, HADAMARD, CAT])
def test_verify_ok(tmp_path, text):
    code, out, _ = cli(tmp_path, text, "verify", "--report", "json")
    assert code == 0
    v = json.loads(out)["verification"]
    assert v["ok"]
    assert v["dense"]["status"] == "ok"
    assert v["cv"]["status"] == "ok"


def test_verify_mismatch_exit_code(tmp_path):
    # an absurdly tight tolerance turns the finite-squeezing deviation into a mismatch
    code, _, err = cli(tmp_path, HALF_SHIFT, "verify", "--tol", "1e-12")
    assert code == 4 and "mismatch" in err


@pytest.mark.parametrize(
    "text,name",
    [
        ("code gkp d1=2\ntgate 0 quartic\nhomodyne 0\n", "tgate 0 quartic"),
        ("code gkp d1=2\ntgate 0 cubic\nhomodyne 0\n", "tgate 0 cubic"),
        ("code rsb d1=2 N=2\ntgate 0 quartic\nphasemeas 0\n", "tgate 0 quartic"),
        ("code gkp d1=2\ndispq 0 sqrt(2)\n", "dispq 0 sqrt(2)"),
    ],
)
def test_rejections_exit_3(tmp_path, text, name):
    code, _, err = cli(tmp_path, text, "run")
    assert code == 3
    assert name in err and "line 2" in err


def test_method_two_input_violation_exit_3(tmp_path):
    text = "code rsb d1=2 N=2\ninit 0 1\nrot 0 1/24\nphasemeas 0\n"
    code, _, err = cli(tmp_path, text, "run")
    assert code == 3 and "line 2" in err


def test_parse_error_exit_2(tmp_path):
    code, _, err = cli(tmp_path, "code gkp d1=2\ndispq 0 1/0\n", "run")
    assert code == 2 and "line 2" in err


def test_compile_shows_program(tmp_path):
    code, out, _ = cli(tmp_path, HALF_SHIFT, "compile")
    assert code == 0
    assert "d2=8" in out and "\nX 0\n" in out and "M 0 -> q0" in out


def test_wigner_subcommand(tmp_path):
    csv, js = tmp_path / "w.csv", tmp_path / "w.json"
    out = io.StringIO()
    code = main(["wigner", "--code", "cat", "--alpha", "2", "--csv", str(csv), "--json", str(js), "--stride", "4"], out=out)
    assert code == 0
    rep = json.loads(js.read_text())
    assert rep["negativity"]["min_value"] < 0
    assert csv.read_text().startswith("q,p,W\n")


def test_report_is_deterministic():
    c = parse(CAT)
    a = pipeline.to_json(pipeline.run(c, shots=500, seed=4, model_postselection=True))
    b = pipeline.to_json(pipeline.run(c, shots=500, seed=4, model_postselection=True))
    assert a == b


def test_module_entry_point(tmp_path):
    path = tmp_path / "c.cv"
    path.write_text(HADAMARD)
    res = subprocess.run([sys.executable, "-m", "cvstab", "run", str(path)], capture_output=True, text=True)
    assert res.returncode == 0 and "logical 1" in res.stdout


def test_demo_circuits_verify():
    demos = sorted((Path(__file__).parent.parent / "demos" / "circuits").glob("*.cv"))
    assert demos
    for path in demos:
        out, err = io.StringIO(), io.StringIO()
        code = main(["verify", str(path)], out=out, err=err)
        expected = 3 if path.stem in ("tgate_quartic", "irrational_shift") else 0
        assert code == expected, (path.name, err.getvalue())


def test_fock_check_inconclusive_when_defect_large():
    c = parse("code rsb d1=2 N=2 primitive=coherent:2\ninit 0 0\nrot 0 1/24\nphasemeas 0\n")
    v = pipeline.verify(c)["verification"]
    assert v["cv"]["status"] == "inconclusive"
    assert v["cv"]["orthogonality_defect"] > 0.01
    assert v["ok"]
