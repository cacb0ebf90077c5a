import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roesser_lmi.cli import main
from roesser_lmi.errors import ModelFileError
from roesser_lmi.model import NdRoesserModel, RoesserModel
from roesser_lmi.modelfile import dumps_model, load_model, load_schema, parse_model

from conftest import MODELS

REPORT_SCHEMA = load_schema("report.schema.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    return code, doc


def write(tmp_path, doc, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return p


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", MODELS / "s1.json")
    assert code == 0 and "delta = (1+0j)" in out
    code, out, _ = run(capsys, "oracle", MODELS / "s2.json")
    assert code == 1 and "counterexample" in out


def test_certify_command(capsys):
    code, out, _ = run(capsys, "certify", MODELS / "s1.json")
    assert code == 0 and "degree nu: 0" in out and "P_0 =" in out
    code, _, _ = run(capsys, "certify", MODELS / "s2.json")
    assert code == 1
    code, out, _ = run(capsys, "certify", MODELS / "needs_degree.json", "--max-degree", "0")
    assert code == 2 and "increase max-degree" in out


def test_certify_basis_mismatch(capsys):
    code, _, err = run(capsys, "certify", MODELS / "s1.json", "--basis", "moebius")
    assert code == 64 and "moebius" in err.lower()


def test_simulate_command(capsys, tmp_path):
    csv = tmp_path / "s.csv"
    code, _, _ = run(capsys, "simulate", MODELS / "s1.json", "--csv", csv)
    assert code == 0 and csv.read_text().startswith("d,s\n")
    assert run(capsys, "simulate", MODELS / "s2.json")[0] == 1
    assert run(capsys, "simulate", MODELS / "mixed.json")[0] == 64
    assert run(capsys, "simulate", MODELS / "s1.json", "--grid", "5x5")[0] == 64


def test_full_precision_coefficients(capsys):
    code, doc = run_json(capsys, "certify", MODELS / "s1.json")
    _, out, _ = run(capsys, "certify", MODELS / "s1.json")
    p0 = doc["P"][0]["re"][0][0]
    assert repr(p0) in out


@pytest.mark.parametrize("command", ["oracle", "certify", "simulate"])
@pytest.mark.parametrize("model", ["s1", "s2", "mixed", "nd3", "needs_degree", "bad"])
def test_json_validates(capsys, command, model):
    code, doc = run_json(capsys, command, MODELS / f"{model}.json")
    assert doc["command"] == command
    assert code in (0, 1, 2, 64)


def test_json_a22_and_indeterminate(capsys, tmp_path):
    hot = write(tmp_path, {"n": 2, "kinds": ["shift", "shift"], "blocks": [[[[0.1]], [[0.1]]], [[[0.1]], [[1.5]]]]})
    for command in ("oracle", "certify"):
        code, doc = run_json(capsys, command, hot)
        assert code == 1
    pole = write(tmp_path, {"n": 2, "kinds": ["derivative", "derivative"],
                            "blocks": [[[[-1.0]], [[1.0]]], [[[1.0]], [[-1e-300]]]]}, "pole.json")
    code, doc = run_json(capsys, "oracle", pole)
    assert code in (1, 2)


@pytest.mark.parametrize("doc,fragment", [
    ("{not json", "line 1"),
    ({"n": 2, "kinds": ["shift"], "blocks": []}, "kinds"),
    ({"n": 2, "kinds": ["shift", "shift"], "blocks": [[[[1.0]], [[1.0]]], [[[1.0]], [[1.0, 2.0]]]]},
     "blocks[1][1]"),
    ({"n": 2, "kinds": ["shift", "sideways"], "blocks": []}, "kinds[1]"),
    ({"n": 2, "kinds": ["shift", "shift"], "blocks": [[[["x"]], [[1.0]]], [[[1.0]], [[1.0]]]]}, "blocks[0][0][0][0]"),
    ({"n": 2, "kinds": ["shift", "shift"], "blocks": [[[[1.0]]], [[[1.0]], [[1.0]]]]}, "blocks[0]"),
])
def test_malformed_files(capsys, tmp_path, doc, fragment):
    p = write(tmp_path, doc)
    code, _, err = run(capsys, "oracle", p)
    assert code == 64 and fragment in err
    with pytest.raises(ModelFileError):
        load_model(p)


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "oracle", tmp_path / "nope.json")[0] == 64


def test_bad_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("ROESSER_LMI_THREADS", "1")
    assert run(capsys, "oracle", MODELS / "s1.json")[0] == 0
    monkeypatch.setenv("ROESSER_LMI_THREADS", "many")
    assert run(capsys, "oracle", MODELS / "s1.json")[0] == 64


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_model_round_trip(k1, k2, data):
    a = np.array(data.draw(st.lists(finite, min_size=(k1 + k2) ** 2, max_size=(k1 + k2) ** 2))).reshape(k1 + k2, -1)
    m = RoesserModel.from_matrix(a, k1, "shift", "derivative", name="x")
    back = parse_model(json.loads(dumps_model(m)))
    assert np.array_equal(back.matrix, m.matrix) and back.name == "x"
    assert (back.kind1, back.kind2) == (m.kind1, m.kind2)


def test_nd_round_trip(rng):
    blocks = [[rng.standard_normal((i + 1, j + 1)) for j in range(3)] for i in range(3)]
    m = NdRoesserModel(blocks, ["shift", "derivative", "shift"])
    back = parse_model(json.loads(dumps_model(m)))
    assert isinstance(back, NdRoesserModel)
    assert np.array_equal(back.matrix, m.matrix)


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "roesser_lmi.cli", "oracle", str(MODELS / "s2.json")],
                         capture_output=True, text=True)
    assert out.returncode == 1
