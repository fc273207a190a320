import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from tropctl.cli import main
from tropctl.io import (
    InputError,
    matrix_from_json,
    matrix_to_json,
    semimodule_from_json,
    semimodule_to_json,
)
from tropctl.semimodule import Semimodule, semimodule_equal
from tropctl.semiring import NEG_INF

DATA = Path(__file__).parent / "data"
N = NEG_INF


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_timetable_reports_period(capsys):
    code, out, _ = run(capsys, "timetable", DATA / "figure1.json", "--L", 15, "--M", 4, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["lambda"] == 14
    assert doc["periodic"]["x0"] == [17, 14, 17, 18, 3, 0, 3, 4]
    assert doc["stabilized_at"] == 4


def test_timetable_infeasible(capsys):
    code, out, _ = run(capsys, "timetable", DATA / "figure1.json", "--L", 0)
    assert code == 1 and "infeasible" in out


def test_star_golden(capsys, tmp_path):
    from tropctl.network import constraint_matrix, figure_one

    e = write(tmp_path, "e.json", {"rows": matrix_to_json(constraint_matrix(figure_one()))})
    code, out, _ = run(capsys, "star", e, "--format", "json")
    assert code == 0
    golden = json.loads((DATA / "e_star_figure1.json").read_text())["rows"]
    assert json.loads(out)["rows"] == golden


def test_star_diverges(capsys, tmp_path):
    e = write(tmp_path, "e.json", [[1]])
    code, out, _ = run(capsys, "star", e)
    assert code == 1 and "diverged" in out


def test_invariant_cap(capsys):
    code, out, _ = run(capsys, "invariant", DATA / "ex22.json", "--cap", 10)
    assert code == 1
    assert "did not stabilize within 10 steps" in out


def test_invariant_collapses(capsys):
    code, out, _ = run(capsys, "invariant", DATA / "ex21.json", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["stabilized_at"] == 2
    assert doc["K_star"] == {"dim": 2, "generators": []}


def test_invariant_nmin(capsys):
    code, out, _ = run(capsys, "invariant", DATA / "nmin_k.json", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["stabilized_at"] == 2
    assert sorted(map(str, doc["K_star_nmin"])) == sorted(map(str, [[1, 1], [0, "+inf"], ["+inf", "+inf"]]))


def test_feedback_nmin_negative(capsys):
    code, out, _ = run(capsys, "feedback", DATA / "nmin_kstar.json")
    assert code == 1 and "not algebraically invariant" in out


def test_feedback_found(capsys, tmp_path):
    problem = {
        "A": [[0, "-inf"], ["-inf", 0]],
        "B": [[0], [0]],
        "X": {"dim": 2, "generators": [[0, -1], [0, "-inf"]]},
    }
    code, out, _ = run(capsys, "feedback", write(tmp_path, "p.json", problem), "--format", "json")
    assert code == 0 and json.loads(out)["status"] == "found"


def test_solve_and_volume(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", write(tmp_path, "s.json", {"D": [[1, 0]], "C": [[0, 0]]}), "--format", "json")
    assert code == 0
    X = semimodule_from_json(json.loads(out)["solutions"], "out")
    assert [0, 5] in X and [0, 0] not in X
    band = write(tmp_path, "k.json", {"dim": 2, "generators": [[0, 1], [0, 3]]})
    code, out, _ = run(capsys, "volume", band, "--format", "json")
    assert code == 0 and json.loads(out)["volume"] == 3
    open_band = write(tmp_path, "k2.json", {"dim": 2, "generators": [[0, "-inf"]]})
    assert run(capsys, "volume", open_band)[0] == 1


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", DATA / "figure1.json", "--x0=17,15,18,19,4,0,4,5", "--format", "json")
    doc = json.loads(out)
    assert code == 1
    assert doc["trajectory"][1] == [32, 29, 31, 31]
    assert doc["violations"][0] == {"kind": "connection", "step": 2, "direction": 3, "other": 4, "value": 6, "bound": 4}
    code, out, _ = run(
        capsys, "simulate", DATA / "figure1.json", "--x0=17,15,18,19,4,0,4,5", "--feedback", DATA / "f_bar.json"
    )
    assert code == 0 and "x(4) = [74, 71, 74, 75]" in out
    code, _, _ = run(capsys, "simulate", DATA / "figure1.json", "--x0=17,14,17,18,3,0,3,4", "--period", 14)
    assert code == 0


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["star", "missing.json"], "missing.json"),
        (["invariant", "{data}/figure1.json"], "missing field 'A'"),
        (["simulate", "{data}/figure1.json", "--x0=1,2"], "--x0"),
        (["simulate", "{data}/figure1.json", "--x0=0,0,0,0,5,5,5,5"], "violates"),
        (["volume", "{data}/ex21.json"], "'dim' and 'generators'"),
    ],
)
def test_input_errors(capsys, argv, fragment):
    code, _, err = run(capsys, *[a.format(data=DATA) for a in argv])
    assert code == 2
    assert fragment in err


def test_bad_json_names_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = run(capsys, "star", bad)
    assert code == 2 and "bad.json" in err and "invalid JSON" in err


def test_bad_field_names_field(capsys, tmp_path):
    p = write(tmp_path, "p.json", {"A": [[0, 1.5]], "B": [[0]], "K": {"dim": 2, "generators": [[0, 0]]}})
    code, _, err = run(capsys, "invariant", p)
    assert code == 2 and "p.json: A" in err


def test_unknown_verb(capsys):
    assert main(["frobnicate"]) == 2


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("TROPCTL_THREADS", "0")
    code, _, err = run(capsys, "volume", DATA / "k_star_figure1.json")
    assert code == 2 and "TROPCTL_THREADS" in err
    monkeypatch.setenv("TROPCTL_THREADS", "4")
    assert run(capsys, "star", DATA / "e_star_figure1.json")[0] == 0


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        target = tmp_path / f"out{i}.json"
        assert main(["timetable", str(DATA / "figure1.json"), "--format", "json", "-o", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_round_trips():
    rng = np.random.default_rng(51)
    for _ in range(50):
        M = rng.integers(-5, 6, size=(3, 4)).astype(float)
        M[rng.random((3, 4)) < 0.3] = N
        back = matrix_from_json(json.loads(json.dumps(matrix_to_json(M))), "m")
        np.testing.assert_array_equal(back, M)
        X = Semimodule.from_generators(M)
        Y = semimodule_from_json(json.loads(json.dumps(semimodule_to_json(X))), "x")
        assert semimodule_equal(X, Y)


def test_matrix_parse_errors():
    with pytest.raises(InputError):
        matrix_from_json([[1, 2], [3]], "m")
    with pytest.raises(InputError):
        matrix_from_json([[True]], "m")
    with pytest.raises(InputError):
        matrix_from_json({"cols": []}, "m")


@pytest.mark.skipif(shutil.which("tropctl") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["tropctl", "invariant", str(DATA / "ex22.json"), "--cap", "10"], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert "did not stabilize within 10 steps" in proc.stdout
