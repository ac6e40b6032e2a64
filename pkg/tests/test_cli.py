import json
import math
import subprocess
import sys

import pytest

from cliquemc.cli import main
from cliquemc.model import CliqueCover, Polymer, PolymerModel, save_model
from cliquemc.model import partition_function_exact


@pytest.fixture
def model_path(tmp_path):
    model = PolymerModel(
        [Polymer(0, math.log(0.3)), Polymer(1, math.log(0.2)), Polymer(2, math.log(0.4))],
        [(0, 1)],
    )
    cover = CliqueCover([[0, 1], [2]])
    path = tmp_path / "m.json"
    save_model(path, model, cover)
    return str(path)


@pytest.fixture
def graph_path(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("2 2\n0 0\n0 1\n1 0\n1 1\n")
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_exact_z(model_path, capsys):
    code, out = run_cli(["exact-z", "--model", model_path], capsys)
    assert code == 0
    doc = json.loads(out)
    z = 1 + 0.3 + 0.2 + 0.4 + 0.12 + 0.08
    assert doc["log_z"] == pytest.approx(math.log(z), abs=1e-12)
    assert doc["z"] == pytest.approx(z, abs=1e-12)


def test_check_conditions(model_path, capsys):
    code, out = run_cli(["check-conditions", "--model", model_path], capsys)
    assert code == 0
    doc = json.loads(out)
    names = {c["condition_name"]: c for c in doc["conditions"]}
    assert names["clique_dynamics"]["holds"]
    assert "clique_truncation" in doc


def test_check_conditions_csv(model_path, capsys):
    code, out = run_cli(
        ["check-conditions", "--model", model_path, "--format", "csv"], capsys
    )
    assert code == 0
    assert out.splitlines()[0] == "condition,holds,worst_polymer,min_slack"


def test_estimate_z_deterministic(model_path, capsys):
    args = ["estimate-z", "--model", model_path, "--epsilon", "0.5", "--seed", "7"]
    code1, out1 = run_cli(args, capsys)
    code2, out2 = run_cli(args, capsys)
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical
    doc = json.loads(out1)
    exact = math.exp(partition_function_exact_from(model_path))
    assert abs(doc["z_hat"] / exact - 1) < 0.5


def partition_function_exact_from(path):
    from cliquemc.model import load_model

    model, _ = load_model(path)
    return partition_function_exact(model)


def test_sample(model_path, capsys):
    code, out = run_cli(
        ["sample", "--model", model_path, "--trials", "5", "--steps", "50"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert len(doc["families"]) == 5


def test_truncate(model_path, tmp_path, capsys):
    out_path = tmp_path / "t.json"
    code, out = run_cli(
        ["truncate", "--model", model_path, "--k", "1.0", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert len(doc["polymers"]) == 3  # all sizes default 1.0 <= k


def test_thresholds(capsys):
    code, out = run_cli(
        ["thresholds", "--row", "hardcore_expander", "--delta", "3", "--alpha", "1"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["term1"] == pytest.approx(30.58067057, abs=1e-6)
    assert doc["term2"] == pytest.approx(math.exp(11), rel=1e-9)
    assert doc["threshold"] == doc["term2"]


def test_hardcore(graph_path, capsys):
    code, out = run_cli(
        [
            "hardcore",
            "--graph",
            graph_path,
            "--lambda",
            "60000",
            "--alpha",
            "1",
            "--epsilon",
            "1",
            "--no-amplify",
            "--exact",
        ],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["relative_error"]) < 1.1


def test_tv_curve(model_path, capsys):
    code, out = run_cli(
        [
            "tv-curve",
            "--model",
            model_path,
            "--trials",
            "2000",
            "--steps-grid",
            "1",
            "100",
        ],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    tvs = {row["steps"]: row["tv"] for row in doc["curve"]}
    assert tvs[100] < tvs[1]


def test_exit_code_parse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main(["exact-z"])  # missing --model
    assert exc.value.code == 3


def test_exit_code_precondition(tmp_path, capsys):
    # heavy triangle: clique dynamics fails -> estimate-z refuses with code 2
    model = PolymerModel(
        [Polymer(i, math.log(9.0)) for i in range(3)], [(0, 1), (0, 2), (1, 2)]
    )
    path = tmp_path / "bad.json"
    save_model(path, model, CliqueCover([[0, 1, 2]]))
    code = main(["estimate-z", "--model", str(path), "--epsilon", "0.5"])
    assert code == 2


def test_exit_code_graph_parse(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("2 2\nnot an edge line\n")
    code = main(
        ["hardcore", "--graph", str(path), "--lambda", "1", "--alpha", "1", "--epsilon", "1"]
    )
    assert code == 3


def test_console_script(model_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cliquemc.cli", "exact-z", "--model", model_path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "log_z" in proc.stdout
