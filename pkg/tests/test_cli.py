import csv
import json

import numpy as np
import pytest

from fenchel_young import fy_loss, sparsemax
from fenchel_young.cli import main, read_jsonl


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--entropy", "tsallis:2", "--theta", "0.5,0.2,-0.3")
    assert code == 0
    res = json.loads(out)
    np.testing.assert_allclose(res["p"], sparsemax([0.5, 0.2, -0.3]), atol=1e-9)
    code, out, _ = run(capsys, "predict", "--entropy", "shannon", "--theta", "0,0",
                       "--temperature", "2")
    assert json.loads(out)["p"] == pytest.approx([0.5, 0.5])


def test_predict_errors(capsys):
    code, _, err = run(capsys, "predict", "--entropy", "cubic", "--theta", "0,1")
    assert code == 1 and err.startswith("fy: error:") and "unknown entropy" in err
    with pytest.raises(SystemExit):
        main(["predict", "--entropy", "shannon", "--theta", "a,b"])


def test_loss(capsys):
    code, out, _ = run(capsys, "loss", "--spec", "shannon", "--theta", "0,0", "--target", "1,0")
    res = json.loads(out)
    assert code == 0 and res["loss"] == pytest.approx(np.log(2))
    assert res["grad"] == pytest.approx([-0.5, 0.5])
    code, out, _ = run(capsys, "loss", "--spec", "zero", "--cost", "zero-one",
                       "--theta", "0,0", "--target", "1,0")
    assert json.loads(out)["loss"] == pytest.approx(1.0)
    code, _, err = run(capsys, "loss", "--spec", "shannon", "--theta", "0,0",
                       "--target", "0.7,0.7")
    assert code == 1 and "fy: error:" in err


def test_ova(capsys):
    code, out, _ = run(capsys, "ova", "--phi", "sparse-sigmoid", "--theta", "2,0,-2")
    assert code == 0 and json.loads(out)["prediction"] == [1, 0.5, 0]
    code, out, _ = run(capsys, "ova", "--phi", "fermi-dirac", "--theta", "0,0",
                       "--target", "1,0")
    assert json.loads(out)["loss"] == pytest.approx(2 * np.log(2))


def test_structured_sequence(capsys, tmp_path):
    theta = np.zeros((2, 2, 2))
    theta[0] = [[1.0, 1.0], [0.0, 0.0]]  # start in state 0
    theta[1] = [[0.0, 0.0], [2.0, 0.0]]  # 0 -> 1
    path = tmp_path / "seq.json"
    path.write_text(json.dumps({"n": 2, "m": 2, "theta": theta.tolist(), "y": [0, 1]}))
    code, out, _ = run(capsys, "structured", "--polytope", "sequence", "--loss", "crf",
                       "--potentials", str(path))
    res = json.loads(out)
    assert code == 0 and res["map_path"] == [0, 1] and res["map_score"] == pytest.approx(3.0)
    assert res["loss"] > 0 and "marginals" in res
    code, out, _ = run(capsys, "structured", "--polytope", "sequence", "--loss", "sparsemap",
                       "--potentials", str(path), "--target", "0,1")
    res = json.loads(out)
    assert res["loss"] == 0.0 and res["support"] == [{"path": [0, 1], "weight": 1.0}]


def test_structured_permutahedron(capsys, tmp_path):
    path = tmp_path / "perm.json"
    path.write_text(json.dumps({"w": [3, 2, 1], "theta": [0.2, 0.9, 0.5]}))
    code, out, _ = run(capsys, "structured", "--polytope", "permutahedron", "--loss", "hinge",
                       "--potentials", str(path), "--target", "3,2,1")
    res = json.loads(out)
    assert code == 0 and res["map"] == [1, 3, 2]
    assert sum(res["projection"]) == pytest.approx(6.0)
    assert res["loss"] > 0
    code, _, err = run(capsys, "structured", "--polytope", "permutahedron", "--loss", "crf",
                       "--potentials", str(path))
    assert code == 1 and "sequences" in err


def test_synth_train_experiment(capsys, tmp_path):
    data = tmp_path / "data"
    code, out, _ = run(capsys, "synth", "--seed", "1", "--d", "3", "--p", "20",
                       "--n-train", "60", "--n-dev", "20", "--n-test", "20", "--out", str(data))
    assert code == 0 and json.loads(out)["n_train"] == 60
    train = read_jsonl(data / "train.jsonl")
    assert train.X.shape == (60, 20)
    assert json.loads((data / "config.json").read_text())["seed"] == 1

    model = tmp_path / "model.json"
    code, out, _ = run(capsys, "train", "--loss", "tsallis:1.5", "--lambda", "5",
                       "--data", str(data / "train.jsonl"), "--out", str(model))
    assert code == 0
    m = json.loads(model.read_text())
    W = np.array(m["W"]).reshape(m["shape"])
    assert m["converged"] and W.shape == (3, 20)
    expected = np.sum(fy_loss("tsallis:1.5", train.X @ W.T, train.Y)) + 2.5 * np.sum(W * W)
    assert m["objective"] == pytest.approx(expected, rel=1e-9)

    code, out, _ = run(capsys, "train", "--mode", "dual", "--loss", "tsallis:1.5",
                       "--lambda", "5", "--data", str(data / "train.jsonl"), "--tol", "1e-6")
    dual = json.loads(out)
    assert dual["duality_gap"] <= 1e-6
    assert dual["objective"] == pytest.approx(m["objective"], rel=1e-5)

    report, table = tmp_path / "report.json", tmp_path / "table.csv"
    code, out, _ = run(capsys, "experiment", "label-prop", "--data", str(data),
                       "--alphas", "1,2", "--lambdas", "1,100", "--out", str(report),
                       "--csv", str(table))
    assert code == 0
    rep = json.loads(report.read_text())
    assert rep["alpha"] in (1.0, 2.0) and len(rep["cells"]) == 4
    assert len(list(csv.DictReader(table.open()))) == 2


def test_train_bad_data(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x": [1.0]}\n')
    code, _, err = run(capsys, "train", "--loss", "shannon", "--lambda", "1", "--data", str(bad))
    assert code == 1 and "bad.jsonl:1" in err
    code, _, err = run(capsys, "train", "--loss", "shannon", "--lambda", "1",
                       "--data", str(tmp_path / "missing.jsonl"))
    assert code == 1


def test_bench(capsys, tmp_path):
    out = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", "solvers", "--d", "5", "--draws", "5", "--repeats", "1",
                     "--out", str(out))
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and [r["method"] for r in rows] == ["bisection", "brent",
                                                         "projected-gradient"]
