import csv
import io
import json

import numpy as np
import pytest

from fenchel_young import (MetricsReport, SynthConfig, bench_solvers, bisect, parse_grid,
                           reference_instance, run_label_proportion, synth_generate)
from fenchel_young.synth import SynthData


def test_deterministic():
    a = synth_generate(seed=3, n_train=40, n_dev=10, n_test=10, d=4, p=30)
    b = synth_generate(SynthConfig(seed=3, n_train=40, n_dev=10, n_test=10, d=4, p=30))
    c = synth_generate(seed=4, n_train=40, n_dev=10, n_test=10, d=4, p=30)
    for name in ("train", "dev", "test"):
        np.testing.assert_array_equal(getattr(a, name).X, getattr(b, name).X)
        np.testing.assert_array_equal(getattr(a, name).Y, getattr(b, name).Y)
    assert not np.array_equal(a.train.Y, c.train.Y)


def test_shapes_and_simplex_rows():
    data = synth_generate(seed=0, n_train=50, n_dev=20, n_test=30, d=6, p=40)
    assert data.train.X.shape == (50, 40) and data.train.Y.shape == (50, 6)
    assert data.dev.X.shape == (20, 40) and data.test.Y.shape == (30, 6)
    for split in (data.train, data.dev, data.test):
        assert np.all(split.Y >= 0)
        np.testing.assert_allclose(split.Y.sum(axis=1), 1.0)
    # standardized with training statistics
    np.testing.assert_allclose(data.train.X.mean(axis=0), 0.0, atol=1e-12)


def test_label_count_controls_sparsity():
    one = synth_generate(seed=0, n_train=400, n_dev=0, n_test=0, d=10, p=50,
                         label_count_mean=1.0)
    many = synth_generate(seed=0, n_train=400, n_dev=0, n_test=0, d=10, p=50,
                          label_count_mean=5.0)
    onehot = lambda Y: np.mean(Y.max(axis=1) == 1.0)  # noqa: E731
    # zero-truncated Poisson(1): P(K = 1) = e^-1 / (1 - e^-1) = 0.582, plus repeated labels
    assert 0.55 < onehot(one.train.Y) < 0.8
    assert onehot(many.train.Y) < 0.1
    assert SynthConfig(d=40).labels_per_doc == 4.0
    assert SynthConfig(d=5).labels_per_doc == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(d=1)
    with pytest.raises(ValueError):
        SynthConfig(n_dev=-1)
    with pytest.raises(ValueError):
        SynthConfig(label_count_mean=0.0)


def test_reference_instance():
    data = reference_instance()
    assert data.X.shape == (100, 20) and data.Y.shape == (100, 5)
    assert np.mean(data.Y.max(axis=1) == 1.0) < 0.9


def test_parse_grid():
    assert parse_grid("1.0:2.0:0.5") == [1.0, 1.5, 2.0]
    assert parse_grid("1.0:2.0:0.1")[-1] == 2.0 and len(parse_grid("1.0:2.0:0.1")) == 11
    assert parse_grid("1e-2:1e2:log") == pytest.approx([0.01, 0.1, 1.0, 10.0, 100.0])
    assert parse_grid("0.5,2") == [0.5, 2.0]
    assert parse_grid("3") == [3.0]
    for bad in ("1:2", "1:2:0", "0:1:log", "a,b"):
        with pytest.raises(ValueError):
            parse_grid(bad)


@pytest.fixture(scope="module")
def small_run():
    data = synth_generate(seed=2, n_train=150, n_dev=40, n_test=60, d=4, p=40)
    return data, run_label_proportion(data, [1.0, 1.5, 2.0], [1.0, 100.0], max_iter=300)


def test_grid_report(small_run):
    data, report = small_run
    assert len(report.cells) == 6 and len(report.per_alpha) == 3
    assert report.alpha in (1.0, 1.5, 2.0) and report.lam in (1.0, 100.0)
    chosen = min(report.per_alpha, key=lambda r: r["dev_js"])
    assert report.js == chosen["test_js"] and report.mse == chosen["test_mse"]
    assert 0 <= report.js <= np.log(2)
    again = run_label_proportion(data, [1.0, 1.5, 2.0], [1.0, 100.0], max_iter=300)
    assert again.to_json() == report.to_json()


def test_report_serialization(small_run):
    _, report = small_run
    parsed = json.loads(report.to_json())
    assert parsed["alpha"] == report.alpha and parsed["config"]["d"] == 4
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert [float(r["alpha"]) for r in rows] == [1.0, 1.5, 2.0]
    assert set(rows[0]) == {"alpha", "lam", "dev_js", "test_js", "test_mse"}


def test_selection_ignores_test_split(small_run):
    data, report = small_run
    rng = np.random.default_rng(0)
    scrambled_test = type(data.test)(data.test.X, rng.dirichlet(np.ones(4), size=len(data.test.Y)))
    other = run_label_proportion(SynthData(data.train, data.dev, scrambled_test, data.config),
                                 [1.0, 1.5, 2.0], [1.0, 100.0], max_iter=300)
    assert (other.alpha, other.lam) == (report.alpha, report.lam)
    assert [r["lam"] for r in other.per_alpha] == [r["lam"] for r in report.per_alpha]
    assert other.js != report.js


def test_failing_cell_is_recorded():
    data = synth_generate(seed=0, n_train=30, n_dev=10, n_test=10, d=3, p=10)
    report = run_label_proportion(data, [1.5, 0.5], [1.0])
    assert "error" in report.cells[1] and report.alpha == 1.5
    with pytest.raises(RuntimeError):
        run_label_proportion(data, [0.5], [1.0])


@pytest.mark.parametrize("tol", [1e-3, 1e-6, 1e-9])
def test_bisection_eval_count(tol):
    # the bracket halves per evaluation; an early lucky hit can only make it cheaper
    counts = []
    for c in np.random.default_rng(0).uniform(0.01, 0.99, size=50):
        res = bisect(lambda x: c - x, 0.0, 1.0, tol=0.0, max_iter=200,
                     callback=lambda x: abs(x - c) < tol)
        assert abs(res.root - c) < tol
        assert res.function_evals <= np.log2(1.0 / tol) + 2
        counts.append(res.function_evals)
    assert abs(np.median(counts) - np.log2(1.0 / tol)) <= 2


def test_bench_small():
    rows = bench_solvers([5, 20], n_draws=15, tol=1e-5, repeats=1, seed=1)
    assert [(r["d"], r["method"]) for r in rows] == [
        (d, m) for d in (5, 20) for m in ("bisection", "brent", "projected-gradient")]
    for r in rows:
        assert r["max_error"] < 1e-5
        assert r["evals_ci_low"] <= r["median_evals"] <= r["evals_ci_high"]
        assert r["median_time"] > 0
    by = {(r["d"], r["method"]): r["median_evals"] for r in rows}
    assert by[20, "brent"] < by[20, "bisection"]


def test_metrics_report_defaults():
    r = MetricsReport(0.1, 0.2, 1.5, 1.0)
    assert json.loads(r.to_json())["per_alpha"] == []
    assert r.to_csv().strip() == "alpha,lam,dev_js,test_js,test_mse"
