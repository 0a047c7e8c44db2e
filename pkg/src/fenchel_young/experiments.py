"""Label-proportion experiment and root-finding solver benchmark."""

import csv
import io
import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np
from scipy.stats import bootstrap

from ._validation import check_random_state
from .estimator import LabelProportionEstimator
from .losses import js_divergence
from .simplex import SolverConfig, _tsallis_pieces, entmax_tsallis, predict_generic
from .synth import SynthData, synth_generate


def parse_grid(text):
    """Parse ``"1.0:2.0:0.1"`` (inclusive range), ``"1e-4:1e4:log"``
    (powers of ten) or a comma separated list."""
    if "," in text or ":" not in text:
        return [float(v) for v in text.split(",") if v]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid {text!r} must look like start:stop:step or start:stop:log")
    start, stop = float(parts[0]), float(parts[1])
    if parts[2] == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grids need positive bounds")
        lo, hi = np.log10(start), np.log10(stop)
        return [float(v) for v in 10.0 ** np.arange(lo, hi + 0.5, 1.0)]
    step = float(parts[2])
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _loss_for(alpha):
    return "shannon" if alpha == 1 else f"tsallis:{alpha:g}"


@dataclass
class MetricsReport:
    """Outcome of the grid search.

    ``js`` and ``mse`` are test metrics of the model chosen on the dev split.
    ``per_alpha`` lists, for each alpha, the dev-selected lambda and its dev
    and test metrics. ``cells`` holds every grid cell's dev metric or error.
    """

    js: float
    mse: float
    alpha: float
    lam: float
    per_alpha: List[dict] = field(default_factory=list)
    cells: List[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    def to_csv(self):
        buf = io.StringIO()
        cols = ["alpha", "lam", "dev_js", "test_js", "test_mse"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in self.per_alpha:
            writer.writerow({c: row[c] for c in cols})
        return buf.getvalue()


def _mse(P, Y):
    return float(np.mean(0.5 * np.sum((P - Y) ** 2, axis=1)))


def run_label_proportion(data, alphas, lambdas, max_iter=500, tol=1e-6):
    """Train one model per ``(alpha, lambda)`` and select on dev JS.

    ``data`` is a :class:`SynthData` or a ``SynthConfig``. The test split is
    only touched after selection. Models are fitted with L-BFGS; a failing
    cell is recorded with its error message and skipped.
    """
    if not isinstance(data, SynthData):
        data = synth_generate(data)
    cells = []
    models = {}
    for a in alphas:
        for lam in lambdas:
            cell = {"alpha": a, "lam": lam}
            try:
                est = LabelProportionEstimator(loss=_loss_for(a), lam=lam, solver="lbfgs",
                                               max_iter=max_iter, tol=tol)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    est.fit(data.train.X, data.train.Y)
                cell["dev_js"] = float(np.mean(js_divergence(est.predict(data.dev.X), data.dev.Y)))
                models[a, lam] = est
            except Exception as exc:  # recorded, not fatal
                cell["error"] = f"{type(exc).__name__}: {exc}"
            cells.append(cell)

    ok = [c for c in cells if "dev_js" in c]
    if not ok:
        raise RuntimeError("every grid cell failed")
    per_alpha = []
    for a in alphas:
        mine = [c for c in ok if c["alpha"] == a]
        if not mine:
            continue
        best = min(mine, key=lambda c: c["dev_js"])
        est = models[a, best["lam"]]
        P = est.predict(data.test.X)
        per_alpha.append({
            "alpha": a, "lam": best["lam"], "dev_js": best["dev_js"],
            "test_js": float(np.mean(js_divergence(P, data.test.Y))),
            "test_mse": _mse(P, data.test.Y),
        })
    chosen = min(per_alpha, key=lambda r: r["dev_js"])
    return MetricsReport(chosen["test_js"], chosen["test_mse"], chosen["alpha"], chosen["lam"],
                         per_alpha, cells, data.config.to_dict())


def _sample_scores(rng, d):
    sigma = np.exp(rng.uniform(-4, 4))
    return rng.normal(0.0, sigma, size=d)


def bench_solvers(d_list, n_draws=200, tol=1e-5, alpha=1.5, seed=0, repeats=5):
    """Function evaluations and time each solver needs to get within ``tol``.

    For each ``d``, draws ``theta ~ N(0, sigma^2 I)`` with ``log sigma``
    uniform on [-4, 4]. The reference solution comes from Brent at tolerance
    1e-13. Each solver runs until its iterate is within ``tol`` (Euclidean)
    of the reference, as checked by a callback after every evaluation.
    Times are the minimum over ``repeats`` runs.

    Returns a list of dicts, one per ``(d, method)``, with medians and 99%
    bootstrap confidence intervals of the median.
    """
    rng = check_random_state(seed)
    g_prime, g_prime_inv, g0 = _tsallis_pieces(alpha)
    methods = ("bisection", "brent", "projected-gradient")
    rows = []
    for d in d_list:
        evals = {m: [] for m in methods}
        times = {m: [] for m in methods}
        errors = {m: [] for m in methods}
        for _ in range(n_draws):
            theta = _sample_scores(rng, d)
            ref = entmax_tsallis(theta, alpha, SolverConfig("brent", tol=1e-13, max_iter=500)).p

            def p_of(tau):
                p = g_prime_inv(np.maximum(theta - tau, g0))
                return p / p.sum()

            for m in methods:
                def close(x, m=m):
                    p = x if m == "projected-gradient" else p_of(x)
                    return np.linalg.norm(p - ref) < tol

                best = np.inf
                for _ in range(repeats):
                    start = time.perf_counter()
                    if m == "projected-gradient":
                        res = predict_generic(f"tsallis:{alpha}", theta,
                                              SolverConfig(m, tol=1e-15, max_iter=100000), close)
                    else:
                        res = entmax_tsallis(theta, alpha,
                                             SolverConfig(m, tol=1e-15, max_iter=500), close)
                    best = min(best, time.perf_counter() - start)
                evals[m].append(res.function_evals)
                times[m].append(best)
                errors[m].append(float(np.linalg.norm(res.p - ref)))
        for m in methods:
            row = {"d": d, "method": m, "draws": n_draws}
            for name, values in (("evals", evals[m]), ("time", times[m])):
                values = np.asarray(values, dtype=float)
                row[f"median_{name}"] = float(np.median(values))
                lo, hi = _median_ci(values, rng)
                row[f"{name}_ci_low"], row[f"{name}_ci_high"] = lo, hi
            row["max_error"] = max(errors[m])
            rows.append(row)
    return rows


def _median_ci(values, rng):
    if len(values) < 2 or np.ptp(values) == 0:
        v = float(np.median(values))
        return v, v
    res = bootstrap((values,), np.median, confidence_level=0.99, method="percentile",
                    n_resamples=2000, random_state=rng)
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def bench_to_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
