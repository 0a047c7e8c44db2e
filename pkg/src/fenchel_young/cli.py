"""Command line interface, installed as ``fy``.

Every command prints JSON (or writes CSV/JSON files) and exits with status 0
on success. Errors print a single ``fy: error: ...`` line on stderr and exit
with status 1.
"""

import argparse
import json
import os
import sys

import numpy as np

from .entropies import parse_entropy
from .experiments import (MetricsReport, bench_solvers, bench_to_csv, parse_grid,
                          run_label_proportion)
from .losses import fy_loss_and_grad, parse_loss
from .positive import ova_loss, ova_loss_grad, ova_predict
from .simplex import SolverConfig, predict, temperature_predict
from .structured import (PermutahedronSpec, PermutationOracle, SequenceOracle, crf_loss,
                         forward_backward, path_to_tensor, permutahedron_map,
                         permutahedron_project, sparsemap, sparsemap_loss,
                         structured_hinge_loss, structured_perceptron_loss, tensor_to_path,
                         viterbi_path)
from .synth import SynthConfig, SynthData, synth_generate
from .training import Dataset, Regularizer, train_dual, train_primal


def _vector(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _emit(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _floats(a):
    return np.asarray(a, dtype=float).tolist()


def read_jsonl(path):
    X, Y = [], []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                X.append(row["x"])
                Y.append(row["y"])
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record ({exc})")
    if not X:
        raise ValueError(f"{path}: no records")
    return Dataset(np.array(X, dtype=float), np.array(Y, dtype=float))


def write_jsonl(path, data):
    with open(path, "w") as f:
        for x, y in zip(data.X, data.Y):
            f.write(json.dumps({"x": x.tolist(), "y": y.tolist()}) + "\n")


def cmd_predict(args):
    H = parse_entropy(args.entropy)
    cfg = SolverConfig(args.method, tol=args.tol, max_iter=args.max_iter)
    if args.temperature != 1.0:
        res = temperature_predict(H, args.theta, args.temperature, cfg)
    else:
        res = predict(H, args.theta, cfg)
    _emit({"entropy": str(H), "p": _floats(res.p), "conjugate_value": float(res.conjugate_value),
           "iterations": res.iterations, "function_evals": res.function_evals})


def cmd_loss(args):
    cost = args.cost
    if cost is not None and cost != "zero-one":
        cost = _vector(cost)
    spec = parse_loss(args.spec)
    spec = type(spec)(spec.omega, cost if cost is not None else spec.cost,
                      SolverConfig(args.method, tol=args.tol))
    loss, grad = fy_loss_and_grad(spec, args.theta, args.target)
    _emit({"spec": str(spec), "loss": float(loss), "grad": _floats(grad)})


def cmd_ova(args):
    out = {"phi": args.phi, "prediction": _floats(ova_predict(args.phi, args.theta))}
    if args.target is not None:
        out["loss"] = float(ova_loss(args.phi, args.theta, args.target))
        out["grad"] = _floats(ova_loss_grad(args.phi, args.theta, args.target))
    _emit(out)


def _structured_sequence(args, spec):
    theta = np.array(spec["theta"], dtype=float)
    n, m = int(spec["n"]), int(spec["m"])
    if theta.shape != (n, m, m):
        raise ValueError(f"theta has shape {theta.shape}, expected ({n}, {m}, {m})")
    path, score = viterbi_path(theta)
    out = {"polytope": "sequence", "map_path": path, "map_score": score}
    target = args.target if args.target is not None else spec.get("y")
    if args.loss == "crf":
        marg, log_z = forward_backward(theta)
        out.update(log_z=log_z, marginals=_floats(marg))
    oracle = SequenceOracle(n, m)
    if args.loss == "sparsemap":
        sv = sparsemap(oracle, theta)
        out["mu"] = _floats(sv.mu)
        out["support"] = [{"path": tensor_to_path(v), "weight": w} for v, w in sv.support]
    if target is not None:
        y = path_to_tensor([int(s) for s in np.ravel(target)], m)
        loss, grad = _structured_loss(args.loss, oracle, theta, y)
        out.update(target=[int(s) for s in np.ravel(target)], loss=loss, grad=_floats(grad))
    return out


def _structured_loss(kind, oracle, theta, y):
    if kind == "crf":
        return crf_loss(theta, y)
    if kind == "sparsemap":
        return sparsemap_loss(oracle, theta, y)
    if kind == "perceptron":
        return structured_perceptron_loss(oracle, theta, y)
    return structured_hinge_loss(oracle, theta, y)


def _structured_permutahedron(args, spec):
    pspec = PermutahedronSpec(spec["w"])
    theta = np.array(spec["theta"], dtype=float)
    out = {"polytope": "permutahedron", "map": _floats(permutahedron_map(pspec, theta)),
           "projection": _floats(permutahedron_project(pspec, theta).mu)}
    if args.loss == "crf":
        raise ValueError("the crf loss is only available for sequences")
    target = args.target if args.target is not None else spec.get("y")
    if target is not None:
        y = np.asarray(target, dtype=float)
        loss, grad = _structured_loss(args.loss, PermutationOracle(pspec), theta, y)
        out.update(target=_floats(y), loss=loss, grad=_floats(grad))
    return out


def cmd_structured(args):
    with open(args.potentials) as f:
        spec = json.load(f)
    if args.target is not None:
        args.target = _vector(args.target)
    if args.polytope == "sequence":
        _emit(_structured_sequence(args, spec))
    else:
        _emit(_structured_permutahedron(args, spec))


def cmd_train(args):
    data = read_jsonl(args.data)
    loss = parse_loss(args.loss)
    G = Regularizer(args.lam, args.l1)
    if args.mode == "dual":
        res = train_dual(data, loss, G, max_epochs=args.max_iter or 200,
                         tol=args.tol if args.tol is not None else 1e-4,
                         random_state=args.seed)
    else:
        res = train_primal(data, loss, G, method=args.solver,
                           tol=args.tol if args.tol is not None else 1e-8,
                           max_iter=args.max_iter or 20000)
    model = {"shape": list(res.W.shape), "W": _floats(res.W.ravel()), "loss": str(loss),
             "lambda": args.lam, "l1": args.l1, "mode": args.mode,
             "objective": res.objective, "converged": res.converged,
             "iterations": res.iterations}
    if res.gap is not None:
        model["duality_gap"] = res.gap
    _emit(model, args.out)
    if args.out:
        print(json.dumps({"out": args.out, "objective": res.objective,
                          "converged": res.converged}, sort_keys=True))


def cmd_synth(args):
    cfg = SynthConfig(seed=args.seed, n_train=args.n_train, n_dev=args.n_dev,
                      n_test=args.n_test, d=args.d, p=args.p,
                      doc_len_mean=args.doc_len_mean, label_count_mean=args.label_count_mean)
    data = synth_generate(cfg)
    os.makedirs(args.out, exist_ok=True)
    for name in ("train", "dev", "test"):
        write_jsonl(os.path.join(args.out, f"{name}.jsonl"), getattr(data, name))
    with open(os.path.join(args.out, "config.json"), "w") as f:
        json.dump(cfg.to_dict(), f, sort_keys=True, indent=2)
    print(json.dumps({"out": args.out, "n_train": cfg.n_train, "n_dev": cfg.n_dev,
                      "n_test": cfg.n_test, "d": cfg.d, "p": cfg.p}, sort_keys=True))


def _load_synth(directory):
    splits = {name: read_jsonl(os.path.join(directory, f"{name}.jsonl"))
              for name in ("train", "dev", "test")}
    path = os.path.join(directory, "config.json")
    cfg = SynthConfig()
    if os.path.exists(path):
        with open(path) as f:
            cfg = SynthConfig(**json.load(f))
    return SynthData(splits["train"], splits["dev"], splits["test"], cfg)


def cmd_experiment(args):
    data = _load_synth(args.data)
    report = run_label_proportion(data, parse_grid(args.alphas), parse_grid(args.lambdas),
                                  max_iter=args.max_iter)
    with open(args.out, "w") as f:
        f.write(report.to_json() + "\n")
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(report.to_csv())
    print(json.dumps({"out": args.out, "alpha": report.alpha, "lam": report.lam,
                      "test_js": report.js, "test_mse": report.mse}, sort_keys=True))


def cmd_bench(args):
    d_list = [int(v) for v in args.d.split(",")]
    rows = bench_solvers(d_list, n_draws=args.draws, tol=args.tol, alpha=args.alpha,
                         seed=args.seed, repeats=args.repeats)
    text = bench_to_csv(rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="fy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="regularized prediction on the simplex")
    p.add_argument("--entropy", required=True, help="e.g. shannon, tsallis:1.5, sqnorm:1.5")
    p.add_argument("--theta", required=True, type=_vector)
    p.add_argument("--method", default="bisection",
                   choices=["bisection", "brent", "projected-gradient"])
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--temperature", type=float, default=1.0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("loss", help="Fenchel-Young loss and gradient")
    p.add_argument("--spec", required=True, help="entropy string, zero or squared")
    p.add_argument("--theta", required=True, type=_vector)
    p.add_argument("--target", required=True, type=_vector)
    p.add_argument("--cost", default=None, help="zero-one or comma separated costs")
    p.add_argument("--method", default="bisection",
                   choices=["bisection", "brent", "projected-gradient"])
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("ova", help="one-vs-all prediction and loss")
    p.add_argument("--phi", required=True, choices=["squared", "fermi-dirac", "sparse-sigmoid"])
    p.add_argument("--theta", required=True, type=_vector)
    p.add_argument("--target", type=_vector, default=None)
    p.set_defaults(func=cmd_ova)

    p = sub.add_parser("structured", help="structured prediction on a polytope")
    p.add_argument("--polytope", required=True, choices=["sequence", "permutahedron"])
    p.add_argument("--loss", default="sparsemap",
                   choices=["crf", "hinge", "perceptron", "sparsemap"])
    p.add_argument("--potentials", required=True, help="JSON file")
    p.add_argument("--target", default=None,
                   help="path (sequence) or vertex (permutahedron), comma separated")
    p.set_defaults(func=cmd_structured)

    p = sub.add_parser("train", help="train a linear model")
    p.add_argument("--mode", choices=["primal", "dual"], default="primal")
    p.add_argument("--solver", choices=["proxgrad", "lbfgs"], default="proxgrad")
    p.add_argument("--loss", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--l1", type=float, default=0.0, help="elastic-net l1 weight rho")
    p.add_argument("--data", required=True, help="JSON lines with x and y")
    p.add_argument("--out", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("synth", help="generate synthetic label-proportion data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--p", type=int, default=500)
    p.add_argument("--n-train", type=int, default=1200)
    p.add_argument("--n-dev", type=int, default=200)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--doc-len-mean", type=float, default=200.0)
    p.add_argument("--label-count-mean", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="run an experiment")
    esub = p.add_subparsers(dest="experiment", required=True)
    e = esub.add_parser("label-prop", help="alpha/lambda grid on label-proportion data")
    e.add_argument("--data", required=True, help="directory written by fy synth")
    e.add_argument("--alphas", default="1.0:2.0:0.1")
    e.add_argument("--lambdas", default="1e-4:1e4:log")
    e.add_argument("--max-iter", type=int, default=500)
    e.add_argument("--out", required=True)
    e.add_argument("--csv", default=None, help="also write the per-alpha table as CSV")
    e.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bench", help="run a benchmark")
    bsub = p.add_subparsers(dest="bench", required=True)
    b = bsub.add_parser("solvers", help="root finding against projected gradient")
    b.add_argument("--d", default="10,100,1000")
    b.add_argument("--draws", type=int, default=200)
    b.add_argument("--tol", type=float, default=1e-5)
    b.add_argument("--alpha", type=float, default=1.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:
        print(f"fy: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
