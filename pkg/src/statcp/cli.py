"""Command-line front end: fit, ci, region and coverage commands.

Exit codes: 0 feasible, 2 infeasible, 3 resource limit, 1 input error
(with a JSON error object on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .counting import BinStructure
from .kernel import Model, ModelError, SearchConfig, Status, optimize, solve_satisfaction
from .models import (
    Dataset, ModelParams, build_anova, build_ar1, build_ar1_independence, build_linear_fit,
    build_linear_fit_appendix, build_multinomial_ci, build_multivariate_mean, coverage,
    generate_ar1, generate_linear, generate_multinomial, groups_example, linear_example,
    onehot_example,
)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3

MODELS = ("linear", "linear-known-sigma", "linear-unknown-sigma", "ar1", "ar1-indep", "anova",
          "hotelling-mean", "multinomial")

EXAMPLES = {"linear": linear_example, "groups": groups_example, "onehot": onehot_example}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# building

@dataclass(frozen=True)
class Job:
    """Everything needed to rebuild a model in another process."""

    model: str
    data: Dataset
    params: ModelParams
    data2: Dataset | None = None
    variant: str = "t2"
    constrain: tuple = ()


def build(job: Job) -> Model:
    name, d, p = job.model, job.data, job.params
    if name == "linear":
        m = build_linear_fit(d, p)
    elif name == "linear-known-sigma":
        m = build_linear_fit_appendix(d, p, "known_sigma")
    elif name == "linear-unknown-sigma":
        m = build_linear_fit_appendix(d, p, "unknown_sigma")
    elif name == "ar1":
        m = build_ar1(d, p)
    elif name == "ar1-indep":
        if job.data2 is None:
            raise InputError("ar1-indep needs a second series (--data2)")
        m = build_ar1_independence(d, job.data2, p)
    elif name == "anova":
        m = build_anova(d, p)
    elif name == "hotelling-mean":
        m = build_multivariate_mean(d, p)
    elif name == "multinomial":
        m = build_multinomial_ci(d, p, variant=job.variant)
    else:
        raise InputError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
    for lhs, rhs in job.constrain:
        m.add(_operand(m, lhs) == _operand(m, rhs))
    return m


def _operand(m: Model, tok: str):
    if m.has_var(tok):
        return m.var(tok)
    try:
        return float(tok)
    except ValueError:
        raise InputError(f"unknown parameter {tok!r} in constraint") from None


def parameter_names(m: Model) -> list[str]:
    return [v.name for v in m.decision]


# ---------------------------------------------------------------------------
# argument parsing helpers

def _parse_bins(text: str) -> BinStructure:
    try:
        lo, hi, k = text.split(":")
        return BinStructure.uniform(float(lo), float(hi), int(k))
    except ValueError as exc:
        raise InputError(f"bad bin spec {text!r} (expected lo:hi:m): {exc}") from None


def _parse_assign(items, what: str) -> dict:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise InputError(f"bad {what} {part!r} (expected name=value)")
            k, v = part.split("=", 1)
            try:
                out[k.strip()] = float(v)
            except ValueError:
                raise InputError(f"bad {what} value in {part!r}") from None
    return out


def _parse_constrain(items) -> tuple:
    out = []
    for item in items or []:
        if item.count("=") != 1:
            raise InputError(f"bad constraint {item!r} (expected name=name)")
        lhs, rhs = (s.strip() for s in item.split("="))
        out.append((lhs, rhs))
    return tuple(out)


def _parse_grid(text: str):
    axes = []
    for part in text.split(","):
        try:
            name, rng = part.split("=", 1)
            lo, hi, k = rng.split(":")
            axes.append((name.strip(), float(lo), float(hi), int(k)))
        except ValueError:
            raise InputError(f"bad grid spec {part!r} (expected name=lo:hi:n)") from None
    if len(axes) != 2 or any(a[3] < 1 for a in axes):
        raise InputError("grid needs exactly two axes with n >= 1 steps")
    return axes


def _parse_objective(text: str | None):
    if text is None:
        return None
    if text in ("min", "max"):
        return None if text == "min" else ("max", "s")
    try:
        direction, name = text.split(":", 1)
    except ValueError:
        raise InputError(f"bad objective {text!r} (expected min|max:name)") from None
    if direction not in ("min", "max"):
        raise InputError(f"objective direction must be min or max, got {direction!r}")
    return direction, name


def load_dataset(path: str) -> Dataset:
    if path.startswith("example:"):
        key = path.split(":", 1)[1]
        if key not in EXAMPLES:
            raise InputError(f"unknown example {key!r}; choose from {', '.join(EXAMPLES)}")
        return EXAMPLES[key]()
    try:
        if path == "-":
            obj = json.load(sys.stdin)
        else:
            with open(path) as fh:
                obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read dataset {path!r}: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError("dataset JSON must be an object")
    try:
        return Dataset.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def _load_params_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read params {path!r}: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError("params JSON must be an object")
    return obj


def _bins_from_json(v):
    if v is None:
        return None
    if isinstance(v, str):
        return _parse_bins(v)
    if isinstance(v, dict):
        return BinStructure.uniform(v["lo"], v["hi"], v["m"])
    return BinStructure(tuple(v))


def make_params(args) -> ModelParams:
    base = _load_params_file(getattr(args, "params", None))
    try:
        alpha = args.alpha if args.alpha is not None else base.get("alpha", 0.05)
        bins = _parse_bins(args.bins) if args.bins else _bins_from_json(base.get("bins"))
        bins2 = _parse_bins(args.bins2) if args.bins2 else _bins_from_json(base.get("bins2"))
        fixed = {**base.get("fixed", {}), **_parse_assign(args.fix, "--fix")}
        bounds = {k: tuple(v) for k, v in base.get("bounds", {}).items()}
        bounds.update({k: v for k, v in _parse_bounds(args.bound).items()})
        return ModelParams(alpha=alpha, bins=bins, bins2=bins2, bounds=bounds, fixed=fixed,
                           df_policy=args.df_policy or base.get("df_policy", "paper"),
                           closed_bins=bool(args.closed_bins or base.get("closed_bins", False)),
                           objective=_parse_objective(getattr(args, "objective", None)))
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(str(exc)) from None


def _parse_bounds(items) -> dict:
    out = {}
    for item in items or []:
        try:
            name, rng = item.split("=", 1)
            lo, hi = rng.split(":")
            out[name.strip()] = (float(lo), float(hi))
        except ValueError:
            raise InputError(f"bad bound {item!r} (expected name=lo:hi)") from None
    return out


def make_config(args) -> SearchConfig:
    try:
        return SearchConfig(epsilon=args.epsilon, eps_obj=args.eps_obj, time_limit=args.time_limit,
                            node_limit=args.node_limit)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def make_job(args, data: Dataset | None = None) -> Job:
    if args.model not in MODELS:
        raise InputError(f"unknown model {args.model!r}; choose from {', '.join(MODELS)}")
    data = data if data is not None else load_dataset(args.data)
    data2 = load_dataset(args.data2) if getattr(args, "data2", None) else None
    return Job(args.model, data, make_params(args), data2, args.variant, _parse_constrain(args.constrain))


# ---------------------------------------------------------------------------
# commands

def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _exit_for(status: Status) -> int:
    return {Status.FEASIBLE: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE, Status.LIMIT: EXIT_LIMIT}[status]


def _stats(st) -> dict:
    return {"nodes": st.nodes, "wall_time": round(st.wall_time, 6), "incumbents": st.incumbents,
            "rejected_boxes": st.rejected_boxes}


def cmd_fit(args, out) -> int:
    job = make_job(args)
    m = build(job)
    cfg = make_config(args)
    o = optimize(m, cfg)
    res = {"model": job.model, "status": o.status.value}
    if o.solution is not None:
        sol = o.solution
        res["parameters"] = {n: _num(sol[n]) for n in parameter_names(m)}
        res["statistic"] = _num(sol["s"])
        res["objective"] = {"direction": m.objective[0], "variable": m.objective[1].name,
                            "bound": [_num(o.bound.lo), _num(o.bound.hi)]}
    res["stats"] = _stats(o.stats)
    if m.diagnostics:
        res["diagnostics"] = list(m.diagnostics)
    json.dump(res, out, indent=2)
    out.write("\n")
    return _exit_for(o.status)


def cmd_ci(args, out) -> int:
    job = make_job(args)
    m = build(job)
    if not m.has_var(args.param):
        raise InputError(f"model {job.model!r} has no parameter {args.param!r}")
    cfg = make_config(args)
    v = m.var(args.param)
    lo = optimize(m.with_objective("min", v), cfg)
    hi = optimize(m.with_objective("max", v), cfg)
    statuses = {lo.status, hi.status}
    status = (Status.INFEASIBLE if Status.INFEASIBLE in statuses
              else Status.LIMIT if Status.LIMIT in statuses else Status.FEASIBLE)
    res = {"model": job.model, "parameter": args.param, "status": status.value,
           "alpha": job.params.alpha, "eps_obj": cfg.eps_obj}
    if lo.solution is not None and hi.solution is not None:
        res["interval"] = [_num(lo.solution[v]), _num(hi.solution[v])]
        res["lower_bracket"] = [_num(lo.bound.lo), _num(lo.bound.hi)]
        res["upper_bracket"] = [_num(hi.bound.lo), _num(hi.bound.hi)]
        res["note"] = "endpoints are incumbent values; each bracket certifies the true endpoint within eps_obj"
    res["stats"] = {"lower": _stats(lo.stats), "upper": _stats(hi.stats)}
    json.dump(res, out, indent=2)
    out.write("\n")
    return _exit_for(status)


def _cell_centers(lo, hi, k):
    w = (hi - lo) / k
    return [lo + (i + 0.5) * w for i in range(k)]


def _solve_cell(task):
    job, cfg, x_name, x, y_name, y, best = task
    params = replace(job.params, fixed={**job.params.fixed, x_name: x, y_name: y}, objective=None)
    m = build(replace(job, params=params))
    o = optimize(m, cfg) if best else solve_satisfaction(m, cfg)
    s = o.solution["s"] if o.solution is not None else None
    return o.status.value, s


def region_rows(job: Job, cfg: SearchConfig, axes, best: bool = True, workers: int = 1):
    (xn, xlo, xhi, xk), (yn, ylo, yhi, yk) = axes
    tasks = [(job, cfg, xn, x, yn, y, best)
             for y in _cell_centers(ylo, yhi, yk) for x in _cell_centers(xlo, xhi, xk)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as ex:
            results = list(ex.map(_solve_cell, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_solve_cell(t) for t in tasks]
    rows = []
    for t, (status, s) in zip(tasks, results):
        rows.append((t[3], t[5], status, s))
    return rows


def format_region_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "feasible", "best_s"])
    for x, y, status, s in rows:
        feas = {"feasible": "1", "infeasible": "0"}.get(status, "")
        w.writerow([repr(float(x)), repr(float(y)), feas, "" if s is None else repr(float(s))])
    return buf.getvalue()


def parse_region_csv(text: str):
    rows = []
    r = csv.reader(io.StringIO(text))
    header = next(r)
    if header != ["x", "y", "feasible", "best_s"]:
        raise ValueError(f"unexpected header {header}")
    for x, y, feas, s in r:
        status = {"1": "feasible", "0": "infeasible"}.get(feas, "resource_limit")
        rows.append((float(x), float(y), status, float(s) if s else None))
    return rows


def _workers() -> int:
    env = os.environ.get("STATCP_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InputError(f"STATCP_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def cmd_region(args, out) -> int:
    job = make_job(args)
    axes = _parse_grid(args.grid)
    probe = build(job)  # validates data and parameter names up front
    for name, *_ in axes:
        if not probe.has_var(name):
            raise InputError(f"model {job.model!r} has no parameter {name!r}")
    rows = region_rows(job, make_config(args), axes, best=not args.satisfy_only, workers=_workers())
    out.write(format_region_csv(rows))
    return EXIT_LIMIT if any(r[2] == "resource_limit" for r in rows) else EXIT_OK


_DEFAULT_TRUTH = {
    "linear": {"a": 1.0, "b": -5.0, "sigma": 5.0},
    "linear-known-sigma": {"a": 1.0, "b": -5.0, "sigma": 5.0},
    "linear-unknown-sigma": {"a": 1.0, "b": -5.0, "sigma": 5.0},
    "ar1": {"c": 5.0, "beta": 0.5, "lam": 5.0},
    "multinomial": {"p1": 0.3, "p2": 0.3, "p3": 0.4},
}
_DEFAULT_SIZE = {"linear": 20, "linear-known-sigma": 20, "linear-unknown-sigma": 20, "ar1": 100,
                 "multinomial": 10}


def _generator(model: str, truth: dict, size: int, seed: int):
    if model.startswith("linear"):
        a, b, sigma = truth["a"], truth["b"], truth["sigma"]
        return lambda i: generate_linear(a, b, sigma, size, np.random.default_rng([seed, i]))
    if model == "ar1":
        c, beta, lam = truth["c"], truth["beta"], truth["lam"]
        return lambda i: generate_ar1(c, beta, lam, size, np.random.default_rng([seed, i]))
    if model == "multinomial":
        keys = sorted((k for k in truth if k.startswith("p")), key=lambda k: int(k[1:]))
        p = [truth[k] for k in keys]
        return lambda i: generate_multinomial(p, size, np.random.default_rng([seed, i]))
    raise InputError(f"no generator for model {model!r}; coverage supports {', '.join(_DEFAULT_TRUTH)}")


def cmd_coverage(args, out) -> int:
    if args.model not in _DEFAULT_TRUTH:
        raise InputError(f"no generator for model {args.model!r}; coverage supports {', '.join(_DEFAULT_TRUTH)}")
    if args.replicates < 0:
        raise InputError("replicate count must be >= 0")
    truth = {**_DEFAULT_TRUTH[args.model], **_parse_assign(args.truth, "--truth")}
    size = args.size or _DEFAULT_SIZE[args.model]
    gen = _generator(args.model, truth, size, args.seed)
    params = make_params(args)
    if args.model == "linear" and params.bins is None:
        params = replace(params, bins=BinStructure.uniform(-10.0, 10.0, 5))
    fixed = dict(truth)
    if args.model == "linear-unknown-sigma":
        fixed.pop("sigma", None)
    params = replace(params, fixed={**fixed, **params.fixed})
    job = Job(args.model, Dataset("variates", [0.0, 1.0]), params, None, args.variant,
              _parse_constrain(args.constrain))
    cfg = make_config(args)
    rep = coverage(lambda d: build(replace(job, data=d)), gen, args.replicates, params.alpha, cfg)
    res = {"model": args.model, "truth": truth, "size": size, "seed": args.seed, "alpha": params.alpha,
           **rep.to_json()}
    json.dump(res, out, indent=2)
    out.write("\n")
    return EXIT_LIMIT if rep.limits else EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def _common(p: argparse.ArgumentParser, data: bool = True) -> None:
    p.add_argument("model", help=f"one of: {', '.join(MODELS)}")
    if data:
        p.add_argument("data", help="dataset JSON path, '-' for stdin, or example:linear|groups|onehot")
        p.add_argument("--data2", help="second series (ar1-indep)")
    p.add_argument("--params", help="params JSON (alpha, bins, bins2, bounds, fixed, df_policy)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--bins", help="uniform bins lo:hi:m")
    p.add_argument("--bins2", help="column bins lo:hi:m (ar1-indep)")
    p.add_argument("--closed-bins", action="store_true", help="every value must fall in a bin")
    p.add_argument("--fix", action="append", help="name=value (repeatable, comma lists allowed)")
    p.add_argument("--bound", action="append", help="name=lo:hi (repeatable)")
    p.add_argument("--constrain", action="append", help='equality between parameters, e.g. "mu2=mu3"')
    p.add_argument("--df-policy", choices=("paper", "fitted"))
    p.add_argument("--variant", choices=("chi2", "t2"), default="t2", help="multinomial covariance")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--eps-obj", type=float, default=1e-3)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="statcp", description="Declarative statistical models.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="minimise the test statistic (or --objective)")
    _common(p)
    p.add_argument("--objective", help="min|max:name (default min s)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("ci", help="confidence interval of one parameter")
    _common(p)
    p.add_argument("param")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("region", help="feasibility scan over a 2-D parameter grid (CSV)")
    _common(p)
    p.add_argument("--grid", required=True, help="x=lo:hi:n,y=lo:hi:n")
    p.add_argument("--satisfy-only", action="store_true",
                   help="report s of the first feasible point instead of the minimum")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("coverage", help="truth-fixed feasibility rate on synthetic data")
    _common(p, data=False)
    p.add_argument("--truth", action="append", help="name=value,... (defaults per model)")
    p.add_argument("-M", "--replicates", type=int, default=200)
    p.add_argument("--size", type=int, help="observations per replicate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_coverage)
    return ap


def _error(kind: str, msg: str) -> None:
    json.dump({"error": kind, "message": msg}, sys.stderr)
    sys.stderr.write("\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        _error("usage", "invalid command line")
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except (InputError, ModelError, ValueError, KeyError) as exc:
        _error(type(exc).__name__, str(exc).strip("'\""))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
