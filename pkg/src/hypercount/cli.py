"""Command-line front end.

Every subcommand prints JSON (or CSV with ``--format csv`` where per-point
rows exist).  Exit codes: 0 success, 1 a report found violations, 2 usage or
parameter errors, 3 a search or memo budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import asymptotic, experiments, graphical, models, operators
from .core import BudgetExceeded, LogValue, ParameterError, Params, fraction_str
from .exact import count_exact_report, count_naive

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ── helpers ──────────────────────────────────────────────────────────────────

def _load_json(text: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from exc


def _degrees(text: str) -> tuple[int, ...]:
    val = _load_json(text)
    if not isinstance(val, list) or not all(isinstance(x, int) and x >= 0 for x in val):
        raise UsageError("--degrees must be a JSON array of nonnegative integers")
    return tuple(val)


def _vertex_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"bad vertex list {text!r}") from exc


def _num(x):
    """JSON rendering: rationals as "p/q", log-values as {sign, ln}."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, LogValue):
        return x.to_json()
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    return x


def _params(args) -> Params:
    if args.n is None or args.k is None or args.m is None:
        raise UsageError("--n, --k and --m are required")
    return Params(args.n, args.k, args.m)


def _need_seed(seed):
    if seed is None:
        raise UsageError("randomized subcommands require --seed")
    return int(seed)


# ── subcommands ──────────────────────────────────────────────────────────────

def cmd_count(args):
    d = _degrees(args.degrees)
    edges = [_vertex_list(e) for e in args.with_edge or []]
    if args.naive:
        value = count_naive(d, args.k, required=edges)
        return {"count": str(value), "nodes_explored": None}, None, EXIT_OK
    res = count_exact_report(d, args.k, edges)
    return {"count": str(res.count), "nodes_explored": res.nodes_explored}, None, EXIT_OK


def cmd_graphical(args):
    d = _degrees(args.degrees)
    if args.method == "bef":
        return graphical.bef_sufficient(d, args.k).to_json(), None, EXIT_OK
    fn = {
        "nearly-regular": graphical.nearly_regular_sufficient,
        "sparse": graphical.sparse_sufficient,
        "exact": graphical.is_graphical_exact,
    }[args.method]
    return {"result": fn(d, args.k)}, None, EXIT_OK


def cmd_prob(args):
    d = _degrees(args.degrees)
    p = _params(args)
    out = {}
    if args.model == "binomial":
        out["prob_rational"] = fraction_str(models.prob_binomial_model(d, p))
        out["log_prob"] = models.log_prob_binomial_model(d, p).to_json()
    else:
        fn = models.prob_degseq_exact if args.model == "exact" else models.prob_hypergeom_model
        val = fn(d, p)
        out["prob_rational"] = fraction_str(val)
        out["log_prob"] = LogValue.from_value(val).to_json()
    return out, None, EXIT_OK


def cmd_sample(args):
    p = _params(args)
    seed = _need_seed(args.seed)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    data = models.sample_many(args.model, p, args.trials, seed)
    if args.summary:
        import numpy as np

        first = data[:, 0].astype(float)
        out = {
            "model": args.model, "params": p.to_json(), "trials": args.trials, "seed": seed,
            "mean_degree": float(data.mean()), "var_d1": float(np.var(first, ddof=1)) if args.trials > 1 else 0.0,
            "max_degree_mean": float(data.max(axis=1).mean()),
        }
        return out, None, EXIT_OK
    lines = [json.dumps([int(x) for x in row]) for row in data]
    rows = [{f"d{i}": int(x) for i, x in enumerate(row)} for row in data]
    return "\n".join(lines), rows, EXIT_OK


def cmd_estimate(args):
    f = args.formula
    out: dict = {"formula": f}
    if f == "regular":
        if args.n is None or args.k is None or args.d is None:
            raise UsageError("regular needs --n, --k, --d")
        est = asymptotic.regular_count_estimate(args.n, args.k, args.d)
        out["log_value"] = est.to_json()
        if args.exact:
            from .exact import count_exact

            exact = count_exact((args.d,) * args.n, args.k)
            out["exact"] = str(exact)
            if exact:
                out["log_ratio"] = LogValue.from_value(exact).ln - est.ln
        return out, None, EXIT_OK
    d = _degrees(args.degrees) if args.degrees else None
    if d is None:
        raise UsageError("--degrees is required")
    k = args.k
    if k is None:
        raise UsageError("--k is required")
    if f in ("dense", "sparse"):
        p = Params.for_sequence(d, k)
        est = (asymptotic.dense_prob_estimate if f == "dense" else asymptotic.sparse_prob_estimate)(d, p)
        out["log_value"] = est.to_json()
        if args.exact:
            exact = models.prob_degseq_exact(d, p)
            out["exact"] = fraction_str(exact)
            if exact:
                out["log_ratio"] = LogValue.from_value(exact).ln - est.ln
        return out, None, EXIT_OK
    K = _vertex_list(args.K) if args.K else None
    if f in ("edge-dense", "edge-sparse", "pstar"):
        if K is None:
            raise UsageError("--K is required")
        fn = {"edge-dense": asymptotic.edge_prob_dense_estimate,
              "edge-sparse": asymptotic.edge_prob_sparse_estimate,
              "pstar": asymptotic.pstar}[f]
        val = fn(d, k, K)
        out["value"] = fraction_str(val)
        out["float"] = float(val)
        if f == "edge-sparse":
            lo, hi = asymptotic.edge_prob_sparse_spread(d, k, K)
            out["spread"] = [float(lo), float(hi)]
        if args.exact:
            from .exact import edge_probability_exact

            ex = edge_probability_exact(d, k, K)
            out["exact"] = fraction_str(ex)
            if ex:
                out["rel_error"] = float(val / ex - 1)
        return out, None, EXIT_OK
    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required")
    if f == "ystar":
        if K is None:
            raise UsageError("--K is required")
        val = asymptotic.ystar(d, k, args.a, K, args.b)
        exact_fn = lambda: __import__("hypercount.exact", fromlist=["x"]).path_probability_exact(d, k, args.a, K, args.b)
    else:
        fn = {"ratio-dense": asymptotic.ratio_dense_estimate,
              "ratio-sparse": asymptotic.ratio_sparse_estimate,
              "rstar": asymptotic.rstar}.get(f)
        if fn is None:
            raise UsageError(f"unknown formula {f!r}")
        val = fn(d, k, args.a, args.b)
        exact_fn = lambda: __import__("hypercount.exact", fromlist=["x"]).ratio_exact(d, k, args.a, args.b)
    out["value"] = fraction_str(val)
    out["float"] = float(val)
    if args.exact:
        ex = exact_fn()
        out["exact"] = fraction_str(ex)
        if ex:
            out["rel_error"] = float(val / ex - 1)
    return out, None, EXIT_OK


def relation_corpus(n_max: int, k: int, m_max: int):
    for n in range(k, n_max + 1):
        for m in range(0, m_max + 1):
            for d in models.omega(n, k * m):
                yield d, k


def cmd_verify(args):
    rep = operators.verify_recursive_relations(relation_corpus(args.n_max, args.k, args.m_max))
    out = rep.to_json()
    return out, None, EXIT_VIOLATION if rep.violated else EXIT_OK


def _balanced(n: int, total: int) -> tuple[int, ...]:
    q, r = divmod(total, n)
    return tuple(q + 1 if i < r else q for i in range(n))


def _default_queries(d, k) -> list[operators.Query]:
    n = len(d)
    qs = [operators.Query.p_point(A, v, d)
          for v in range(n) for A in combinations([u for u in range(n) if u != v], k - 1)]
    return qs


def cmd_fixedpoint(args):
    p = _params(args)
    if args.t < 1:
        raise UsageError("--t must be at least 1")
    if args.queries:
        raw = _load_json(args.queries if args.queries.startswith("@") else "@" + args.queries)
        queries = [operators.Query.from_json(q) for q in raw]
    else:
        queries = _default_queries(_balanced(p.n, p.k * p.m), p.k)
    if args.state == "exact":
        state = operators.ExactState(p.n, p.k)
    elif args.state == "star":
        state = operators.StarState(p.n, p.k)
    else:
        p0 = Fraction(args.p0) if args.p0 is not None else p.mu
        y0 = Fraction(args.y0) if args.y0 is not None else p.mu ** 2
        state = operators.ConstantState(p.n, p.k, p0, y0)
    rep = operators.iterate_C(state, args.t, queries)
    rows, worst_change = [], 0.0
    worst_exact = None
    exact = operators.ExactState(p.n, p.k) if args.compare_exact else None
    for q, val in zip(queries, rep.values):
        row = q.to_json()
        row["value"] = _num(val)
        try:
            base = q.evaluate(state)
        except operators.Inadmissible:
            base = None
        row["initial"] = _num(base)
        if val is not None and base:
            change = abs(float(Fraction(val) / Fraction(base)) - 1)
            worst_change = max(worst_change, change)
            row["rel_change"] = change
        if exact is not None and val is not None:
            try:
                ref = q.evaluate(exact)
            except operators.Inadmissible:
                ref = None
            if ref:
                dev = abs(float(Fraction(val) / ref) - 1)
                row["rel_error_vs_exact"] = dev
                worst_exact = dev if worst_exact is None else max(worst_exact, dev)
        rows.append(row)
    out = {
        "state": args.state, "t": args.t, "params": p.to_json(),
        "admissible": sum(v is not None for v in rep.values), "queries": len(queries),
        "evaluations": rep.evaluations, "memo_entries": rep.memo_entries,
        "max_rel_change": worst_change, "max_rel_error_vs_exact": worst_exact,
        "points": rows,
    }
    flat = [{k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()} for r in rows]
    return out, flat, EXIT_OK


def _family(cfg) -> list[Params]:
    return [Params(*map(int, x)) for x in cfg.get("family", [])]


def cmd_experiment(args):
    cfg = _load_json(args.config) if args.config else {}
    if not isinstance(cfg, dict):
        raise UsageError("--config must be a JSON object")
    name = args.name
    seed = cfg.get("seed", args.seed)
    if name == "switching":
        corpus = cfg.get("corpus")
        corpus = [(tuple(d), int(k)) for d, k in corpus] if corpus else list(experiments.switching_corpus())
        rep = experiments.switching_bound_check(corpus)
        return rep.to_json(), rep.rows(), EXIT_VIOLATION if rep.violated else EXIT_OK
    if name == "typical":
        fam = _family(cfg) or [Params(6, 3, 4), Params(9, 3, 6), Params(12, 3, 8)]
        rep = experiments.typical_set_ratio_study(fam, cfg.get("regime", "sparse"),
                                                  float(cfg.get("multiplier", 1.0)))
        return rep.to_json(), rep.rows(), EXIT_OK if rep.passed else EXIT_VIOLATION
    if name == "convergence":
        fam = _family(cfg) or [Params(6, 3, 4), Params(9, 3, 6), Params(12, 3, 8)]
        rep = experiments.estimate_convergence_study(fam, cfg.get("formula", "dense"),
                                                     include_extremes=bool(cfg.get("extremes", False)))
        return rep.to_json(), rep.rows(), EXIT_OK if rep.passed else EXIT_VIOLATION
    p = Params(int(cfg.get("n", 30)), int(cfg.get("k", 3)), int(cfg.get("m", 40)))
    seed = _need_seed(seed)
    trials = int(cfg.get("trials", 10**4))
    if name == "tail":
        d = p.d
        grid = cfg.get("alphas") or [float(-(-d // 2)), float(d), float(2 * d), float(4 * d)]
        rep = experiments.degree_tail_experiment(p, [float(a) for a in grid], trials, seed)
        return rep.to_json(), rep.rows(), EXIT_OK if rep.passed else EXIT_VIOLATION
    if name == "variance":
        rep = experiments.variance_check(p, trials, seed)
        return rep.to_json(), None, EXIT_OK if rep.passed else EXIT_VIOLATION
    if name == "sigma":
        rep = experiments.sigma_concentration_experiment(p, float(cfg.get("beta", 40.0)), trials, seed,
                                                         float(cfg.get("multiplier", 1.0)))
        return rep.to_json(), None, EXIT_OK if rep.passed else EXIT_VIOLATION
    raise UsageError(f"unknown experiment {name!r}")


# ── parser ───────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker cap (evaluation is single-threaded)")

    parser = argparse.ArgumentParser(prog="hypercount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="exact hypergraph count")
    c.add_argument("--degrees", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--with-edge", action="append", metavar="A,B,C")
    c.add_argument("--naive", action="store_true")
    c.set_defaults(func=cmd_count)

    g = sub.add_parser("graphical", parents=[common], help="graphicality tests")
    g.add_argument("--degrees", required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--method", choices=("bef", "nearly-regular", "sparse", "exact"), default="exact")
    g.set_defaults(func=cmd_graphical)

    pr = sub.add_parser("prob", parents=[common], help="degree-sequence probability")
    pr.add_argument("--model", choices=("exact", "binomial", "hypergeom"), required=True)
    pr.add_argument("--degrees", required=True)
    for flag in ("--n", "--k", "--m"):
        pr.add_argument(flag, type=int, required=True)
    pr.set_defaults(func=cmd_prob)

    s = sub.add_parser("sample", parents=[common], help="sample degree sequences")
    s.add_argument("--model", choices=("hypergraph", "binomial"), required=True)
    for flag in ("--n", "--k", "--m"):
        s.add_argument(flag, type=int, required=True)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--summary", action="store_true", help="print summary statistics instead of samples")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("estimate", parents=[common], help="closed-form estimates")
    e.add_argument("--formula", required=True, choices=(
        "regular", "dense", "sparse", "edge-dense", "edge-sparse",
        "ratio-dense", "ratio-sparse", "pstar", "ystar", "rstar"))
    e.add_argument("--degrees")
    e.add_argument("--n", type=int)
    e.add_argument("--k", type=int)
    e.add_argument("--d", type=int, help="degree for the regular formula")
    e.add_argument("--K", help="comma-separated vertex set")
    e.add_argument("--a", type=int, help="ratio formulas take sequences with sum = 1 (mod k)")
    e.add_argument("--b", type=int)
    e.add_argument("--exact", action="store_true", help="also compute the exact value")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("verify-relations", parents=[common], help="check the recursive relations exactly")
    v.add_argument("--n-max", type=int, required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--m-max", type=int, required=True)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fixedpoint", parents=[common], help="iterate the compositional operator")
    f.add_argument("--state", choices=("exact", "star", "constant"), required=True)
    f.add_argument("--t", type=int, default=1)
    for flag in ("--n", "--k", "--m"):
        f.add_argument(flag, type=int, required=True)
    f.add_argument("--queries", help="JSON file of query points")
    f.add_argument("--p0")
    f.add_argument("--y0")
    f.add_argument("--compare-exact", action="store_true")
    f.set_defaults(func=cmd_fixedpoint)

    x = sub.add_parser("experiment", parents=[common], help="run an experiment")
    x.add_argument("--name", required=True,
                   choices=("switching", "tail", "variance", "sigma", "typical", "convergence"))
    x.add_argument("--config")
    x.add_argument("--seed", type=int)
    x.set_defaults(func=cmd_experiment)
    return parser


def _emit(payload, rows, args) -> str:
    if args.format == "csv":
        if rows is None:
            raise UsageError("this subcommand has no per-point rows; use --format json")
        return experiments.rows_to_csv(rows)
    if isinstance(payload, str):
        return payload + ("\n" if payload else "")
    return json.dumps(payload, default=_num) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        payload, rows, code = args.func(args)
        text = _emit(payload, rows, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
