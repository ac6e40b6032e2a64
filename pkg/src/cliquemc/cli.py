"""Command-line front end.

Thin adapters over the library: every number printed equals the corresponding
library call's result. All randomness flows from --seed, so repeated
invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import dynamics, hardcore
from .conditions import (
    GrowthFunction,
    check_clique_dynamics,
    check_clique_truncation,
    check_fernandez_procacci,
    check_strong_condition,
    mixing_time_bound,
    size_f,
    uniform_f,
)
from .errors import CliqueMCError, GraphFormatError
from .estimator import approximate_partition_function, median_amplify
from .model import (
    CliqueCover,
    load_model,
    model_to_dict,
    partition_function_exact,
    validate_clique_cover,
)
from .truncation import truncate as truncate_model
from .truncation import truncation_threshold

DEFAULT_SEED = 12345

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_PARSE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _emit(args, doc: dict, rows: list[dict]) -> None:
    """Write the result as JSON (the full doc) or CSV (the row table)."""
    if args.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_model_cover(args, need_cover: bool = False):
    model, cover = load_model(args.model)
    if cover is None:
        if need_cover:
            cover = CliqueCover.trivial(model)
        return model, cover
    report = validate_clique_cover(model, cover)
    if not report.valid:
        raise CliqueMCError(
            f"invalid clique cover: uncovered={list(report.uncovered)} "
            f"compatible_pairs={list(report.compatible_pairs)}"
        )
    return model, cover


def _f_choice(model, name: str):
    return size_f(model) if name == "size" else uniform_f(model)


def _family_str(fam) -> str:
    return ";".join(map(str, sorted(fam)))


# --- subcommands -------------------------------------------------------------


def cmd_check_conditions(args):
    model, cover = _load_model_cover(args)
    f = _f_choice(model, args.f)
    reports = [
        check_clique_dynamics(model, f),
        check_strong_condition(model, f, cover=cover),
        check_fernandez_procacci(model, f, cap=args.cap),
    ]
    doc = {"f": args.f, "conditions": [r.to_dict() for r in reports]}
    rows = [
        {
            "condition": r.condition_name,
            "holds": r.holds,
            "worst_polymer": r.worst_polymer,
            "min_slack": r.min_slack if r.per_polymer_slack else "",
        }
        for r in reports
    ]
    if cover is not None:
        g = GrowthFunction(args.g_kind, args.g_a, args.g_b)
        tr = check_clique_truncation(model, cover, g, args.B)
        doc["clique_truncation"] = {
            "B": tr.B,
            "holds": tr.holds,
            "clique_sums": tr.clique_sums,
        }
        rows.append(
            {
                "condition": "clique_truncation",
                "holds": tr.holds,
                "worst_polymer": "",
                "min_slack": tr.B - max(tr.clique_sums, default=0.0),
            }
        )
    _emit(args, doc, rows)
    return EXIT_OK


def cmd_sample(args):
    model, cover = _load_model_cover(args, need_cover=True)
    data = dynamics.ChainKernelData(model, cover)
    if args.steps is not None:
        steps = args.steps
    else:
        steps = mixing_time_bound(model, cover, _f_choice(model, args.f), args.epsilon)
    rng = np.random.default_rng(args.seed)
    finals = dynamics.sample_batch(data, args.trials, steps, rng)
    fams = [
        _family_str(np.nonzero(row)[0]) for row in finals
    ]
    doc = {"steps": steps, "trials": args.trials, "seed": args.seed, "families": fams}
    rows = [{"sample": i, "family": fam} for i, fam in enumerate(fams)]
    _emit(args, doc, rows)
    return EXIT_OK


def cmd_estimate_z(args):
    model, cover = _load_model_cover(args, need_cover=True)
    f = _f_choice(model, args.f)

    def one(seed):
        return approximate_partition_function(model, cover, f, args.epsilon, root_seed=seed)

    if args.delta is not None:
        result = median_amplify(one, args.delta, root_seed=args.seed)
    else:
        result = one(args.seed)
    doc = result.to_dict()
    rows = [r.to_dict() for r in result.ratios]
    rows.append({"i": "log_z_hat", "r_hat": result.log_z_hat, "hits": ""})
    rows.append({"i": "z_hat", "r_hat": result.z_hat, "hits": ""})
    _emit(args, doc, rows)
    return EXIT_OK


def cmd_exact_z(args):
    model, _ = _load_model_cover(args)
    log_z = partition_function_exact(model, cap=args.cap)
    doc = {"log_z": log_z, "z": math.exp(log_z)}
    _emit(args, doc, [{"log_z": log_z, "z": math.exp(log_z)}])
    return EXIT_OK


def cmd_truncate(args):
    model, cover = _load_model_cover(args)
    if args.k is not None:
        k = args.k
    else:
        if args.epsilon is None:
            raise CliqueMCError("truncate needs --k or --epsilon")
        m = cover.m if cover is not None else model.n
        g = GrowthFunction(args.g_kind, args.g_a, args.g_b)
        k = truncation_threshold(g, args.B, m, args.epsilon, doubled=args.doubled)
    result = truncate_model(model, k, cover)
    doc = {
        "k": k,
        "n_before": model.n,
        "n_after": result.model.n,
        "model": model_to_dict(result.model, result.cover),
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(model_to_dict(result.model, result.cover), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(json.dumps({"k": k, "n_before": model.n, "n_after": result.model.n}))
    else:
        _emit(args, doc, [{"k": k, "n_before": model.n, "n_after": result.model.n}])
    return EXIT_OK


_ROW_PARAMS = {
    "hardcore_expander": ("delta", "alpha", "lam"),
    "potts_expander": ("delta", "q", "alpha", "beta"),
    "hardcore_unbalanced": ("delta_l", "delta_r", "lambda_l", "lambda_r", "small_delta_r"),
    "matching": ("delta", "z"),
}


def cmd_thresholds(args):
    params = {}
    for name in _ROW_PARAMS[args.row]:
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    report = hardcore.table1_evaluators(args.row, params)
    doc = report.to_dict()
    if args.row == "hardcore_expander":
        thr = hardcore.lambda_threshold(int(args.delta), args.alpha)
        doc.update({"term1": thr.term1, "term2": thr.term2, "threshold": thr.threshold})
        rows = [
            {
                "row": args.row,
                "term1": thr.term1,
                "term2": thr.term2,
                "threshold": thr.threshold,
                "satisfied": report.satisfied,
            }
        ]
    else:
        rows = [{"row": args.row, "value": report.value, "satisfied": report.satisfied}]
    _emit(args, doc, rows)
    return EXIT_OK


def cmd_hardcore(args):
    G = hardcore.load_graph_file(args.graph)
    result = hardcore.combined_estimate(
        G,
        args.lam,
        args.alpha,
        args.epsilon,
        root_seed=args.seed,
        amplify=not args.no_amplify,
        cap=args.cap,
    )
    doc = result.to_dict()
    if args.exact:
        log_z = hardcore.exact_hardcore(G, args.lam)
        doc["log_z_exact"] = log_z
        doc["relative_error"] = math.expm1(result.log_estimate - log_z)
    rows = [
        {
            "log_estimate": result.log_estimate,
            "log_z_exact": doc.get("log_z_exact", ""),
            "lambda": args.lam,
            "epsilon": args.epsilon,
            "seed": args.seed,
        }
    ]
    _emit(args, doc, rows)
    return EXIT_OK


def cmd_tv_curve(args):
    model, cover = _load_model_cover(args, need_cover=True)
    step_grid = sorted(set(args.steps_grid))
    rng = np.random.default_rng(args.seed)
    rows = []
    for steps in step_grid:
        tv = dynamics.empirical_tv(
            model, cover, steps, args.trials, rng, cap=args.cap
        )
        rows.append({"steps": steps, "tv": tv})
    doc = {"trials": args.trials, "seed": args.seed, "curve": rows}
    _emit(args, doc, rows)
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cliquemc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=False, graph=False):
        if model:
            p.add_argument("--model", required=True, help="polymer model JSON file")
        if graph:
            p.add_argument("--graph", required=True, help="bipartite graph file")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--threads", type=int, default=1, help="reserved; must be 1")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--cap", type=int, default=20, help="enumeration cap")

    def growth(p):
        p.add_argument("--g-kind", choices=("exp", "power", "linear"), default="exp")
        p.add_argument("--g-a", type=float, default=0.2)
        p.add_argument("--g-b", type=float, default=0.0)
        p.add_argument("--B", type=float, default=1.0)

    p = sub.add_parser(
        "check-conditions",
        help="condition slacks; CSV columns: condition,holds,worst_polymer,min_slack",
    )
    common(p, model=True)
    p.add_argument("--f", choices=("uniform", "size"), default="uniform")
    growth(p)
    p.set_defaults(func=cmd_check_conditions)

    p = sub.add_parser("sample", help="chain end states; CSV columns: sample,family")
    common(p, model=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--steps", type=int, default=None, help="override the mixing bound")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--f", choices=("uniform", "size"), default="uniform")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate-z", help="Algorithm-1 estimate; CSV columns: i,r_hat,hits")
    common(p, model=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=None, help="median-amplify to this failure prob")
    p.add_argument("--f", choices=("uniform", "size"), default="uniform")
    p.set_defaults(func=cmd_estimate_z)

    p = sub.add_parser("exact-z", help="brute-force ln Z and Z; CSV columns: log_z,z")
    common(p, model=True)
    p.set_defaults(func=cmd_exact_z)

    p = sub.add_parser("truncate", help="drop polymers above size k; CSV: k,n_before,n_after")
    common(p, model=True)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--doubled", action="store_true", help="use the sampler threshold g^-1(2Bm/eps)")
    growth(p)
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser(
        "thresholds",
        help="Table-1 evaluators; CSV columns depend on the row (see --row)",
    )
    common(p)
    p.add_argument("--row", choices=hardcore.TABLE1_ROWS, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--delta-l", type=float, default=None)
    p.add_argument("--delta-r", type=float, default=None)
    p.add_argument("--lambda-l", type=float, default=None)
    p.add_argument("--lambda-r", type=float, default=None)
    p.add_argument("--small-delta-r", type=float, default=None)
    p.add_argument("--z", type=float, default=None)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("hardcore", help="full bipartite pipeline; CSV: log_estimate,...")
    common(p, graph=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--no-amplify", action="store_true")
    p.add_argument("--exact", action="store_true", help="also compute the exact ln Z")
    p.set_defaults(func=cmd_hardcore)

    p = sub.add_parser("tv-curve", help="empirical TV vs steps; CSV columns: steps,tv")
    common(p, model=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument(
        "--steps-grid",
        type=int,
        nargs="+",
        default=[1, 2, 5, 10, 20, 50, 100],
    )
    p.set_defaults(func=cmd_tv_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads != 1:
        print("cliquemc: error: only --threads 1 is supported", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except (GraphFormatError, json.JSONDecodeError) as exc:
        print(f"cliquemc: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CliqueMCError, ValueError) as exc:
        print(f"cliquemc: precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"cliquemc: i/o error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
