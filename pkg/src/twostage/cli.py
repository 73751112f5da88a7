"""Command-line interface.

Subcommands expose the analytic quantities (``bound``, ``cdf``,
``kolmogorov``, ``coverage``), the simulation engine (``simulate``), and the
full study grids (``table 1|2|3``) as plain text, CSV, or JSON.

Exit codes: 0 success, 2 usage error, 3 numerical (quadrature) failure.
"""

import argparse
import dataclasses
import json
import os
import sys

from . import _kernels, analytic, montecarlo
from .analytic import StatisticLaw
from .model import Deterministic, Probabilistic, TrialParams
from .quadrature import QuadratureConvergenceError

TABLE_BETA_LABELS = {1: ("0", "1"), 2: ("10", "100"), 3: ("inf",)}
TABLE_MUS = (-10.0, -1.0, 0.0, 1.0, 10.0)
TABLE_NS = (10, 100, 1000)
CSV_HEADER = "beta,mu,n,C,K,L,flagged"


@dataclasses.dataclass(frozen=True)
class TableRow:
    """One study-grid row: bound C, empirical distance K, coverage count L."""

    beta_label: str
    mu: float
    n: int
    C: float
    K: float
    L: int
    flagged: bool


def _add_rule_flags(p):
    p.add_argument("--alpha", type=float, default=0.0,
                   help="probit intercept (default 0)")
    p.add_argument("--beta", type=float, default=None,
                   help="probit slope (nonnegative)")
    p.add_argument("--deterministic", action="store_true",
                   help="use the deterministic stop-when-positive rule")


def _add_common_flags(p, need_x=False, x_default=None):
    _add_rule_flags(p)
    p.add_argument("--mu", type=float, default=0.0, help="population mean")
    p.add_argument("--n", type=int, required=True, help="stage size")
    if need_x:
        p.add_argument("--x", type=float, default=x_default, required=x_default is None,
                       help="threshold / CI half-width")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="quadrature absolute tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format")
    p.add_argument("--out", default=None, help="write output to this file")


def _add_sim_flags(p):
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=0,
                   help="simulation threads (0 = all cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twostage",
        description="Exact and simulated distribution of the sample average "
                    "after a two-stage sequential trial.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="total-variation upper bound C")
    _add_common_flags(p)

    p = sub.add_parser("cdf", help="exact CDF of the normalized statistic")
    _add_common_flags(p, need_x=True)

    p = sub.add_parser("kolmogorov",
                       help="exact Kolmogorov distance from N(0,1)")
    _add_common_flags(p)

    p = sub.add_parser("coverage", help="exact CI coverage probability")
    _add_common_flags(p, need_x=True, x_default=1.96)

    p = sub.add_parser("simulate", help="Monte Carlo summary for one setting")
    _add_common_flags(p, need_x=True, x_default=1.96)
    _add_sim_flags(p)

    p = sub.add_parser("table", help="reproduce a full study-grid table")
    p.add_argument("table_id", type=int, choices=(1, 2, 3))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    _add_sim_flags(p)
    return parser


def _resolve_rule(args, parser):
    if args.deterministic and args.beta is not None:
        parser.error("--deterministic and --beta are mutually exclusive")
    if not args.deterministic and args.beta is None:
        parser.error("a stopping rule is required: --beta <f> or --deterministic")
    try:
        if args.deterministic:
            return Deterministic()
        return Probabilistic(alpha=args.alpha, beta=args.beta)
    except ValueError as exc:
        parser.error(str(exc))


def _resolve_params(args, parser):
    try:
        return TrialParams(mu=args.mu, n=args.n)
    except ValueError as exc:
        parser.error(str(exc))


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _scalar_output(args, name, value, inputs):
    if args.format == "json":
        return json.dumps({"command": name, "inputs": inputs, "value": value})
    return f"{value:.6f}"


def _rule_inputs(rule):
    if isinstance(rule, Deterministic):
        return {"rule": "deterministic"}
    return {"rule": "probabilistic", "alpha": rule.alpha, "beta": rule.beta}


def compute_table(table_id, seed=0, replicates=1000, workers=1, tol=1e-9):
    """All rows of study-grid table 1, 2, or 3 (alpha = 0 throughout)."""
    rows = []
    index = 0
    for label in TABLE_BETA_LABELS[table_id]:
        rule = (Deterministic() if label == "inf"
                else Probabilistic(alpha=0.0, beta=float(label)))
        for mu in TABLE_MUS:
            for n in TABLE_NS:
                params = TrialParams(mu=mu, n=n)
                c = analytic.tv_bound(rule, params, abs_tol=tol)
                plan = montecarlo.SimulationPlan(
                    rule=rule, params=params, replicates=replicates,
                    master_seed=_kernels.stream_key(seed, 1_000_000 + index))
                summary = montecarlo.summarize(
                    montecarlo.run_simulation(plan, workers=workers), plan)
                k = summary.empirical_kolmogorov
                rows.append(TableRow(
                    beta_label=label, mu=mu, n=n, C=c, K=k,
                    L=summary.coverage_count,
                    flagged=k > montecarlo.FLAG_THRESHOLD))
                index += 1
    return rows


def _table_output(rows, fmt):
    if fmt == "json":
        return json.dumps([dataclasses.asdict(r) for r in rows])
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.beta_label},{r.mu:g},{r.n},{r.C:.3f},{r.K:.3f},"
                     f"{r.L},{'true' if r.flagged else 'false'}")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    workers = getattr(args, "workers", 0) or (os.cpu_count() or 1)

    try:
        if args.command == "table":
            rows = compute_table(args.table_id, seed=args.seed,
                                 replicates=args.replicates,
                                 workers=workers, tol=args.tol)
            _emit(_table_output(rows, args.format), args.out)
            return 0

        rule = _resolve_rule(args, parser)
        params = _resolve_params(args, parser)
        law = StatisticLaw(rule=rule, params=params)
        inputs = {**_rule_inputs(rule), "mu": params.mu, "n": params.n}

        if args.command == "bound":
            value = analytic.tv_bound(rule, params, abs_tol=args.tol)
            _emit(_scalar_output(args, "bound", value, inputs), args.out)
        elif args.command == "cdf":
            inputs["x"] = args.x
            value = analytic.statistic_cdf(law, args.x, abs_tol=args.tol)
            _emit(_scalar_output(args, "cdf", value, inputs), args.out)
        elif args.command == "kolmogorov":
            value = analytic.exact_kolmogorov(law)
            _emit(_scalar_output(args, "kolmogorov", value, inputs), args.out)
        elif args.command == "coverage":
            inputs["x"] = args.x
            value = analytic.exact_coverage(law, args.x, abs_tol=args.tol)
            _emit(_scalar_output(args, "coverage", value, inputs), args.out)
        elif args.command == "simulate":
            plan = montecarlo.SimulationPlan(
                rule=rule, params=params, replicates=args.replicates,
                ci_halfwidth=args.x, master_seed=args.seed)
            sample = montecarlo.run_simulation(plan, workers=workers)
            s = montecarlo.summarize(sample, plan)
            inputs.update(x=args.x, replicates=args.replicates,
                          seed=args.seed)
            if args.format == "json":
                _emit(json.dumps({
                    "command": "simulate", "inputs": inputs,
                    "empirical_kolmogorov": s.empirical_kolmogorov,
                    "coverage_count": s.coverage_count,
                    "coverage_rate": s.coverage_rate,
                    "bias_estimate": s.bias_estimate,
                    "stop_count": sample.stop_count,
                    "flagged": s.empirical_kolmogorov > montecarlo.FLAG_THRESHOLD,
                }), args.out)
            else:
                header = "K,L,coverage_rate,bias,stop_count,flagged"
                flagged = s.empirical_kolmogorov > montecarlo.FLAG_THRESHOLD
                row = (f"{s.empirical_kolmogorov:.6f},{s.coverage_count},"
                       f"{s.coverage_rate:.6f},{s.bias_estimate:.6f},"
                       f"{sample.stop_count},"
                       f"{'true' if flagged else 'false'}")
                _emit(header + "\n" + row, args.out)
    except QuadratureConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
