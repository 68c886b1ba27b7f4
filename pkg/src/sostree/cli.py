"""Command-line front end.

Subcommands: critical, solve, scan, verify, kernel, sample.  Output is CSV
(header row, LF endings, 17 significant digits) or JSON.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import special_k2 as k2
from .chain import (WindowTooSmall, check_normalisability, exact_gradient_probs, sample_transitions,
                    sample_tree, transition_row)
from .model import ModelParams, theta_from_tau
from .periodic_system import (PeriodicBoundaryLaw, build_matrix, raw_equation_residual, residual,
                              solve_newton, verify_periodicity_reduction)
from .series import TruncationError

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3

RESIDUAL_THRESHOLD = 1e-8
REDUCTION_THRESHOLD = 1e-9
MATCH_THRESHOLD = 1e-8

SCAN_HEADER = ["tau", "theta", "n_symmetric", "n_asym_ordered", "n_asym_unordered",
               "d1_sign", "d2_sign", "paper_thm2_count", "is_critical"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def write_json(stream, payload):
    json.dump(_jsonable(payload), stream, indent=2)
    stream.write("\n")


class _Output:
    def __init__(self, path):
        self.path = path
        self.stream = None

    def __enter__(self):
        if self.path in (None, "-"):
            self.stream = sys.stdout
        else:
            try:
                self.stream = open(self.path, "w", newline="\n")
            except OSError as exc:
                raise UsageError(f"cannot write {self.path}: {exc}") from exc
        return self.stream

    def __exit__(self, *exc):
        if self.stream is not sys.stdout:
            self.stream.close()


def _params(args) -> ModelParams:
    if (args.tau is None) == (args.theta is None):
        raise UsageError("give exactly one of --tau / --theta")
    try:
        theta = theta_from_tau(args.tau) if args.tau is not None else args.theta
        return ModelParams(theta, args.p, args.q, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _special(params: ModelParams, period: int) -> bool:
    return params.is_special_k2 and period == 4


def _closed_form_match(sols, tau):
    """Match alternating Newton solutions against the closed forms.

    Returns ``(per-solution (a, b, discrepancy) or None, unmatched closed-form pairs)``.
    """
    pairs = k2.alternating_pairs(tau)
    used = set()
    per = []
    for s in sols:
        u = s.law.u
        if s.label not in ("constant", "symmetric", "asymmetric"):
            per.append(None)
            continue
        dists = [max(abs(u[1] - p.a), abs(u[3] - p.b)) for p in pairs]
        j = int(np.argmin(dists))
        used.add(j)
        per.append((pairs[j].a, pairs[j].b, dists[j]))
    unmatched = [p for j, p in enumerate(pairs) if j not in used]
    return per, unmatched


def cmd_critical(args):
    c = k2.critical_taus(args.tol)
    fields = {"tau1": c.tau1, "tau2": c.tau2, "tau3": c.tau3, "p_residual": c.p_residual,
              "q_residual": c.q_residual, "d1_residual": c.d1_at_tau3, "d2_residual": c.d2_at_tau2}
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, fields)
        else:
            write_csv(out, list(fields), [list(fields.values())])
    return EXIT_OK


def _ansatz(args):
    if args.ansatz == "auto":
        return "alternating" if args.period % 2 == 0 else None
    return None if args.ansatz == "full" else args.ansatz


def _solve(args, params):
    period = args.period
    try:
        return solve_newton(period, params, tol=args.newton_tol, eps=args.eps, ansatz=_ansatz(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_solve(args):
    params = _params(args)
    sols = _solve(args, params)
    special = _special(params, args.period)
    per, unmatched = (_closed_form_match(sols.solutions, params.tau) if special
                      else ([None] * len(sols), []))
    n = args.period
    header = ["index", "label", "residual", "condition"] + [f"u{i}" for i in range(n)]
    if special:
        header += ["closed_a", "closed_b", "discrepancy"]
    rows = []
    for idx, (s, m) in enumerate(zip(sols, per)):
        row = [idx, s.label, s.residual, s.condition] + list(s.law.u)
        if special:
            row += list(m) if m else [math.nan] * 3
        rows.append(row)
    matched = [m[2] for m in per if m]
    summary = {"n_solutions": len(sols), "n_failed_starts": sols.n_failed, "warnings": sols.warnings}
    if special:
        summary.update(n_closed_form=len(k2.alternating_pairs(params.tau)), n_matched=len(matched),
                       max_discrepancy=max(matched, default=0.0),
                       unmatched_closed_form=[(p.a, p.b) for p in unmatched])
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, {"tau": params.tau, "theta": params.theta, "period": n, "k": params.k,
                             "p": params.p, "q": params.q_w, "ansatz": _ansatz(args) or "full",
                             "solutions": [dict(zip(header, r)) for r in rows], "summary": summary})
        else:
            write_csv(out, header, rows)
    for w in sols.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if special:
        print(f"closed form: {summary['n_closed_form']} solutions, {len(matched)} matched by Newton, "
              f"max discrepancy {fmt(summary['max_discrepancy'])}", file=sys.stderr)
        if unmatched:
            return EXIT_VERIFY
    return EXIT_OK


def scan_row(tau: float) -> list:
    r = k2.count_report(tau)
    return [tau, theta_from_tau(tau), r.n_symmetric, r.n_asym_ordered, r.n_asym_unordered,
            r.d1_sign, r.d2_sign, r.paper_thm2_count, r.is_critical]


def cmd_scan(args):
    if not (args.tau_min > 2 and args.tau_max > 2):
        raise UsageError("tau bounds must exceed 2")
    if args.steps < 1 or (args.steps > 1 and not args.tau_min < args.tau_max):
        raise UsageError("need steps >= 1 and tau_min < tau_max")
    params = ModelParams(theta_from_tau(args.tau_min), args.p, args.q, args.k)
    if not _special(params, args.period):
        raise UsageError("scan covers the solvable case only: --period 4 --k 2 --p 0.5 --q 1")
    taus = np.linspace(args.tau_min, args.tau_max, args.steps) if args.steps > 1 else np.array([args.tau_min])
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(scan_row, [float(t) for t in taus]))
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, [dict(zip(SCAN_HEADER, r)) for r in rows])
        else:
            write_csv(out, SCAN_HEADER, rows)
    if args.strict_paper and any(r[7] != r[3] for r in rows):
        print("paper count differs from the ordered asymmetric census", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args):
    params = _params(args)
    sols = _solve(args, params)
    special = _special(params, args.period)
    matrix = build_matrix(args.period, params, args.eps)
    header = ["index", "label", "residual", "raw_residual", "reduction_deviation", "uff_residual",
              "normalisable", "witness", "passed"]
    rows, ok = [], True
    for idx, s in enumerate(sols):
        res = float(np.max(np.abs(residual(s.law, matrix, params.k))))
        raw = raw_equation_residual(s.law, params, 8, args.eps)
        dev = verify_periodicity_reduction(s.law, params, 8, args.eps)
        uff = math.nan
        if special and s.label in ("constant", "symmetric", "asymmetric"):
            uff = max(abs(v) for v in k2.uff_residual(k2.Pair(s.law.u[1], s.law.u[3], "check"), params.tau))
        verdict = check_normalisability(s.law, params, args.eps)
        passed = (res < RESIDUAL_THRESHOLD and raw < RESIDUAL_THRESHOLD and dev < REDUCTION_THRESHOLD
                  and (math.isnan(uff) or uff < RESIDUAL_THRESHOLD) and not verdict.normalisable
                  and verdict.witness > 0)
        ok &= passed
        rows.append([idx, s.label, res, raw, dev, uff, verdict.normalisable, verdict.witness, passed])
    unmatched = _closed_form_match(sols.solutions, params.tau)[1] if special else []
    ok &= not unmatched
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, {"tau": params.tau, "solutions": [dict(zip(header, r)) for r in rows],
                             "unmatched_closed_form": [(p.a, p.b) for p in unmatched], "passed": ok})
        else:
            write_csv(out, header, rows)
    if unmatched:
        print(f"closed-form solutions missed by Newton: {[(p.a, p.b) for p in unmatched]}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


LAW_CHOICES = "constant, sym-low, sym-high, b1, b1-swap, b2, b2-swap, or comma-separated values"


def _law(args, params) -> PeriodicBoundaryLaw:
    spec = args.law
    if "," in spec or spec.replace(".", "", 1).isdigit():
        try:
            return PeriodicBoundaryLaw.normalized([float(x) for x in spec.split(",")])
        except ValueError as exc:
            raise UsageError(f"bad --law values: {exc}") from exc
    if spec == "constant":
        return PeriodicBoundaryLaw.constant(args.period)
    if not _special(params, args.period):
        raise UsageError(f"named law {spec!r} needs the solvable case (--period 4 --k 2 --p 0.5 --q 1)")
    tau = params.tau
    sym = k2.symmetric_solutions(tau)
    asym = k2.asymmetric_solutions(tau)
    named = {}
    if len(sym) == 3:
        named["sym-low"], named["sym-high"] = (sym[0], sym[0]), (sym[2], sym[2])
    for br in ("1", "2"):
        ps = [p for p in asym if p.kind == f"asym_branch{br}"]
        if ps:
            named[f"b{br}"], named[f"b{br}-swap"] = (ps[0].a, ps[0].b), (ps[1].a, ps[1].b)
    if spec not in named:
        raise UsageError(f"law {spec!r} does not exist at tau={tau:.17g} (choices: {LAW_CHOICES})")
    a, b = named[spec]
    return PeriodicBoundaryLaw([1.0, a, 1.0, b])


def cmd_kernel(args):
    params = _params(args)
    law = _law(args, params)
    if args.window < 1:
        raise UsageError("--window must be >= 1")
    row = transition_row(args.center, law, params, args.window, args.eps)
    if row.tail_mass_bound >= 1e-6:
        raise WindowTooSmall(f"tail mass {row.tail_mass_bound:.3g} >= 1e-6; increase --window")
    cum = np.cumsum(row.probs)
    rows = [[j, pr, c] for j, pr, c in zip(row.heights, row.probs, cum)]
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, {"center": row.center, "window": row.window, "law": law.u,
                             "tail_mass_bound": row.tail_mass_bound,
                             "rows": [dict(zip(["j", "prob", "cumulative"], r)) for r in rows]})
        else:
            write_csv(out, ["j", "prob", "cumulative"], rows)
    return EXIT_OK


def cmd_sample(args):
    params = _params(args)
    law = _law(args, params)
    if args.depth < 1 or args.window < 1:
        raise UsageError("--depth and --window must be >= 1")
    W = args.window
    if args.samples:
        grads = {0: sample_transitions(0, law, params, args.samples, args.seed, W, args.eps)}
        tail_hits = int(np.count_nonzero(np.abs(grads[0]) == W))
    else:
        s = sample_tree(law, params, args.depth, args.seed, W, args.eps)
        cls = s.heights[s.parents] % law.n
        grads = {r: s.gradients[cls == r] for r in range(law.n)}
        tail_hits = s.tail_hits
    rows = []
    for r, g in grads.items():
        exact = exact_gradient_probs(r, law, params, W, args.eps)
        counts = np.bincount(g + W, minlength=2 * W + 1)
        total = max(1, len(g))
        for off in range(-W, W + 1):
            c = counts[off + W]
            if c or exact[off + W] >= 1e-12:
                rows.append([r, off, c, c / total, exact[off + W]])
    header = ["parent_class", "gradient", "count", "empirical", "exact"]
    with _Output(args.out) as out:
        if args.format == "json":
            write_json(out, {"seed": args.seed, "depth": args.depth, "samples": args.samples,
                             "law": law.u, "tail_hits": tail_hits,
                             "rows": [dict(zip(header, r)) for r in rows]})
        else:
            write_csv(out, header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_mutually_exclusive_group()
    g.add_argument("--tau", type=float, help="tau = theta + 1/theta (> 2)")
    g.add_argument("--theta", type=float, help="theta = exp(-J beta) in (0, 1)")
    common.add_argument("--period", type=int, default=4)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--p", type=float, default=0.5, help="even-difference weight")
    common.add_argument("--q", type=float, default=1.0, help="odd-difference weight")
    common.add_argument("--eps", type=float, default=1e-14, help="series truncation tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-12, help="bisection tolerance")
    common.add_argument("--newton-tol", type=float, default=1e-10, help="Newton residual tolerance")
    common.add_argument("--window", type=int, default=50)
    common.add_argument("--ansatz", choices=("auto", "full", "alternating"), default="auto",
                        help="pin even sites to 1 (alternating; auto for even periods) or solve every site (full)")
    common.add_argument("--strict-paper", action="store_true")

    parser = _Parser(prog="sostree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("critical", parents=[common], help="critical tau values").set_defaults(func=cmd_critical)
    sub.add_parser("solve", parents=[common], help="all periodic laws at one tau").set_defaults(func=cmd_solve)
    p = sub.add_parser("scan", parents=[common], help="solution census over a tau range")
    p.add_argument("--tau-min", type=float, default=2.1)
    p.add_argument("--tau-max", type=float, default=12.0)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=cmd_scan)
    sub.add_parser("verify", parents=[common], help="residual checks for every solution").set_defaults(func=cmd_verify)
    for name, func, helptext in (("kernel", cmd_kernel, "one transition row"),
                                 ("sample", cmd_sample, "seeded gradient sampling")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--law", default="constant", help=LAW_CHOICES)
        p.add_argument("--center", type=int, default=0)
        p.add_argument("--depth", type=int, default=10)
        p.add_argument("--samples", type=int, default=0, help="root-edge draws instead of a tree")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sostree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, WindowTooSmall) as exc:
        print(f"sostree: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
