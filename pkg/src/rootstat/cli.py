"""Command-line front end.

Exit codes: 0 success, 1 usage/configuration error, 2 a verification check
failed, 3 the run finished but some cells errored (partial results).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, rootfind, stats
from .ensembles import EnsembleSpec, sample_type1
from .rng import rng_stream


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are exit code 1, not 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="rootstat")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured experiment sweep")
    p.add_argument("--config", help="TOML experiment description")
    p.add_argument("--kind", choices=("type1", "type2", "type3"))
    p.add_argument("--law")
    p.add_argument("--n-grid", type=_int_list)
    p.add_argument("--k-max", type=int)
    p.add_argument("--ell", type=int, choices=(1, 2, 3))
    p.add_argument("--mode", choices=("A2", "A3", "A4"))
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--test-function")
    p.add_argument("--centering", choices=("none", "empirical", "analytic"))
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--id", dest="experiment_id")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--jsonl", help="optional JSONL twin output")

    p = sub.add_parser("tower", help="print one derivative tower's invariants")
    p.add_argument("--law", default="uniform[-1,1]")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify-identity",
                       help="random sweep of the trace comparison identity")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--t-bound", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional certificate CSV path")

    p = sub.add_parser("verify-prop2",
                       help="characteristic-polynomial residual sweep")
    p.add_argument("--configs", type=int, default=100)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check-assumptions",
                       help="finite-n diagnostics for a scaling plan")
    p.add_argument("--mode", choices=("A2", "A3", "A4"), required=True)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--law", default="uniform[-1,1]")
    p.add_argument("--n-grid", type=_int_list, default=(50, 200, 800))
    p.add_argument("--k-max", type=int, default=1)
    p.add_argument("--threshold", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("kac", help="annulus concentration of Kac roots")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--replicas", type=int, default=20)
    p.add_argument("--law", default="kac-gauss")
    p.add_argument("--inner", type=float, default=0.85)
    p.add_argument("--outer", type=float, default=1.15)
    p.add_argument("--min-fraction", type=float, default=0.85)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("semicircle",
                       help="spectral distances for the tridiagonal ensemble")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--beta", type=int, choices=(1, 2), default=2)
    p.add_argument("--replicas", type=int, default=10)
    p.add_argument("--ks-max", type=float, default=0.05)
    p.add_argument("--levy-max", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_simulate(args) -> int:
    overrides = {k: getattr(args, k) for k in
                 ("kind", "law", "n_grid", "k_max", "ell", "mode", "a", "b",
                  "test_function", "centering", "replicas", "workers",
                  "experiment_id")}
    overrides["master_seed"] = args.seed
    try:
        if args.config:
            cfg = harness.config_from_toml(args.config, **overrides)
        else:
            cfg = harness.ExperimentConfig(
                **{k: v for k, v in overrides.items() if v is not None})
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result = harness.run_experiment(cfg)
    harness.write_csv(result.rows, args.out)
    if args.jsonl:
        harness.write_jsonl(result.rows, args.jsonl)
    harness.summary(result)
    return result.exit_code


def _cmd_tower(args) -> int:
    try:
        spec = EnsembleSpec("type1", args.law, args.n)
        roots = sample_type1(spec, rng_stream(args.seed, 0, f"tower:n={args.n}"))
        tower = rootfind.derivative_tower(roots, args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    means = tower.level_means()
    mabs = tower.level_mean_abs()
    all_hulls = True
    for k, lvl in enumerate(tower.levels):
        hull_ok = (k == 0 or stats.hull_contains(
            tower.levels[k - 1], lvl, 1e-9 * roots.scale))
        all_hulls &= hull_ok
        print(f"k={k} points={lvl.n} mean={means[k]:.6g} "
              f"mean_abs={mabs[k]:.6g} hull_ok={hull_ok}")
    drift = float(np.max(np.abs(means - means[0])))
    print(f"mean drift {drift:.3e}; mean_abs non-increasing: "
          f"{bool(np.all(np.diff(mabs) <= 1e-10 * roots.scale))}")
    return 0 if all_hulls else 2


def _cmd_verify_identity(args) -> int:
    cases = harness.identity_sweep(args.count, args.n_min, args.n_max,
                                   t_bound=args.t_bound, seed=args.seed)
    worst = max(c.certificate.residual / (1 + abs(c.certificate.lhs))
                for c in cases)
    failed = [c for c in cases if not (c.certificate.passed
                                       and c.certificate.bound_c_ok
                                       and c.certificate.bound_trace_ok)]
    if args.out:
        harness.write_certificates(cases, args.out)
    print(f"{len(cases)} configurations; worst relative residual {worst:.3e}; "
          f"{len(failed)} failed")
    return 2 if failed else 0


def _cmd_verify_prop2(args) -> int:
    worst = harness.prop2_sweep(args.configs, args.n_min, args.n_max,
                                args.points, seed=args.seed)
    top = max(worst)
    bad = sum(1 for w in worst if w > args.tol)
    print(f"{len(worst)} configurations; worst residual {top:.3e}; "
          f"{bad} above tolerance {args.tol:g}")
    return 2 if bad else 0


def _cmd_check_assumptions(args) -> int:
    try:
        plan = stats.ScalingPlan(args.mode, args.a, args.b)
        samples = harness.assumption_samples(args.law, args.n_grid, args.seed)
        report = stats.check_assumptions(plan, samples, args.k_max,
                                         args.threshold)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for e in report.entries:
        tag = e.name if e.k is None else f"{e.name}[k={e.k}]"
        vals = ", ".join(f"{v:.4g}" for v in e.values)
        print(f"{tag:14s} {e.kind:6s} [{vals}] -> "
              f"{'pass' if e.passed else 'FAIL'}")
    print(f"mode {report.mode}: {'pass' if report.passed else 'FAIL'}")
    return 0 if report.passed else 2


def _cmd_kac(args) -> int:
    fractions = harness.kac_annulus_experiment(
        args.n, args.replicas, args.seed, args.law, args.inner, args.outer)
    for r, (f0, f1) in enumerate(fractions):
        print(f"replica {r}: p {f0:.3f}, p' {f1:.3f}")
    mean0 = float(np.mean([f0 for f0, _ in fractions]))
    mean1 = float(np.mean([f1 for _, f1 in fractions]))
    print(f"mean fractions p {mean0:.3f}, p' {mean1:.3f} "
          f"(need >= {args.min_fraction})")
    return 0 if min(mean0, mean1) >= args.min_fraction else 2


def _cmd_semicircle(args) -> int:
    checks = harness.semicircle_experiment(args.n, args.beta, args.replicas,
                                           args.seed)
    ok = True
    for r, c in enumerate(checks):
        good = (c.ks_level0 <= args.ks_max and c.ks_level1 <= args.ks_max
                and c.levy_01 <= args.levy_max)
        ok &= good
        print(f"replica {r}: KS0 {c.ks_level0:.4f} KS1 {c.ks_level1:.4f} "
              f"levy {c.levy_01:.4f} {'ok' if good else 'FAIL'}")
    return 0 if ok else 2


_COMMANDS = {
    "simulate": _cmd_simulate,
    "tower": _cmd_tower,
    "verify-identity": _cmd_verify_identity,
    "verify-prop2": _cmd_verify_prop2,
    "check-assumptions": _cmd_check_assumptions,
    "kac": _cmd_kac,
    "semicircle": _cmd_semicircle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
