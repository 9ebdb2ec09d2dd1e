"""Command-line front end.

Every command emits one structured report (text or machine format via
--format); reports are deterministic given the full argument list, including
--seed and --workers, apart from the timing field.  Exit codes: 0 for
success or all-pass, 1 when an asserted verification fails (or a cache fails
its checksum), 2 for usage errors.

Configuration precedence is flags > TRISYS_* environment variables >
defaults (supported: TRISYS_FORMAT, TRISYS_SEED, TRISYS_WORKERS,
TRISYS_CACHE_DIR).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import formulas, patterns, randlab
from .cache import CacheCorrupt, CacheError, CacheMissing, read_cache, write_cache
from .core import ParseError, UnsupportedSizeError, parse, serialize
from .counting import (
    PREDICATES,
    SearchBudgetExceeded,
    brute_force_count,
    extremal_number,
    generate_isofree,
    table_from_records,
)
from .partition import optimal_partition
from .report import RunReport

ENV_PREFIX = "TRISYS_"


def _env(name: str, fallback):
    return os.environ.get(ENV_PREFIX + name, fallback)


def _fmt_edge(e) -> str:
    return " ".join(str(v + 1) for v in e)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trisys",
        description="exact enumeration and randomized verification for triple systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument(
            "--format",
            choices=("text", "machine"),
            default=_env("FORMAT", "text"),
            help="report format (default text)",
        )
        p.add_argument(
            "--workers",
            type=int,
            default=int(_env("WORKERS", "1")),
            help="worker count for shardable computations (results are identical for any value)",
        )

    p = sub.add_parser("enumerate", help="isomorph-free generation, optional cache write")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--predicate", choices=PREDICATES, required=True)
    p.add_argument("--cache-dir", default=_env("CACHE_DIR", None))
    add_common(p)

    p = sub.add_parser("count", help="brute-force oracle over all edge subsets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--predicate", choices=PREDICATES, required=True)
    p.add_argument("--unlabeled", action="store_true", help="also count isomorphism classes")
    add_common(p)

    p = sub.add_parser("extremal", help="maximum edge count under a predicate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--predicate", choices=("f5free", "cancellative", "k4mfree"), required=True)
    add_common(p)

    p = sub.add_parser("partition", help="optimal 3-partition of a system file")
    p.add_argument("--file", required=True)
    add_common(p)

    p = sub.add_parser("check", help="pattern and property checks on a system file")
    p.add_argument("--file", required=True)
    add_common(p)

    p = sub.add_parser("check-formulas", help="certified inequality table")
    p.add_argument("--s-gap-max", type=int, default=1000)
    p.add_argument("--t-max", type=int, default=6, help="largest n for exact T(n) bounds (<= 6)")
    add_common(p)

    p = sub.add_parser("sample", help="draw a seeded random structure")
    p.add_argument("kind", choices=("planted", "cylinder"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    p.add_argument("--out", help="write the sampled system to this file (planted only)")
    add_common(p)

    p = sub.add_parser("experiment", help="seeded verification experiments")
    p.add_argument(
        "kind",
        choices=("triangle", "density", "unique-partition", "chernoff", "stability"),
    )
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--a", type=float, default=10.0)
    p.add_argument("--theta", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--mode", choices=("exact", "sampled"), default="sampled")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--fraction", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    p.add_argument("--cache-dir", default=_env("CACHE_DIR", None))
    add_common(p)

    p = sub.add_parser("cache", help="write or verify the enumeration cache")
    p.add_argument("action", choices=("write", "read"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--predicate", choices=PREDICATES, required=True)
    p.add_argument("--cache-dir", required=False, default=_env("CACHE_DIR", None))
    add_common(p)

    return parser


# -- command implementations -------------------------------------------------


def _cmd_count(args) -> RunReport:
    table = brute_force_count(
        args.n, args.predicate, workers=args.workers, include_unlabeled=args.unlabeled
    )
    report = RunReport(
        command="count",
        parameters={"n": args.n, "predicate": args.predicate, "workers": args.workers},
    )
    report.add_table("counts", table.rows())
    return report


def _cmd_enumerate(args) -> RunReport:
    records = list(generate_isofree(args.n, args.predicate))
    table = table_from_records(args.n, args.predicate, records)
    report = RunReport(
        command="enumerate",
        parameters={"n": args.n, "predicate": args.predicate},
    )
    report.add_table("counts", table.rows())
    if args.cache_dir:
        manifest = write_cache(args.cache_dir, args.n, args.predicate, records)
        report.add_table("manifest", sorted(manifest.items()))
    return report


def _cmd_extremal(args) -> RunReport:
    value, witness = extremal_number(args.n, args.predicate, return_witness=True)
    report = RunReport(
        command="extremal",
        parameters={"n": args.n, "predicate": args.predicate},
    )
    rows = [("max_edges", value)]
    rows += [(f"witness_edge_{i}", _fmt_edge(e)) for i, e in enumerate(witness.edges)]
    report.add_table("extremal", rows)
    return report


def _cmd_partition(args) -> RunReport:
    h = parse(Path(args.file).read_text())
    res = optimal_partition(h)
    report = RunReport(command="partition", parameters={"file": args.file})
    report.add_table(
        "optimal partition",
        [
            ("labels", " ".join(str(l) for l in res.partition.labels)),
            ("bad_count", res.bad_count),
            ("optimal", res.optimal),
        ],
    )
    return report


def _cmd_check(args) -> RunReport:
    h = parse(Path(args.file).read_text())
    report = RunReport(command="check", parameters={"file": args.file})
    f5 = patterns.contains_f5(h)
    k4 = patterns.contains_k4minus(h)
    canc = patterns.is_cancellative(h)
    from .partition import is_tripartite

    trip = is_tripartite(h)
    rows = [
        ("f5_free", f5 is None),
        ("k4minus_free", k4 is None),
        ("cancellative", canc),
        ("tripartite", trip),
    ]
    if f5 is not None:
        rows.append(("f5_witness", "; ".join(_fmt_edge(e) for e in f5.edges)))
    if k4 is not None:
        rows.append(("k4minus_witness", "; ".join(_fmt_edge(e) for e in k4.edges)))
    report.add_table("properties", rows)
    report.add_verdict("pattern scan", None, f"{h.edge_count} edges on {h.n} vertices")
    return report


def _cmd_check_formulas(args) -> RunReport:
    report = RunReport(
        command="check-formulas",
        parameters={"s_gap_max": args.s_gap_max, "t_max": args.t_max},
    )
    gap = formulas.check_s_gap(args.s_gap_max)
    report.add_verdict(
        f"s(n)-s(n-2) >= 2n^2/9 - n for 3 <= n <= {args.s_gap_max}",
        all(c.holds for c in gap),
    )

    t_rows = []
    for n in range(3, min(args.t_max, 6) + 1):
        t_exact = brute_force_count(n, "tripartite", workers=args.workers).labeled_total
        chk = formulas.check_t_bounds(n, t_exact)
        report.add_verdict(f"T({n}) < 3^{n} 2^s({n})", chk.holds, chk.note)
        t_rows.append((f"T({n})", t_exact))
    report.add_table("tripartite totals", t_rows)

    for n, x in ((20, Fraction(1, 4)), (60, Fraction(1, 6)), (100, Fraction(1, 10))):
        single, partial = formulas.check_entropy_binomial(n, x)
        report.add_verdict(f"C({n},{x}*{n}) < 2^(H n)", single.holds)
        report.add_verdict(
            f"sum C({n},i), i<={x}*{n} < 2^(H n)",
            partial.holds if partial.asserted else None,
            "asserted" if partial.asserted else "observational (x above smallness threshold)",
        )

    report.add_verdict(
        "sum of multinomials = 3^n for n <= 30",
        all(formulas.check_multinomial_sum(n).holds for n in range(1, 31)),
    )
    report.add_verdict(
        "balanced split maximizes the multinomial for n <= 30",
        all(formulas.check_balanced_maximizes(n).holds for n in range(1, 31)),
    )
    floor_n = formulas.balanced_floor_threshold(200)
    report.add_verdict(
        "3^n <= 0.6 n^2 multinomial(balanced)",
        None,
        f"holds from n = {floor_n} through 200",
    )
    thr = formulas.partial_sum_threshold(100)
    report.add_verdict(
        "empirical partial-sum threshold at n=100", None, f"largest valid x = {thr}"
    )
    return report


def _cmd_sample(args) -> RunReport:
    if args.kind == "planted":
        if args.n is None:
            raise ValueError("sample planted needs --n")
        sample = randlab.sample_planted(args.n, args.p, args.seed)
        report = RunReport(
            command="sample planted",
            parameters={"n": args.n, "p": args.p, "seed": args.seed},
        )
        sizes = [len(q) for q in sample.planted.parts()]
        report.add_table(
            "sample",
            [
                ("edges", sample.system.edge_count),
                ("part_sizes", " ".join(map(str, sizes))),
            ],
        )
        if args.out:
            Path(args.out).write_text(serialize(sample.system))
            report.add_verdict("written", None, args.out)
        return report
    if args.l is None or args.m is None:
        raise ValueError("sample cylinder needs --l and --m")
    g = randlab.sample_cylinder(args.l, args.m, args.seed)
    report = RunReport(
        command="sample cylinder",
        parameters={"l": args.l, "m": args.m, "seed": args.seed},
    )
    report.add_table(
        "sample",
        [
            ("edges", g.edge_count),
            ("triangles", randlab.cylinder_triangle_count(g)),
        ],
    )
    return report


def _cmd_experiment(args) -> RunReport:
    if args.kind == "triangle":
        return randlab.triangle_experiment(
            args.l, args.m, args.theta, args.trials, args.seed, workers=args.workers
        )
    if args.kind == "chernoff":
        if args.m is None:
            raise ValueError("experiment chernoff needs --m")
        return randlab.chernoff_empirical(
            args.m, args.p, args.a, args.trials, args.seed, workers=args.workers
        )
    if args.kind == "unique-partition":
        if args.n is None:
            raise ValueError("experiment unique-partition needs --n")
        return randlab.unique_partition_experiment(args.n, args.trials, args.seed, p=args.p)
    if args.kind == "density":
        if args.n is None:
            raise ValueError("experiment density needs --n")
        sample = randlab.sample_planted(args.n, args.p, args.seed)
        audit = randlab.density_audit(
            sample, args.mu, mode=args.mode, trials=args.trials, seed=args.seed
        )
        report = RunReport(
            command="experiment density",
            parameters={
                "n": args.n,
                "p": args.p,
                "mu": args.mu,
                "mode": args.mode,
                "trials": args.trials,
                "seed": args.seed,
            },
        )
        rows = []
        for name, cond in audit.conditions.items():
            detail = cond.status
            if cond.trials:
                detail += f" ({cond.failures}/{cond.trials} failures)"
            if cond.note:
                detail += f" [{cond.note}]"
            rows.append((f"condition ({name})", detail))
            if cond.witness is not None:
                rows.append((f"witness ({name})", str(cond.witness)))
        report.add_table("lower-density audit", rows)
        report.add_verdict("audit refuted any condition", None, str(audit.refuted))
        return report
    if args.cache_dir is None:
        raise ValueError("experiment stability needs --cache-dir")
    return randlab.stability_probe(args.n, args.fraction, args.cache_dir)


def _cmd_cache(args) -> RunReport:
    if args.cache_dir is None:
        raise ValueError("cache commands need --cache-dir")
    report = RunReport(
        command=f"cache {args.action}",
        parameters={"n": args.n, "predicate": args.predicate},
    )
    if args.action == "write":
        records = list(generate_isofree(args.n, args.predicate))
        manifest = write_cache(args.cache_dir, args.n, args.predicate, records)
        report.add_table("manifest", sorted(manifest.items()))
        return report
    records, manifest = read_cache(args.cache_dir, args.n, args.predicate)
    report.add_table("manifest", sorted(manifest.items()))
    report.add_verdict("checksum and totals verified", True, f"{len(records)} classes")
    return report


_DISPATCH = {
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "extremal": _cmd_extremal,
    "partition": _cmd_partition,
    "check": _cmd_check,
    "check-formulas": _cmd_check_formulas,
    "sample": _cmd_sample,
    "experiment": _cmd_experiment,
    "cache": _cmd_cache,
}


def run(argv=None) -> tuple[int, RunReport | None]:
    """Parse argv, execute, print the report; returns (exit_code, report)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return (code if code else 0), None

    start = time.perf_counter()
    try:
        report = _DISPATCH[args.command](args)
    except (CacheCorrupt, SearchBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None
    except (CacheMissing, CacheError, ParseError, UnsupportedSizeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    report.timing_seconds = time.perf_counter() - start
    text = report.to_machine() if args.format == "machine" else report.to_text()
    sys.stdout.write(text)
    return (1 if report.failed else 0), report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
