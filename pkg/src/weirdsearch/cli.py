"""Command-line front end.

Subcommands: search, split, run-unit, merge, verify, bench.  Machine
events go to stdout as JSON lines (or to --out); the human summary goes
to stderr.  Exit codes: 0 conclusive and weird-free (or verify agreed),
1 a weird number was found, 2 non-conclusive/aborted run or verification
mismatch, 64 usage error.  See FORMATS.md for the wire formats.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bench as bench_mod
from . import primes
from .classify import classify, compare_with_oracle, factor_int, oracle_classify
from .factored import parse as parse_factored
from .partition import (
    FRONTIER_ID,
    UnitReport,
    WorkUnit,
    load_manifest,
    load_unit,
    merge,
    read_reports,
    run_unit,
    split,
    write_report,
    write_units,
)
from .search import DEFAULT_PROGRESS_EVERY, SearchConfig, SearchReport, search

EXIT_OK = 0
EXIT_WEIRD = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

THEOREM1_BOUND = 10**21
THEOREM2_BOUND = 10**28
THEOREM2_CAP = 10**14


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we reserve that
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_exact_int(text: str) -> int:
    """Exact integer from decimal or scientific notation ('1e21')."""
    s = text.strip().lower().replace("_", "")
    if "e" in s:
        mant, _, exp_s = s.partition("e")
        exp = int(exp_s)
        if exp < 0:
            raise ValueError(f"{text!r} is not an exact integer")
        if "." in mant:
            whole, _, frac = mant.partition(".")
            frac = frac.rstrip("0")
            if len(frac) > exp:
                raise ValueError(f"{text!r} is not an exact integer")
            return int((whole + frac) or "0") * 10 ** (exp - len(frac))
        return int(mant) * 10**exp
    return int(s, 10)


def _exact_int(text: str) -> int:
    try:
        return parse_exact_int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _roots_arg(text: str):
    try:
        return tuple(parse_factored(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad root list {text!r}: {exc}") from None


class _EventWriter:
    """One compact JSON object per line; owns the file when given a path."""

    def __init__(self, out_path: str | None):
        self._own = out_path is not None
        self._fh = open(out_path, "w") if out_path else sys.stdout

    def __call__(self, event: dict) -> None:
        self._fh.write(json.dumps(event, separators=(",", ":")) + "\n")
        if event.get("kind") in ("progress", "summary", "weird"):
            self._fh.flush()

    def close(self) -> None:
        if self._own:
            self._fh.close()
        else:
            self._fh.flush()


def _build_parser() -> _Parser:
    parser = _Parser(prog="weirdsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_search_flags(p, with_cap=True):
        p.add_argument("--bound", type=_exact_int, help="exclusive upper bound (int or 1e21)")
        if with_cap:
            p.add_argument("--abundance-cap", type=_exact_int, default=None,
                           help="skip the subset-sum check above this abundance")
        p.add_argument("--roots", type=_roots_arg, default=None,
                       help="comma list of canonical factorizations (default: derived from bound)")
        p.add_argument("--barrier-stride", type=int, default=1,
                       help="check the barrier on every k-th child; 0 disables (default 1)")
        p.add_argument("--sieve-primes", type=int, default=primes.DEFAULT_SIEVE_PRIMES,
                       help="number of primes to sieve at startup")
        p.add_argument("--progress-every", type=int, default=DEFAULT_PROGRESS_EVERY,
                       help="emit a progress event every N visited nodes (0 disables)")
        p.add_argument("--out", default=None, help="write JSONL events here instead of stdout")
        p.add_argument("--theorem1", action="store_true",
                       help="preset: bound 1e21 (odd-weird exhaustive configuration)")
        p.add_argument("--theorem2", action="store_true",
                       help="preset: bound 1e28 with abundance cap 1e14")

    p_search = sub.add_parser("search", help="run a full search")
    add_search_flags(p_search)

    p_split = sub.add_parser("split", help="cut the search into work units")
    add_search_flags(p_split)
    p_split.add_argument("--frontier-depth", type=int, default=2,
                         help="total prime multiplicity at which units are cut (default 2)")
    p_split.add_argument("--units-dir", required=True, help="directory to write units into")

    p_run = sub.add_parser("run-unit", help="execute work units from a directory")
    p_run.add_argument("unit_ids", nargs="*",
                       help="specific unit ids to (re)run; default: all without a report")
    p_run.add_argument("--units-dir", required=True)
    p_run.add_argument("--workers", type=int, default=1,
                       help="run up to K units concurrently (default 1)")
    p_run.add_argument("--redundancy", type=int, default=1,
                       help="run each unit K times and require identical reports")
    p_run.add_argument("--sieve-primes", type=int, default=primes.DEFAULT_SIEVE_PRIMES)
    p_run.add_argument("--progress-every", type=int, default=0,
                       help="per-unit progress events every N nodes (0 disables)")

    p_merge = sub.add_parser("merge", help="merge unit reports into one summary")
    p_merge.add_argument("--units-dir", required=True)
    p_merge.add_argument("--out", default=None)

    p_verify = sub.add_parser("verify", help="cross-check classify against the brute-force oracle")
    group = p_verify.add_mutually_exclusive_group(required=True)
    group.add_argument("--range", nargs=2, type=_exact_int, metavar=("LO", "HI"))
    group.add_argument("--number", type=_exact_int)

    p_bench = sub.add_parser("bench", help="time numba kernels against the numpy fallback")
    p_bench.add_argument("--repeat", type=int, default=3)
    p_bench.add_argument("--quick", action="store_true", help="smaller workloads")

    return parser


def _config_from_args(args) -> SearchConfig:
    bound = args.bound
    cap = args.abundance_cap
    roots = args.roots
    if args.theorem1 and args.theorem2:
        raise _UsageError("--theorem1 and --theorem2 are mutually exclusive")
    if args.theorem1 or args.theorem2:
        if bound is not None or cap is not None or roots is not None:
            raise _UsageError("presets cannot be combined with --bound/--abundance-cap/--roots")
        if args.theorem1:
            bound = THEOREM1_BOUND
        else:
            bound, cap = THEOREM2_BOUND, THEOREM2_CAP
        print(
            "warning: this preset took on the order of 10^2 core years at "
            "original scale; a desk run will not finish. Use `split` to "
            "checkpoint it into work units.",
            file=sys.stderr,
        )
    if bound is None:
        raise _UsageError("--bound is required (or use a preset)")
    if args.barrier_stride < 0:
        raise _UsageError("--barrier-stride must be >= 0")
    return SearchConfig(
        bound=bound,
        abundance_cap=cap,
        roots=roots,
        barrier_stride=args.barrier_stride,
    )


def _human_summary(report: SearchReport, out=None) -> None:
    out = out if out is not None else sys.stderr
    echo = report.config_echo
    print(
        f"bound={echo.get('bound')} roots={','.join(echo.get('roots', []))} "
        f"stride={echo.get('barrier_stride')} cap={echo.get('abundance_cap')}",
        file=out,
    )
    print(
        f"nodes={report.nodes_visited} barrier_prunes={report.barrier_prunes} "
        f"bound_prunes={report.bound_prunes}",
        file=out,
    )
    print(
        f"abundant={report.abundant_found} semiperfect={report.semiperfect_count} "
        f"weird={len(report.weird_found)} unchecked={report.unchecked_abundant_count}",
        file=out,
    )
    for w in report.weird_found:
        print(f"WEIRD: {w}", file=out)
    state = "conclusive" if report.conclusive else f"NOT conclusive ({report.error})"
    print(f"{state}; wall={report.wall_time:.2f}s", file=out)


def _report_exit_code(report: SearchReport) -> int:
    if not report.conclusive:
        return EXIT_INCONCLUSIVE
    if report.weird_found:
        return EXIT_WEIRD
    return EXIT_OK


def _cmd_search(args) -> int:
    config = _config_from_args(args)
    source = primes.build(args.sieve_primes)
    writer = _EventWriter(args.out)
    try:
        report = search(
            config,
            sink=writer,
            prime_source=source,
            progress_every=args.progress_every,
        )
    finally:
        writer.close()
    _human_summary(report)
    return _report_exit_code(report)


def _cmd_split(args) -> int:
    config = _config_from_args(args)
    if args.frontier_depth < 1:
        raise _UsageError("--frontier-depth must be >= 1")
    source = primes.build(args.sieve_primes)
    writer = _EventWriter(args.out)
    try:
        units, frontier = split(
            config,
            args.frontier_depth,
            prime_source=source,
            sink=writer,
            progress_every=args.progress_every,
        )
    finally:
        writer.close()
    write_units(units, frontier, args.units_dir, args.frontier_depth)
    print(
        f"wrote {len(units)} units and the frontier report to {args.units_dir}",
        file=sys.stderr,
    )
    _human_summary(frontier.report)
    return _report_exit_code(frontier.report)


_WORKER_SOURCES: dict[int, primes.PrimeSource] = {}


def _get_source(sieve_primes: int) -> primes.PrimeSource:
    src = _WORKER_SOURCES.get(sieve_primes)
    if src is None:
        src = primes.build(sieve_primes)
        _WORKER_SOURCES[sieve_primes] = src
    return src


def _strip_timing(report_json: dict) -> dict:
    d = dict(report_json)
    d.pop("wall_time", None)
    return d


def _unit_job(payload: tuple) -> dict:
    unit_json, sieve_primes, redundancy, progress_every = payload
    unit = WorkUnit.from_json(unit_json)
    source = _get_source(sieve_primes)
    result = run_unit(unit, prime_source=source, progress_every=progress_every)
    for _ in range(redundancy - 1):
        again = run_unit(unit, prime_source=source, progress_every=progress_every)
        if _strip_timing(again.to_json()) != _strip_timing(result.to_json()):
            bad = UnitReport(
                unit_id=unit.id,
                status="aborted",
                report=result.report,
            )
            bad.report.conclusive = False
            bad.report.error = "redundancy mismatch between repeated executions"
            return bad.to_json()
    return result.to_json()


def _cmd_run_unit(args) -> int:
    base = Path(args.units_dir)
    units_dir = base / "units"
    if not units_dir.is_dir():
        raise _UsageError(f"{units_dir} does not exist (run split first)")
    if args.workers < 1:
        raise _UsageError("--workers must be >= 1")
    if args.redundancy < 1:
        raise _UsageError("--redundancy must be >= 1")
    all_units = {p.stem: p for p in sorted(units_dir.glob("*.json"))}
    if args.unit_ids:
        missing = [u for u in args.unit_ids if u not in all_units]
        if missing:
            raise _UsageError(f"unknown unit ids: {missing}")
        selected = [all_units[u] for u in args.unit_ids]
    else:
        done, _ = read_reports(base)
        have = {r.unit_id for r in done}
        selected = [p for stem, p in all_units.items() if stem not in have]
    payloads = [
        (json.loads(p.read_text()), args.sieve_primes, args.redundancy, args.progress_every)
        for p in selected
    ]
    results: list[UnitReport] = []
    if args.workers == 1 or len(payloads) <= 1:
        for payload in payloads:
            results.append(UnitReport.from_json(_unit_job(payload)))
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for out in pool.map(_unit_job, payloads):
                results.append(UnitReport.from_json(out))
    code = EXIT_OK
    for ur in results:
        write_report(ur, base)
        print(json.dumps(ur.to_json(), separators=(",", ":")))
        if ur.status != "complete":
            code = EXIT_INCONCLUSIVE
        elif ur.report.weird_found and code == EXIT_OK:
            code = EXIT_WEIRD
    print(
        f"ran {len(results)} unit(s); reports in {base / 'reports'}",
        file=sys.stderr,
    )
    return code


def _cmd_merge(args) -> int:
    base = Path(args.units_dir)
    try:
        manifest = load_manifest(base)
    except FileNotFoundError:
        raise _UsageError(f"no manifest.json under {base}")
    reports, frontier = read_reports(base)
    if frontier is None:
        frontier = UnitReport(
            unit_id=FRONTIER_ID,
            status="aborted",
            report=SearchReport(
                config_echo={
                    "bound": manifest.get("bound"),
                    "abundance_cap": manifest.get("abundance_cap"),
                    "barrier_stride": manifest.get("barrier_stride"),
                    "roots": [],
                },
                conclusive=False,
                error="frontier report missing",
            ),
        )
    merged = merge(reports, frontier, expected_ids=set(manifest["unit_ids"]))
    writer = _EventWriter(args.out)
    try:
        writer({"kind": "summary", **merged.as_dict()})
    finally:
        writer.close()
    _human_summary(merged)
    return _report_exit_code(merged)


def _cmd_verify(args) -> int:
    if args.number is not None:
        n = args.number
        got = classify(factor_int(n))
        want = oracle_classify(n)
        match = got is want
        print(
            json.dumps(
                {
                    "kind": "verify",
                    "n": n,
                    "classify": got.value,
                    "oracle": want.value,
                    "match": match,
                },
                separators=(",", ":"),
            )
        )
        print(
            f"{n}: classify={got.value} oracle={want.value}"
            + ("" if match else "  MISMATCH"),
            file=sys.stderr,
        )
        return EXIT_OK if match else EXIT_INCONCLUSIVE
    lo, hi = args.range
    mismatches = compare_with_oracle(lo, hi)
    for n, got, want in mismatches:
        print(
            json.dumps(
                {
                    "kind": "verify",
                    "n": n,
                    "classify": got.value,
                    "oracle": want.value,
                    "match": False,
                },
                separators=(",", ":"),
            )
        )
    checked = max(0, hi - max(lo, 1) + 1)
    print(
        f"verified [{lo}, {hi}]: {checked} numbers, {len(mismatches)} mismatches",
        file=sys.stderr,
    )
    return EXIT_OK if not mismatches else EXIT_INCONCLUSIVE


def _cmd_bench(args) -> int:
    rows = bench_mod.run_benchmarks(repeat=args.repeat, quick=args.quick)
    print(bench_mod.format_table(rows))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "search": _cmd_search,
        "split": _cmd_split,
        "run-unit": _cmd_run_unit,
        "merge": _cmd_merge,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"weirdsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"weirdsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
