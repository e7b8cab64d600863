"""Command-line driver: compute tables, regress against vendored data,
check formal identities, and run brute-force verification.

Exit codes: 0 all good, 2 unresolved records or unrecognised families
survived, 3 regression mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algdata import instantiate
from .engine import EngineContext, UnknownCore, resolve, ResolvedTable
from .oracle import class_count
from .patterns import Poset, chain, encode_pattern, pattern_census, unitriangular_census
from .polyring import CountPoly, shifted_coeffs


class GoldenMissing(Exception):
    pass


@dataclass
class RunConfig:
    n: int | None = None
    poset_file: str | None = None
    fmt: str = "json"
    verify: bool = False
    oracle_qs: tuple[int, ...] = (2, 3)
    max_nodes: int = 500_000_000
    max_depth: int = 50_000
    threads: int = 1
    seed: int = 0
    debug_counts: bool = False
    cache_dir: Path = field(default_factory=lambda: _default_cache_dir())

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise ValueError("n must be at least 1")
        if not set(self.oracle_qs) <= {2, 3, 4, 5}:
            raise ValueError("oracle fields are limited to q in {2,3,4,5}")


def _default_cache_dir() -> Path:
    return Path(os.environ.get("UNICOUNT_CACHE_DIR", ".unicount-cache"))


def make_context(cfg: RunConfig) -> EngineContext:
    return EngineContext(debug_counts=cfg.debug_counts, max_nodes=cfg.max_nodes,
                         max_depth=cfg.max_depth)


# ---------------------------------------------------------------------------
# golden data

_TERM_RE = re.compile(r"([+-])?\s*(\d+)?\s*(q(?:\^(\d+))?)?\s*")


def parse_q_poly(text: str) -> CountPoly:
    """Parse '7q^9 - 6q^8 - q^7' style polynomials in q."""
    terms: dict[tuple[int, int], int] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at ...{text[pos:]!r}")
        sign, coeff, qpart, exp = m.groups()
        if coeff is None and qpart is None:
            raise ValueError(f"cannot parse polynomial at ...{text[pos:]!r}")
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        dq = 0
        if qpart:
            dq = int(exp) if exp else 1
        terms[(dq, 0)] = terms.get((dq, 0), 0) + c
        pos = m.end()
    return CountPoly(terms)


def load_golden_tables() -> dict[int, dict[int, CountPoly]]:
    """The vendored N_{n,e}(q) tables for 10 <= n <= 13."""
    try:
        raw = resources.files("unicount").joinpath("data/appendix_tables.json").read_text()
    except FileNotFoundError as exc:
        raise GoldenMissing("vendored table file is missing") from exc
    data = json.loads(raw)
    return {int(n): {int(e): parse_q_poly(s) for e, s in rows.items()}
            for n, rows in data.items()}


# ---------------------------------------------------------------------------
# computing and caching

def compute_table(n: int, ctx: EngineContext) -> ResolvedTable:
    return resolve(unitriangular_census(n, ctx), n, ctx)


def _cache_path(cfg: RunConfig, n: int) -> Path:
    return cfg.cache_dir / f"table_n{n}.json"


def table_from_json(obj: dict) -> ResolvedTable:
    return ResolvedTable.from_json(obj)


def load_or_compute(n: int, cfg: RunConfig, ctx: EngineContext | None = None) -> ResolvedTable:
    path = _cache_path(cfg, n)
    if path.exists():
        return table_from_json(json.loads(path.read_text()))
    ctx = ctx or make_context(cfg)
    table = compute_table(n, ctx)
    if not table.unresolved:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(table.to_json(), indent=1, sort_keys=True))
    return table


# ---------------------------------------------------------------------------
# output formats

def format_table(table: ResolvedTable, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(table.to_json(), indent=1, sort_keys=True)
    if fmt == "csv":
        lines = ["n,e,polynomial"]
        for e, p in table.entries.items():
            lines.append(f"{table.n},{e},{p!r}")
        return "\n".join(lines) + "\n"
    if fmt == "latex":
        lines = [r"\begin{tabular}{|c|l|}", r"\hline",
                 rf"\multicolumn{{2}}{{c}}{{$n={table.n}$}} \\", r"\hline",
                 r"$e$ & $N_{n,e}(q)$ \\", r"\hline"]
        for e, p in table.entries.items():
            lines.append(rf"{e} & ${_latex_poly(p)}$ \\")
            lines.append(r"\hline")
        lines.append(r"\end{tabular}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _latex_poly(p: CountPoly) -> str:
    parts = []
    for (dq, dt), c in sorted(p.terms.items(), key=lambda kv: (kv[0][1], -kv[0][0])):
        body = ""
        if dq:
            body += "q" if dq == 1 else f"q^{{{dq}}}"
        if dt:
            body += "t" if dt == 1 else f"t^{{{dt}}}"
        mag = "" if abs(c) == 1 and body else str(abs(c))
        term = (mag + body) or "1"
        if not parts:
            parts.append(("-" if c < 0 else "") + term)
        else:
            parts.append(("- " if c < 0 else "+ ") + term)
    return " ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# identities

def check_identities(table: ResolvedTable) -> dict:
    """The three formal consistency checks for one completed n."""
    n = table.n
    weighted = table.full_poly().weight_formal()
    sum_rule = weighted.terms == {(n * (n - 1) // 2, 0): 1} if n > 1 else \
        weighted.terms == {(0, 0): 1}
    linear_rule = table.entries.get(0, CountPoly.zero()).terms == \
        ({(n - 1, 0): 1} if n > 1 else {(0, 0): 1})
    shift_nonneg = all(c > 0 for p in table.entries.values()
                       for c in shifted_coeffs(p).values())
    return {"n": n, "sum_rule": sum_rule, "linear_rule": linear_rule,
            "shifted_nonnegative": shift_nonneg,
            "pass": sum_rule and linear_rule and shift_nonneg}


# ---------------------------------------------------------------------------
# commands

def cmd_compute(cfg: RunConfig) -> int:
    ctx = make_context(cfg)
    try:
        if cfg.poset_file:
            poset = Poset.from_json(json.loads(Path(cfg.poset_file).read_text()))
            c = pattern_census(poset, ctx)
            table = resolve(c, len(poset.elems), ctx)
        else:
            table = load_or_compute(cfg.n, cfg, ctx)
    except UnknownCore as exc:
        print(f"unresolvable family survived: {exc}", file=sys.stderr)
        return 2
    print(format_table(table, cfg.fmt))
    if ctx.count_violations:
        print(f"count audit violations: {len(ctx.count_violations)}", file=sys.stderr)
        return 2
    if table.unresolved:
        print(f"{len(table.unresolved)} unresolved count records", file=sys.stderr)
        return 2
    return 0


def cmd_regress(cfg: RunConfig, golden=None) -> int:
    if golden is None:
        golden = load_golden_tables()
    status = 0
    for n in sorted(golden):
        table = load_or_compute(n, cfg)
        for e in sorted(set(golden[n]) | set(table.entries)):
            want = golden[n].get(e)
            got = table.entries.get(e)
            if want != got:
                print(f"MISMATCH n={n} e={e}:")
                print(f"  golden:   {want!r}")
                print(f"  computed: {got!r}")
                status = 3
                break
        else:
            print(f"n={n}: {len(golden[n])} rows match exactly")
            continue
        break
    return status


def cmd_identities(cfg: RunConfig, max_n: int) -> int:
    status = 0
    ctx = make_context(cfg)
    for n in range(1, max_n + 1):
        table = load_or_compute(n, cfg, ctx)
        report = check_identities(table)
        flag = "ok" if report["pass"] else "FAIL"
        print(f"n={n}: sum_rule={report['sum_rule']} linear_rule={report['linear_rule']} "
              f"shifted_nonnegative={report['shifted_nonnegative']} [{flag}]")
        if not report["pass"]:
            status = 2
    return status


def cmd_verify(cfg: RunConfig, max_n: int = 5) -> int:
    """Brute-force agreement: engine totals vs conjugacy-class counts."""
    import concurrent.futures as cf

    ctx = make_context(cfg)
    jobs = []
    for n in range(2, max_n + 1):
        table = compute_table(n, ctx)
        for q0 in cfg.oracle_qs:
            jobs.append((n, q0, table))

    def run(job):
        n, q0, table = job
        alg = instantiate(encode_pattern(chain(n)), {}, q0)
        expected = class_count(alg)
        actual = sum(p.eval_at(q0) for p in table.entries.values())
        return {"instance": f"U_{n}({q0})", "q": q0,
                "expected": expected, "actual": actual,
                "pass": expected == actual}

    if cfg.threads > 1:
        with cf.ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            reports = list(ex.map(run, jobs))
    else:
        reports = [run(j) for j in jobs]
    reports.sort(key=lambda r: r["instance"])
    print(json.dumps(reports, indent=1))
    return 0 if all(r["pass"] for r in reports) else 2


def cmd_dump_families(cfg: RunConfig) -> int:
    ctx = make_context(cfg)
    c = unitriangular_census(cfg.n, ctx)
    out = [{"core": f.data.to_json(), "z": f"e{f.z}" if f.z is not None else None,
            "kind": f.kind, "k": f.k, "l": f.l, "m": f.m}
           for f in c.families]
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unicount",
                                 description="Character degree counts for U_n(q)")
    ap.add_argument("--cache-dir", default=None,
                    help="report cache (default $UNICOUNT_CACHE_DIR or ./.unicount-cache)")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-nodes", type=int, default=500_000_000)
    ap.add_argument("--max-depth", type=int, default=50_000)
    ap.add_argument("--debug-counts", action="store_true",
                    help="audit every counted system against exhaustive enumeration")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute the N_{n,e}(q) table for one n")
    p.add_argument("--n", type=int)
    p.add_argument("--poset", help="JSON poset file instead of a chain")
    p.add_argument("--format", choices=("json", "csv", "latex"), default="json")

    p = sub.add_parser("regress", help="compare n=10..13 against the vendored tables")

    p = sub.add_parser("identities", help="formal consistency checks")
    p.add_argument("--max-n", type=int, default=13)

    p = sub.add_parser("verify", help="brute-force class-count agreement")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--q", type=int, nargs="*", default=[2, 3])

    p = sub.add_parser("dump-families", help="unresolved families for one n")
    p.add_argument("--n", type=int, required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kwargs = dict(threads=args.threads, seed=args.seed, max_nodes=args.max_nodes,
                  max_depth=args.max_depth, debug_counts=args.debug_counts)
    if args.cache_dir:
        kwargs["cache_dir"] = Path(args.cache_dir)
    if args.command == "compute":
        if bool(args.n) == bool(args.poset):
            print("compute needs exactly one of --n or --poset", file=sys.stderr)
            return 2
        cfg = RunConfig(n=args.n, poset_file=args.poset, fmt=args.format, **kwargs)
        return cmd_compute(cfg)
    if args.command == "regress":
        return cmd_regress(RunConfig(**kwargs))
    if args.command == "identities":
        return cmd_identities(RunConfig(**kwargs), args.max_n)
    if args.command == "verify":
        return cmd_verify(RunConfig(oracle_qs=tuple(args.q), **kwargs), args.max_n)
    if args.command == "dump-families":
        return cmd_dump_families(RunConfig(n=args.n, **kwargs))
    return 2


if __name__ == "__main__":
    sys.exit(main())
