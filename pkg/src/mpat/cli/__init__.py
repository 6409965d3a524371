"""Command-line workbench: ``mpat <command> ...``.

Exit codes: 0 ok, 1 verification failure, 2 usage or input error, 3 a search
guard aborted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys
import time
from pathlib import Path

from .. import __version__
from ..classify import ex_o1_decide, minnonlin_filters, ssat_bounded_single, ssat_exponent
from ..constructions import (
    Family,
    family_bdr,
    family_pkr,
    identity_equivalents,
    j_family,
    ssat_exponent_pattern,
    ssat_witness,
)
from ..containment import contains, embedding_using
from ..search import EX_MAX_CELLS, SAT_MAX_CELLS, ex_exact, sat_exact, ssat_exact
from ..tensor import TensorError
from ..transforms import insert_empty_layer, lift_entry, lower_entry, replicate_dim
from .cache import ResultCache, resolve_cache_dir
from .formats import (
    FormatError,
    family_hash,
    family_to_dict,
    load_family,
    load_pattern,
    pattern_to_dict,
    serialize_family,
    serialize_pattern,
)
from .suites import DEFAULT_SEED, SUITES, random_pattern, report_json, run_suite, summary_text

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

CSV_COLUMNS = ["family_hash", "function", "n", "value", "witness_weight", "nodes", "elapsed_ms", "exact"]
SEARCHES = {"ex": ex_exact, "sat": sat_exact, "ssat": ssat_exact}

log = logging.getLogger("mpat")


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--max-cells", type=int, default=None,
                   help="free-cell guard for exact search (default %d for ex, %d for sat/ssat)"
                   % (EX_MAX_CELLS, SAT_MAX_CELLS))
    p.add_argument("--max-nodes", type=int, default=None, help="node limit per search subproblem")
    p.add_argument("--workers", type=int, default=1, help="worker processes for search")
    p.add_argument("--cache-dir", default=None, help="result cache directory (MPAT_CACHE_DIR wins)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None,
                   help="output format (default csv for report, text for verify, json otherwise)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for corpus generation")
    p.add_argument("--no-timings", action="store_true", help="report elapsed_ms as 0")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mpat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mpat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("contains", parents=[common], help="test whether a host contains a pattern")
    p.add_argument("host")
    p.add_argument("pattern")
    p.add_argument("--cell", type=int, nargs="+", help="require a copy through this host cell")

    for name in SEARCHES:
        p = sub.add_parser(name, parents=[common], help=f"exact {name} value of a family")
        p.add_argument("family")
        p.add_argument("-n", type=int, nargs="+", required=True)

    p = sub.add_parser("classify-ssat", parents=[common], help="semisaturation exponent")
    p.add_argument("family")

    p = sub.add_parser("decide-o1", parents=[common], help="bounded-extremal depth test")
    p.add_argument("family")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--guard", type=int, default=None, help="enumeration guard per depth")

    p = sub.add_parser("gen", parents=[common], help="generate constructions")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("identity-equivalents", parents=[common])
    g.add_argument("--n0", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g = gsub.add_parser("j-family", parents=[common])
    g.add_argument("--n0", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--limit", type=int, default=None)
    g = gsub.add_parser("pkr", parents=[common])
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g = gsub.add_parser("bdr", parents=[common])
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g = gsub.add_parser("ssat-witness", parents=[common])
    g.add_argument("family")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("-n", type=int, required=True)
    g = gsub.add_parser("ssat-pattern", parents=[common])
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g = gsub.add_parser("random", parents=[common])
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--max-side", type=int, default=3)

    p = sub.add_parser("transform", parents=[common], help="pattern transformations")
    tsub = p.add_subparsers(dest="op", required=True)
    t = tsub.add_parser("replicate", parents=[common])
    t.add_argument("pattern")
    t.add_argument("--dim", type=int, required=True)
    for op in ("lower", "lift"):
        t = tsub.add_parser(op, parents=[common])
        t.add_argument("pattern")
        t.add_argument("--dim", type=int, required=True)
        t.add_argument("--cell", type=int, nargs="+", required=True)
    t = tsub.add_parser("insert-layer", parents=[common])
    t.add_argument("pattern")
    t.add_argument("--dim", type=int, required=True)
    t.add_argument("--pos", type=int, required=True, help="new layer becomes layer pos+1")

    p = sub.add_parser("filters", parents=[common], help="necessary-condition filters")
    fsub = p.add_subparsers(dest="which", required=True)
    f = fsub.add_parser("minnonlin", parents=[common])
    f.add_argument("pattern")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--report", default=None, help="also write the JSON report here")

    p = sub.add_parser("report", parents=[common], help="search results for many families as a table")
    p.add_argument("families", nargs="+")
    p.add_argument("--function", choices=tuple(SEARCHES), default="ex")
    p.add_argument("-n", type=int, nargs="+", required=True)
    return parser


# output helpers


def _emit(args, obj, text: str | None = None) -> None:
    if args.format == "text" and text is not None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    elif args.format == "csv":
        raise UsageError("csv output is only available for search results")
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1, default=str) + "\n")


def _emit_family(args, fam: Family) -> None:
    text = "\n".join(serialize_pattern(p) for p in fam)
    if args.format == "json":
        sys.stdout.write(serialize_family(fam))
    else:
        _emit(args, None, text)


def _cell(values, d):
    if values is None:
        return None
    if len(values) != d:
        raise UsageError(f"--cell needs {d} coordinates")
    return tuple(values)


# search records


def _search_record(args, fam: Family, function: str, n: int, cache) -> dict:
    h = family_hash(fam)
    if cache is not None:
        hit = cache.get(h, function, n)
        if hit is not None and hit.get("version") == __version__:
            log.info("cache hit %s %s n=%d", h, function, n)
            return hit
    kwargs = {"workers": args.workers, "max_nodes": args.max_nodes}
    if args.max_cells is not None:
        kwargs["max_cells"] = args.max_cells
    o = SEARCHES[function](fam, n, **kwargs)
    record = {
        "family_hash": h,
        "function": function,
        "n": n,
        "value": o.value,
        "witness": pattern_to_dict(o.witness) if o.witness is not None else None,
        "witness_weight": o.witness.weight if o.witness is not None else None,
        "nodes": o.nodes,
        "elapsed_ms": 0 if args.no_timings else round(o.elapsed * 1000, 3),
        "exact": o.exact,
        "status": o.status,
        "stats": o.stats,
        "version": __version__,
    }
    if cache is not None and o.exact:
        cache.put(record)
    return record


def _write_records(args, records) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow(r)
        sys.stdout.write(buf.getvalue())
    elif args.format == "text":
        for r in records:
            flag = "" if r["exact"] else f" [{r['status']}]"
            sys.stdout.write(
                f"{r['function']}(n={r['n']}) = {r['value']}{flag}  nodes={r['nodes']}  family={r['family_hash']}\n"
            )
    else:
        sys.stdout.write(json.dumps(records, sort_keys=True, indent=1) + "\n")


def _cache(args):
    root = resolve_cache_dir(args.cache_dir)
    return ResultCache(root) if root is not None else None


# commands


def cmd_contains(args) -> int:
    host = load_pattern(args.host)
    pat = load_pattern(args.pattern)
    cell = _cell(args.cell, host.d)
    emb = embedding_using(host, pat, cell) if cell else contains(host, pat)
    obj = {"contains": emb is not None, "embedding": [list(m) for m in emb.maps] if emb else None}
    text = f"contains: {'yes' if emb else 'no'}"
    if emb:
        text += "\n" + "\n".join(f"dim {j + 1}: {' '.join(map(str, m))}" for j, m in enumerate(emb.maps))
    _emit(args, obj, text)
    return EXIT_OK


def cmd_search(args) -> int:
    fam = load_family(args.family)
    cache = _cache(args)
    records = [_search_record(args, fam, args.command, n, cache) for n in args.n]
    _write_records(args, records)
    return EXIT_OK if all(r["exact"] for r in records) else EXIT_GUARD


def cmd_report(args) -> int:
    cache = _cache(args)
    records = []
    for path in args.families:
        fam = load_family(path)
        for n in args.n:
            records.append(_search_record(args, fam, args.function, n, cache))
    _write_records(args, records)
    return EXIT_OK if all(r["exact"] for r in records) else EXIT_GUARD


def cmd_classify(args) -> int:
    fam = load_family(args.family)
    cls = ssat_exponent(fam)
    levels = {}
    for k, (pi, pii) in cls.levels.items():
        levels[str(k)] = {
            "property_i": {
                "holds": pi.holds,
                "failing_face": dict(pi.failure.sides) if pi.failure else None,
                "witnesses": [
                    {"face": dict(f.sides), "pattern": idx, "entry": list(o)} for f, idx, o in pi.witnesses
                ],
            },
            "property_ii": {
                "holds": pii.holds,
                "witnesses": [{"pattern": idx, "entry": list(o)} for _, idx, o in pii.witnesses],
            },
        }
    obj = {
        "family_hash": family_hash(fam),
        "exponent": cls.exponent,
        "levels": levels,
        "bounded_single": [ssat_bounded_single(p) for p in fam],
    }
    text = f"ssat exponent: {cls.exponent}"
    for k, names in cls.failing().items():
        text += f"\n  k={k}: property {' and '.join(names)} fails"
    _emit(args, obj, text)
    return EXIT_OK


def cmd_decide(args) -> int:
    fam = load_family(args.family)
    v = ex_o1_decide(fam, args.depth, args.guard)
    obj = {
        "verdict": str(v),
        "status": v.status,
        "n0": v.n0,
        "bound": v.bound,
        "witnesses": {str(k): pattern_to_dict(w) for k, w in v.witnesses.items()},
        "reason": v.reason,
    }
    _emit(args, obj, str(v))
    return EXIT_GUARD if v.status == "aborted" else EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "identity-equivalents":
        _emit_family(args, identity_equivalents(args.n0, args.d))
    elif kind == "j-family":
        out = []
        for m in j_family(args.n0, args.d):
            out.append(m)
            if args.limit is not None and len(out) >= args.limit:
                break
        _emit_family(args, Family(out))
    elif kind == "pkr":
        _emit_family(args, family_pkr(args.d, args.k, args.r))
    elif kind == "bdr":
        _, fam = family_bdr(args.d, args.r)
        _emit_family(args, fam)
    elif kind == "ssat-witness":
        fam = load_family(args.family)
        _emit_family(args, Family([ssat_witness(fam, args.k, args.n)]))
    elif kind == "ssat-pattern":
        _emit_family(args, Family([ssat_exponent_pattern(args.d, args.k)]))
    elif kind == "random":
        rng = random.Random(args.seed)
        pats = [random_pattern(rng, args.d, args.max_side) for _ in range(args.count)]
        _emit_family(args, Family.dedup(pats))
    return EXIT_OK


def cmd_transform(args) -> int:
    p = load_pattern(args.pattern)
    if args.op == "replicate":
        q = replicate_dim(p, args.dim)
    elif args.op == "lower":
        q = lower_entry(p, args.dim, _cell(args.cell, p.d))
    elif args.op == "lift":
        q = lift_entry(p, args.dim, _cell(args.cell, p.d))
    else:
        q = insert_empty_layer(p, args.dim, args.pos)
    _emit_family(args, Family([q]))
    return EXIT_OK


def cmd_filters(args) -> int:
    p = load_pattern(args.pattern)
    res = minnonlin_filters(p)
    obj = {"passed": all(r.passed for r in res), "filters": [r.as_dict() for r in res]}
    text = "\n".join(f"{'pass' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in res)
    _emit(args, obj, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, workers=args.workers, seed=args.seed)
    body = report_json(report)
    if args.report:
        Path(args.report).write_text(body)
    if args.format == "json":
        sys.stdout.write(body)
    else:
        sys.stdout.write(summary_text(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


COMMANDS = {
    "contains": cmd_contains,
    "ex": cmd_search,
    "sat": cmd_search,
    "ssat": cmd_search,
    "report": cmd_report,
    "classify-ssat": cmd_classify,
    "decide-o1": cmd_decide,
    "gen": cmd_gen,
    "transform": cmd_transform,
    "filters": cmd_filters,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    if args.format is None:
        args.format = {"report": "csv", "verify": "text"}.get(args.command, "json")
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args)
    except (UsageError, FormatError, TensorError, ValueError, OSError) as exc:
        sys.stderr.write(f"mpat: error: {exc}\n")
        return EXIT_USAGE
    log.info("done in %.2fs", time.perf_counter() - t0)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
