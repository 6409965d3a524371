"""Verification suites: exact values, finite-n inequalities, semisaturation
classification and the decision procedures.

Each suite returns a list of check records.  Records carry no timings, so a
report is byte-identical across runs and worker counts.
"""

from __future__ import annotations

import json
import random
from itertools import product
from math import comb

from .. import __version__
from ..classify import (
    BOUNDED,
    NOT_O1,
    ex_o1_decide,
    minnonlin_count_bound,
    minnonlin_filters,
    ssat_bounded_single,
    ssat_exponent,
)
from ..constructions import (
    Family,
    corner_block,
    family_bdr,
    family_pkr,
    identity,
    identity_equivalents,
    inflate_empty_layers,
    single_one_saturated,
    single_one_saturated_weight,
    ssat_exponent_pattern,
    ssat_witness,
    witness_min_n,
)
from .._placements import Instance
from ..containment import contains_any
from ..search import (
    SAT_MAX_CELLS,
    ex_exact,
    is_saturated,
    is_semisaturated,
    sat_exact,
    ssat_exact,
)
from ..tensor import Tensor01, alone_in_section, layer_runs, make_tensor, project
from ..transforms import (
    add_adjacent_one,
    insert_empty_layer,
    insert_one_layers,
    longest_empty_run,
    lower_entry,
    replicate_dim,
)

SUITES = ("exact-values", "inequalities", "ssat", "decisions")
DEFAULT_SEED = 20240501
INEQUALITY_ITEMS = 100


def encode(t: Tensor01 | None) -> str | None:
    if t is None:
        return None
    return "x".join(map(str, t.dims)) + ":" + format(t.bits, "x")


class _Recorder:
    def __init__(self, suite: str):
        self.suite = suite
        self.checks: list[dict] = []

    def add(self, criterion, name, params, expected, observed, passed, **extra):
        rec = {
            "criterion": criterion,
            "check": name,
            "params": params,
            "expected": expected,
            "observed": observed,
            "passed": bool(passed),
        }
        rec.update(extra)
        self.checks.append(rec)
        return passed


def _value(outcome):
    return outcome.value if outcome.ok else f"{outcome.status}"


# exact values


def suite_exact_values(workers: int = 1) -> list[dict]:
    rec = _Recorder("exact-values")
    opts = {"workers": workers}

    for k in (2, 3):
        fam = Family([identity(k)])
        for n in (3, 4, 5):
            expected = (k - 1) * (2 * n - (k - 1))
            for fn, func in (("ex", ex_exact), ("sat", sat_exact)):
                o = func(fam, n, **opts)
                ok = o.ok and o.value == expected
                if ok and fn == "ex":
                    ok = contains_any(o.witness, fam) is None
                if ok and fn == "sat":
                    ok = is_saturated(o.witness, fam)
                rec.add(1, f"{fn} identity", {"k": k, "n": n}, expected, _value(o), ok,
                        witness=encode(o.witness), nodes=o.nodes)

    grid = [(2, 1, 1, 5), (2, 2, 1, 5), (2, 1, 0, 5), (3, 1, 0, 3), (3, 1, 1, 3), (3, 2, 1, 3)]
    for criterion, fn, func in ((2, "ex", ex_exact), (3, "sat", sat_exact)):
        for d, k, r, n_max in grid:
            fam = family_pkr(d, k, r)
            for n in range(k, n_max + 1):
                o = func(fam, n, **opts)
                expected = k * n**r
                rec.add(criterion, f"{fn} P_dkr", {"d": d, "k": k, "r": r, "n": n}, expected,
                        _value(o), o.ok and o.value == expected,
                        witness=encode(o.witness), nodes=o.nodes)

    for dims in ((1, 2), (2, 2)):
        for q in product(*(range(1, k + 1) for k in dims)):
            p = make_tensor(dims, [q])
            fam = Family([p])
            for n in (3, 4):
                o = sat_exact(fam, n, **opts)
                expected = single_one_saturated_weight(dims, n)
                unique = single_one_saturated(p, n)
                minima = _all_minimum_saturated(fam, n)
                ok = o.ok and o.value == expected and o.witness == unique and minima == [unique]
                rec.add(4, "sat single one", {"dims": list(dims), "one": list(q), "n": n},
                        {"value": expected, "witness": encode(unique), "count": 1},
                        {"value": _value(o), "witness": encode(o.witness), "count": len(minima)},
                        ok, nodes=o.nodes)

    for d, r in ((2, 1), (2, 2), (3, 1)):
        _, fam = family_bdr(d, r)
        for n in (4, 5):
            m = corner_block(n, d, r)
            big = inflate_empty_layers(m, n + 3)
            rec.add(8, "corner saturated", {"d": d, "r": r, "n": n}, True,
                    is_saturated(m, fam), is_saturated(m, fam))
            rec.add(8, "inflated corner saturated", {"d": d, "r": r, "n": n + 3}, True,
                    is_saturated(big, fam), is_saturated(big, fam), witness=encode(big))
    _, fam = family_bdr(2, 2)
    o = sat_exact(fam, 5, **opts)
    rec.add(8, "sat corner family", {"d": 2, "r": 2, "n": 5}, 4, _value(o),
            o.ok and o.value == 4, witness=encode(o.witness), nodes=o.nodes)
    return rec.checks


def _all_minimum_saturated(fam: Family, n: int) -> list[Tensor01]:
    """Exhaustive list of minimum-weight saturated n^d matrices (small n only)."""
    inst = Instance(fam.patterns, n, reduce_forced=False)
    if inst.size > 20:
        raise ValueError("exhaustive enumeration limited to 20 cells")
    full = inst.full
    best = None
    found = []
    for ones in range(1 << inst.size):
        if inst.contains(ones):
            continue
        if (inst.dead_set(ones) | ones) != full:
            continue
        w = ones.bit_count()
        if best is None or w < best:
            best, found = w, [ones]
        elif w == best:
            found.append(ones)
    return [Tensor01((n,) * fam.d, b) for b in sorted(found)]


# finite-n inequalities


def random_pattern(rng: random.Random, d: int, max_side: int = 3, density: float = 0.5) -> Tensor01:
    dims = tuple(rng.randint(1, max_side) for _ in range(d))
    cells = list(product(*(range(1, k + 1) for k in dims)))
    ones = [c for c in cells if rng.random() < density]
    if not ones:
        ones = [rng.choice(cells)]
    return make_tensor(dims, ones)


def random_corpus(seed: int = DEFAULT_SEED, count: int = INEQUALITY_ITEMS) -> list[dict]:
    """Random items: a pattern, a sub-pattern, a small family and transformation choices."""
    rng = random.Random(seed)
    items = []
    for _ in range(count):
        d = rng.choice((2, 3))
        p = random_pattern(rng, d)
        keep = [c for c in p.ones() if rng.random() < 0.6]
        q = make_tensor(p.dims, keep)
        size = rng.randint(1, d - 1)
        fam = [p] + [random_pattern(rng, d) for _ in range(size - 1)]
        items.append(
            {
                "d": d,
                "pattern": p,
                "sub": q,
                "family": Family.dedup(fam),
                "dim": rng.randint(1, d),
                "at_end": rng.random() < 0.5,
                "t": rng.randint(1, 2),
                "pick": rng.random(),
            }
        )
    return items


class _ExCache:
    def __init__(self, workers: int):
        self.workers = workers
        self.memo: dict = {}

    def ex(self, fam, n: int) -> int | str:
        fam = fam if isinstance(fam, Family) else Family([fam])
        key = ("ex", fam, n)
        if key not in self.memo:
            o = ex_exact(fam, n, workers=self.workers)
            self.memo[key] = o.value if o.exact else o.status
        return self.memo[key]

    def ssat(self, fam, n: int) -> int | str:
        fam = fam if isinstance(fam, Family) else Family([fam])
        key = ("ssat", fam, n)
        if key not in self.memo:
            o = ssat_exact(fam, n, workers=self.workers)
            self.memo[key] = o.value if o.exact else o.status
        return self.memo[key]


def _pick(seq, u: float):
    return seq[min(int(u * len(seq)), len(seq) - 1)]


def _le(a, b) -> bool:
    return isinstance(a, int) and isinstance(b, int) and a <= b


def suite_inequalities(workers: int = 1, seed: int = DEFAULT_SEED,
                       count: int = INEQUALITY_ITEMS) -> list[dict]:
    rec = _Recorder("inequalities")
    ex = _ExCache(workers)
    C = 7
    for idx, it in enumerate(random_corpus(seed, count)):
        d, p, q, fam = it["d"], it["pattern"], it["sub"], it["family"]
        i = it["dim"]
        base = {"item": idx, "pattern": encode(p)}
        for n in (2, 3):
            par = dict(base, n=n)
            e_p = ex.ex(p, n)
            lo = n ** (d - 1)

            e_q = ex.ex(q, n)
            rec.add(C, "mono", dict(par, sub=encode(q)), f"ex(P) >= ex(Q)", [e_p, e_q], _le(e_q, e_p))

            if p.weight >= 2:
                rec.add(C, "two ones", par, f">= {lo}", e_p, _le(lo, e_p))

            e_f = ex.ex(fam, n)
            k = len(fam)
            rec.add(C, "either-or", dict(par, family=[encode(x) for x in fam]),
                    f"0 or >= {n ** (d - k)}", e_f,
                    isinstance(e_f, int) and (e_f == 0 or e_f >= n ** (d - k)))

            pbar = project(p, d)
            e_bar = ex.ex(pbar, n)
            rec.add(C, "projection", par, "ex(P) >= n*ex(proj)", [e_p, e_bar],
                    isinstance(e_bar, int) and _le(n * e_bar, e_p))

            flat = p if d == 2 else project(p, 3)
            e_flat = ex.ex(flat, n)
            e_st = ex.ex(replicate_dim(flat, 2), n)
            rec.add(C, "stretch", dict(par, base=encode(flat)),
                    "n*ex(P) <= ex(P') <= (2n-1)*ex(P)", [e_flat, e_st],
                    isinstance(e_flat, int) and _le(n * e_flat, e_st)
                    and _le(e_st, (2 * n - 1) * e_flat))

            a = i - 1
            bottoms = [c for c in p.ones() if c[a] == p.dims[a]]
            if bottoms:
                c = _pick(bottoms, it["pick"])
                e_add = ex.ex(add_adjacent_one(p, i, c), n)
                rec.add(C, "add one", dict(par, dim=i, entry=list(c)),
                        "ex(P') <= n^(d-1) + ex(P)", [e_p, e_add], _le(e_add, lo + e_p))
                e_low = ex.ex(lower_entry(p, i, c), n)
                rec.add(C, "lower", dict(par, dim=i, entry=list(c)),
                        "ex(P') <= ex(P) + n^(d-1)", [e_p, e_low], _le(e_low, e_p + lo))

            runs = layer_runs(p, i)
            if it["at_end"]:
                pos = p.dims[a]
                tail = next((ln for s, ln in runs if s + ln - 1 == p.dims[a]), 0)
            else:
                pos = 0
                tail = next((ln for s, ln in runs if s == 1), 0)
            e_att = ex.ex(insert_empty_layer(p, i, pos), n)
            rec.add(C, "attach empty layer", dict(par, dim=i, pos=pos),
                    f"ex(P') <= ex(P) + {tail + 1}*n^(d-1)", [e_p, e_att],
                    _le(e_att, e_p + (tail + 1) * lo))

            if p.dims[a] >= 2:
                pos = 1 + int(it["pick"] * (p.dims[a] - 1))
                kk = longest_empty_run(p, i) + 2
                e_ins = ex.ex(insert_empty_layer(p, i, pos), n)
                rec.add(C, "insert empty layer", dict(par, dim=i, pos=pos),
                        f"ex(P') <= {kk}*ex(P)", [e_p, e_ins], _le(e_ins, kk * e_p))

            pairs = [
                c for c in p.ones()
                if c[a] < p.dims[a] and p.get(c[:a] + (c[a] + 1,) + c[a + 1:])
            ]
            if pairs:
                c = _pick(pairs, it["pick"])
                t = it["t"]
                row = c[:a] + c[a + 1:]
                e_bt = ex.ex(insert_one_layers(p, i, c[a], row, t), n)
                rec.add(C, "insert between", dict(par, dim=i, entry=list(c), t=t),
                        f"ex(P) <= ex(P') <= {t + 1}*ex(P)", [e_p, e_bt],
                        _le(e_p, e_bt) and _le(e_bt, (t + 1) * e_p))

            for dp in range(1, d):
                fixed = [set(s) for s in _combos(d, d - dp)]
                lonely = any(
                    all(alone_in_section(x, o, s) for s in fixed) for x in fam for o in x.ones()
                )
                if lonely:
                    continue
                s_f = ex.ssat(fam, n)
                bound = n**d / (1 + comb(d, dp) * (n**dp - 1))
                rec.add(C, "only", dict(par, family=[encode(x) for x in fam], dprime=dp),
                        f">= {bound:.4f}", s_f, isinstance(s_f, int) and s_f >= bound)
    return rec.checks


def _combos(d, size):
    from itertools import combinations

    return combinations(range(1, d + 1), size)


# semisaturation


def ssat_corpus() -> list[tuple[str, Family, int]]:
    """Named families with their expected exponents."""
    corpus = [
        ("single one 1x1", Family([Tensor01.full((1, 1))]), 0),
        ("identity 2", Family([identity(2)]), 0),
        ("all-ones 2x2", Family([Tensor01.full((2, 2))]), 1),
        ("all-ones 2x2x2", Family([Tensor01.full((2, 2, 2))]), 2),
    ]
    for d, k in ((2, 0), (2, 1), (3, 1), (3, 2)):
        corpus.append((f"constructed d={d} k={k}", Family([ssat_exponent_pattern(d, k)]), k))
    return corpus


CONSTANT_CHECK = ("single one 1x1", "identity 2")


def suite_ssat(workers: int = 1) -> list[dict]:
    rec = _Recorder("ssat")
    C = 6
    for name, fam, expected in ssat_corpus():
        cls = ssat_exponent(fam)
        rec.add(C, "exponent", {"family": name}, expected, cls.exponent, cls.exponent == expected,
                failing={str(k): v for k, v in cls.failing().items()})
        if name == "all-ones 2x2x2":
            fails = [not cls.levels[k][1] for k in (0, 1)]
            rec.add(C, "lonely-entry property fails below 2", {"family": name}, [True, True],
                    fails, all(fails))
        if len(fam) == 1:
            b = ssat_bounded_single(fam[0])
            rec.add(C, "bounded test agrees", {"family": name}, cls.exponent == 0, b,
                    b == (cls.exponent == 0))

        if name in CONSTANT_CHECK:
            values = [ssat_exact(fam, n, workers=workers) for n in (3, 4, 5)]
            obs = [_value(o) for o in values]
            rec.add(C, "ssat constant", {"family": name, "n": [3, 4, 5]}, "constant", obs,
                    all(o.ok for o in values) and len(set(obs)) == 1)

        top = 8 if fam.d == 2 else 4
        lo = witness_min_n(fam)
        ns = list(range(lo, top + 1)) or [lo]
        for n in ns:
            w = ssat_witness(fam, expected, n)
            ok = is_semisaturated(w, fam)
            rec.add(C, "witness semisaturated", {"family": name, "k": expected, "n": n}, True, ok,
                    ok, weight=w.weight, witness=encode(w))
            if n**fam.d <= SAT_MAX_CELLS:
                o = ssat_exact(fam, n, workers=workers)
                rec.add(C, "ssat below witness", {"family": name, "n": n}, f"<= {w.weight}",
                        _value(o), o.ok and o.value <= w.weight, witness=encode(o.witness),
                        nodes=o.nodes)
                if o.ok:
                    rec.add(C, "ssat witness semisaturated", {"family": name, "n": n}, True,
                            is_semisaturated(o.witness, fam), is_semisaturated(o.witness, fam))
    return rec.checks


# decisions


def four_pattern_family() -> Family:
    return Family([
        Tensor01.full((1, 2)),
        Tensor01.full((2, 1)),
        identity(2),
        identity_equivalents(2, 2)[1],
    ])


def suite_decisions(workers: int = 1) -> list[dict]:
    rec = _Recorder("decisions")
    C = 5
    fam = four_pattern_family()
    v = ex_o1_decide(fam, 4)
    rec.add(C, "bounded verdict", {"family": "four patterns", "depth": 4}, "BoundedO1(2, 1)",
            str(v), v.status == BOUNDED and (v.n0, v.bound) == (2, 1))
    for n in (3, 4):
        o = ex_exact(fam, n, workers=workers)
        ok = o.ok and o.value == 1 and v.bound is not None and o.value <= v.bound
        rec.add(C, "ex within bound", {"family": "four patterns", "n": n}, 1, _value(o), ok,
                witness=encode(o.witness))

    row = Family([Tensor01.full((1, 2))])
    v = ex_o1_decide(row, 4)
    rec.add(C, "unbounded verdict", {"family": "row pair", "depth": 4}, "NotO1AtDepth(4)",
            str(v), v.status == NOT_O1)
    for n0 in range(1, 5):
        w = v.witnesses.get(n0)
        ok = (
            w is not None
            and w in list(identity_equivalents(n0, 2))
            and contains_any(w, row) is None
        )
        rec.add(C, "avoider witness", {"family": "row pair", "n0": n0}, "identity equivalent",
                encode(w), ok)

    single = Family([Tensor01.full((1, 1))])
    v = ex_o1_decide(single, 3)
    rec.add(C, "single one verdict", {"family": "single one", "depth": 3}, "BoundedO1(1, 0)",
            str(v), v.status == BOUNDED and (v.n0, v.bound) == (1, 0))

    cor = make_tensor((2, 2, 2), [(1, 1, 1), (1, 2, 1), (2, 1, 2), (2, 2, 2)])
    res = minnonlin_filters(cor)
    rec.add(None, "filters pass", {"pattern": encode(cor)}, True,
            [r.as_dict() for r in res], all(r.passed for r in res))
    long = make_tensor((2, 2, 12), [(1, 1, 1), (2, 2, 12)])
    res = minnonlin_filters(long)
    rec.add(None, "side filter rejects", {"pattern": encode(long)}, False, res[0].passed,
            not res[0].passed)
    for dims, expected in (((1,), 1), ((2,), 289), ((1, 1), 1)):
        got = minnonlin_count_bound(dims)
        rec.add(None, "count bound", {"dims": list(dims)}, expected, got, got == expected)
    return rec.checks


RUNNERS = {
    "exact-values": suite_exact_values,
    "inequalities": suite_inequalities,
    "ssat": suite_ssat,
    "decisions": suite_decisions,
}


def run_suite(name: str, workers: int = 1, seed: int = DEFAULT_SEED) -> dict:
    """Run one suite (or ``all``) and return its report."""
    if name == "all":
        names = list(SUITES)
    elif name in RUNNERS:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    checks = []
    for nm in names:
        kwargs = {"workers": workers}
        if nm == "inequalities":
            kwargs["seed"] = seed
        for c in RUNNERS[nm](**kwargs):
            c["suite"] = nm
            checks.append(c)
    failed = [c for c in checks if not c["passed"]]
    return {
        "schema": 1,
        "version": __version__,
        "suite": name,
        "seed": seed,
        "total": len(checks),
        "failed": len(failed),
        "passed": not failed,
        "checks": checks,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, default=str) + "\n"


def summary_text(report: dict) -> str:
    by = {}
    for c in report["checks"]:
        key = c["criterion"]
        ok, tot = by.get(key, (0, 0))
        by[key] = (ok + c["passed"], tot + 1)
    lines = [f"suite {report['suite']}: {report['total'] - report['failed']}/{report['total']} checks passed"]
    for key in sorted(by, key=lambda k: (k is None, k)):
        ok, tot = by[key]
        label = f"criterion {key}" if key is not None else "other"
        lines.append(f"  {label}: {ok}/{tot}")
    for c in report["checks"]:
        if not c["passed"]:
            lines.append(f"  FAILED {c['suite']}/{c['check']} {c['params']}: "
                         f"expected {c['expected']}, observed {c['observed']}")
    return "\n".join(lines) + "\n"
