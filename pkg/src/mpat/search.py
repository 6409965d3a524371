"""Exact desk-scale ex / sat / ssat and the saturation predicates.

The optimizers enumerate n^d matrices cell by cell in lexicographic order,
trying 0 before 1, so the leaves are visited in increasing order of their
characteristic vectors.  Because a subtree is only entered when it can beat
the incumbent strictly, the first optimum recorded is the lexicographically
least optimal matrix.  The incumbent starts one step worse than a greedy
solution, which makes that witness reachable even when greedy is optimal.

Containment during search goes through precomputed placement masks (see
:mod:`mpat._placements`); the public predicates use the backtracking matcher
in :mod:`mpat.containment`, so the two routes check each other.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ._placements import Instance, PlacementLimit
from .constructions import Family, as_family
from .containment import contains_any, new_copy_any
from .tensor import Tensor01, TensorError

log = logging.getLogger(__name__)

EX_MAX_CELLS = 30
SAT_MAX_CELLS = 27
SPLIT_DEPTH = 3


class GuardExceeded(RuntimeError):
    pass


class _NodeLimit(Exception):
    pass


@dataclass
class SearchOutcome:
    function: str
    n: int
    value: int | None
    witness: Tensor01 | None
    nodes: int = 0
    elapsed: float = 0.0
    exact: bool = True
    status: str = "ok"
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.exact and self.status == "ok"


# predicates


def is_saturated(m: Tensor01, fam) -> bool:
    """m avoids every member and each 0 -> 1 flip creates a copy of some member."""
    fam = as_family(fam)
    if contains_any(m, fam) is not None:
        return False
    for c in m.cells():
        if not m.get(c) and contains_any(m.set(c), fam) is None:
            return False
    return True


def is_semisaturated(m: Tensor01, fam) -> bool:
    """Each 0 -> 1 flip creates a copy that uses the flipped cell."""
    fam = as_family(fam)
    for c in m.cells():
        if not m.get(c) and new_copy_any(m.set(c), fam, c) is None:
            return False
    return True


def saturate_greedy(fam, seed: Tensor01) -> Tensor01:
    """Flip 0-cells in lexicographic order whenever the flip keeps avoidance.

    One pass suffices: a cell whose flip creates a copy keeps doing so after
    more 1-entries are added.
    """
    fam = as_family(fam)
    if contains_any(seed, fam) is not None:
        raise TensorError("seed already contains a member of the family")
    m = seed
    for c in seed.cells():
        if not m.get(c):
            trial = m.set(c)
            if contains_any(trial, fam) is None:
                m = trial
    return m


# search kernels


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class _Kernel:
    """One branch-and-bound run over a fixed cell order."""

    def __init__(self, inst: Instance, kind: str, node_limit: int | None):
        self.inst = inst
        self.kind = kind
        self.order = inst.free_cells
        L = len(self.order)
        suffix = [0] * (L + 1)
        for pos in range(L - 1, -1, -1):
            suffix[pos] = suffix[pos + 1] | (1 << self.order[pos])
        self.suffix = suffix
        self.nodes = 0
        self.node_limit = node_limit
        self.best = None
        self.best_ones = None

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _NodeLimit

    # maximum-weight avoider

    def run_ex(self, state, best):
        self.best = best
        pos, ones, dead, w = state
        self._ex(pos, ones, dead, w)

    def _ex(self, pos, ones, dead, w):
        self._tick()
        avail = self.suffix[pos] & ~dead
        room = w + avail.bit_count()
        if room <= self.best:
            return
        if avail:
            # disjoint completable masks each keep one available cell at 0
            space = ones | avail
            used = 0
            for m in self.inst.masks_by_size:
                if m & ~space == 0:
                    r = m & avail
                    if r & used == 0:
                        used |= r
                        room -= 1
                        if room <= self.best:
                            return
        if pos == len(self.order):
            self.best = w
            self.best_ones = ones
            return
        c = self.order[pos]
        bit = 1 << c
        if dead & bit:
            self._ex(pos + 1, ones, dead, w)
            return
        self._ex(pos + 1, ones, dead, w)
        new_ones = ones | bit
        self._ex(pos + 1, new_ones, self.inst.dead_after_adding(new_ones, c, dead), w + 1)

    # minimum-weight saturated / semisaturated

    def run_min(self, state, best):
        self.best = best
        pos, ones, dead, zeros, w = state
        self._min(pos, ones, dead, zeros, w)

    def _lower_bound(self, pos, ones, dead, zeros, w):
        """Weight lower bound, or None when some decided 0 can never be covered.

        Every cell that is not yet covered needs one more 1 somewhere in its
        resolve set: the cell itself if still undecided, or a missing cell of
        a mask through it that can still be completed.  Resolve sets that are
        pairwise disjoint need distinct 1-entries.
        """
        by_cell = self.inst.by_cell
        undecided = self.suffix[pos]
        if self.kind == "sat":
            space = ones | (undecided & ~dead)
        else:
            space = ones | undecided
        open_cells = undecided & ~dead
        items = []
        for z in _bits((zeros | open_cells) & ~dead):
            zb = 1 << z
            need = 0
            ok = False
            for m in by_cell[z]:
                rest = m & ~zb
                if rest & ~space == 0:
                    ok = True
                    need |= rest & ~ones
            if zb & open_cells:
                need |= zb
            elif not ok:
                return None
            items.append((need.bit_count(), z, need))
        items.sort()
        extra = 0
        used = 0
        for _, _, need in items:
            if need & used == 0:
                extra += 1
                used |= need
        return w + extra

    def _min(self, pos, ones, dead, zeros, w):
        self._tick()
        lb = self._lower_bound(pos, ones, dead, zeros, w)
        if lb is None or lb >= self.best:
            return
        if pos == len(self.order):
            self.best = w
            self.best_ones = ones
            return
        c = self.order[pos]
        bit = 1 << c
        if self.kind == "sat" and dead & bit:
            self._min(pos + 1, ones, dead, zeros | bit, w)
            return
        self._min(pos + 1, ones, dead, zeros | bit, w)
        new_ones = ones | bit
        self._min(
            pos + 1, new_ones, self.inst.dead_after_adding(new_ones, c, dead), zeros, w + 1
        )


def _split(inst: Instance, kind: str, depth: int) -> list[tuple]:
    """Branch states after the first ``depth`` cells, in search order."""
    order = inst.free_cells
    depth = min(depth, len(order))
    if kind == "ex":
        states = [(0, 0, inst.singletons, 0)]
    else:
        states = [(0, 0, inst.singletons, 0, 0)]
    for pos in range(depth):
        c = order[pos]
        bit = 1 << c
        nxt = []
        for st in states:
            if kind == "ex":
                _, ones, dead, w = st
                nxt.append((pos + 1, ones, dead, w))
                if not dead & bit:
                    no = ones | bit
                    nxt.append((pos + 1, no, inst.dead_after_adding(no, c, dead), w + 1))
            else:
                _, ones, dead, zeros, w = st
                nxt.append((pos + 1, ones, dead, zeros | bit, w))
                if kind == "ssat" or not dead & bit:
                    no = ones | bit
                    nxt.append(
                        (pos + 1, no, inst.dead_after_adding(no, c, dead), zeros, w + 1)
                    )
        states = nxt
    return states


def _solve_part(args):
    inst, kind, state, best, node_limit = args
    k = _Kernel(inst, kind, node_limit)
    aborted = False
    try:
        if kind == "ex":
            k.run_ex(state, best)
        else:
            k.run_min(state, best)
    except _NodeLimit:
        aborted = True
    return k.best, k.best_ones, k.nodes, aborted


def _run_parts(inst, kind, best, node_limit, workers):
    states = _split(inst, kind, SPLIT_DEPTH if len(inst.free_cells) >= 2 * SPLIT_DEPTH else 0)
    jobs = [(inst, kind, st, best, node_limit) for st in states]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_part, jobs))
    else:
        results = [_solve_part(j) for j in jobs]
    nodes = sum(r[2] for r in results)
    aborted = any(r[3] for r in results)
    chosen = None
    for value, ones, _, _ in results:
        if ones is None:
            continue
        if chosen is None:
            chosen = (value, ones)
        elif kind == "ex" and value > chosen[0]:
            chosen = (value, ones)
        elif kind != "ex" and value < chosen[0]:
            chosen = (value, ones)
    return chosen, nodes + len(states), aborted


def _greedy_ones(inst: Instance) -> int:
    ones = 0
    dead = inst.singletons
    for c in inst.free_cells:
        if not (dead >> c) & 1:
            ones |= 1 << c
            dead = inst.dead_after_adding(ones, c, dead)
    return ones


def _prepare(fam, n: int, reduce_forced: bool, max_cells: int, max_placements: int):
    fam = as_family(fam)
    if n < 1:
        raise TensorError("n must be positive")
    try:
        inst = Instance(fam.patterns, n, reduce_forced=reduce_forced, max_placements=max_placements)
    except PlacementLimit as exc:
        raise GuardExceeded(str(exc)) from exc
    if len(inst.free_cells) > max_cells:
        raise GuardExceeded(
            f"{len(inst.free_cells)} free cells exceed the limit of {max_cells} (n={n}, d={fam.d})"
        )
    return fam, inst


def _outcome(function, n, d, value, ones, nodes, t0, aborted, status="ok", **stats):
    witness = None if ones is None else Tensor01((n,) * d, ones)
    return SearchOutcome(
        function=function,
        n=n,
        value=value,
        witness=witness,
        nodes=nodes,
        elapsed=time.perf_counter() - t0,
        exact=not aborted and status != "guard",
        status="node-limit" if aborted else status,
        stats=stats,
    )


def _guarded(function, fam, n, body):
    t0 = time.perf_counter()
    try:
        return body(t0)
    except GuardExceeded as exc:
        log.warning("%s guard: %s", function, exc)
        return SearchOutcome(
            function=function,
            n=n,
            value=None,
            witness=None,
            elapsed=time.perf_counter() - t0,
            exact=False,
            status="guard",
            stats={"reason": str(exc)},
        )


def ex_exact(
    fam,
    n: int,
    *,
    max_cells: int = EX_MAX_CELLS,
    max_nodes: int | None = None,
    workers: int = 1,
    max_placements: int = 2_000_000,
) -> SearchOutcome:
    """Maximum weight of an n^d matrix avoiding every member of ``fam``.

    Cells whose lone 1 already forms a copy of a single-1 member are fixed
    to 0 before the search, and ``max_cells`` counts only the remaining cells.
    """

    def body(t0):
        f, inst = _prepare(fam, n, True, max_cells, max_placements)
        if inst.no_avoider:
            return _outcome("ex", n, f.d, 0, None, 0, t0, False, status="no-avoider")
        greedy = _greedy_ones(inst)
        g = greedy.bit_count()
        chosen, nodes, aborted = _run_parts(inst, "ex", g - 1, max_nodes, workers)
        if chosen is None:
            chosen = (g, greedy)
        return _outcome(
            "ex", n, f.d, chosen[0], chosen[1], nodes, t0, aborted,
            free_cells=len(inst.free_cells), placements=len(inst.masks),
        )

    return _guarded("ex", fam, n, body)


def _min_search(function, fam, n, max_cells, max_nodes, workers, max_placements):
    def body(t0):
        reduce_forced = function == "sat"
        f, inst = _prepare(fam, n, reduce_forced, max_cells, max_placements)
        if function == "sat" and inst.no_avoider:
            return _outcome("sat", n, f.d, None, None, 0, t0, False, status="none-exists")
        # An all-zero member never yields a copy through a flipped cell, so for
        # ssat it simply drops out; the all-ones matrix is always feasible.
        red = inst if reduce_forced else Instance(f.patterns, n, max_placements=max_placements)
        if red.no_avoider:
            upper = inst.size
        else:
            upper = _greedy_ones(red).bit_count()
        chosen, nodes, aborted = _run_parts(inst, function, upper + 1, max_nodes, workers)
        value, ones = chosen if chosen is not None else (None, None)
        return _outcome(
            function, n, f.d, value, ones, nodes, t0, aborted,
            free_cells=len(inst.free_cells), placements=len(inst.masks),
        )

    return _guarded(function, fam, n, body)


def sat_exact(
    fam,
    n: int,
    *,
    max_cells: int = SAT_MAX_CELLS,
    max_nodes: int | None = None,
    workers: int = 1,
    max_placements: int = 2_000_000,
) -> SearchOutcome:
    """Minimum weight of a saturated n^d matrix (status ``none-exists`` if none)."""
    return _min_search("sat", fam, n, max_cells, max_nodes, workers, max_placements)


def ssat_exact(
    fam,
    n: int,
    *,
    max_cells: int = SAT_MAX_CELLS,
    max_nodes: int | None = None,
    workers: int = 1,
    max_placements: int = 2_000_000,
) -> SearchOutcome:
    """Minimum weight of a semisaturated n^d matrix."""
    return _min_search("ssat", fam, n, max_cells, max_nodes, workers, max_placements)


__all__ = [
    "EX_MAX_CELLS",
    "SAT_MAX_CELLS",
    "GuardExceeded",
    "SearchOutcome",
    "ex_exact",
    "is_saturated",
    "is_semisaturated",
    "sat_exact",
    "saturate_greedy",
    "ssat_exact",
]
