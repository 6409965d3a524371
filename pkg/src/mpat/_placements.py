"""Placement masks: every copy of every pattern inside an n^d host, as bitsets.

Bit layout matches :class:`mpat.tensor.Tensor01`, so a host bitset ``M``
contains a pattern iff some placement mask ``m`` has ``m & ~M == 0``.
"""

from __future__ import annotations

from itertools import combinations, product
from math import comb, prod
from typing import Sequence

from .tensor import Tensor01, _strides


class PlacementLimit(RuntimeError):
    pass


def count_placements(p: Tensor01, host_dims: Sequence[int]) -> int:
    if any(a > b for a, b in zip(p.dims, host_dims)):
        return 0
    return prod(comb(n, l) for n, l in zip(host_dims, p.dims))


def placement_masks(p: Tensor01, host_dims: Sequence[int]) -> set[int]:
    host_dims = tuple(host_dims)
    if any(a > b for a, b in zip(p.dims, host_dims)):
        return set()
    strides = _strides(host_dims)
    ones = p.ones()
    if not ones:
        return {0}
    d = p.d
    # per dimension: list of tuples offset[x-1] for each increasing map
    per_dim = []
    for a in range(d):
        opts = []
        for phi in combinations(range(host_dims[a]), p.dims[a]):
            opts.append(tuple(v * strides[a] for v in phi))
        per_dim.append(opts)
    out = set()
    coords0 = [tuple(x - 1 for x in c) for c in ones]
    for choice in product(*per_dim):
        m = 0
        for c in coords0:
            idx = 0
            for a in range(d):
                idx += choice[a][c[a]]
            m |= 1 << idx
        out.add(m)
    return out


class Instance:
    """Placement data for one family on an n^d host."""

    def __init__(
        self,
        patterns: Sequence[Tensor01],
        n: int,
        reduce_forced: bool = True,
        max_placements: int = 2_000_000,
    ):
        d = patterns[0].d
        self.n = n
        self.d = d
        self.dims = (n,) * d
        self.size = n**d
        total = sum(count_placements(p, self.dims) for p in patterns)
        if total > max_placements:
            raise PlacementLimit(f"{total} placements exceed the limit {max_placements}")
        masks: set[int] = set()
        for p in patterns:
            masks |= placement_masks(p, self.dims)
        self.no_avoider = 0 in masks
        masks.discard(0)
        forced = 0
        for m in masks:
            if m & (m - 1) == 0:
                forced |= m
        # Cells whose lone 1 already forms a copy.  They are satisfied zeros in
        # every matrix; when avoidance is required they are also fixed to 0 and
        # every mask through them becomes unusable.
        self.singletons = forced
        self.reduced = reduce_forced
        if reduce_forced:
            kept = sorted(m for m in masks if m & (m - 1) and not m & forced)
        else:
            kept = sorted(m for m in masks if m & (m - 1))
            forced = 0
        self.forced_zero = forced
        self.masks = kept
        self.masks_by_size = sorted(kept, key=lambda m: (m.bit_count(), m))
        self.by_cell: list[tuple[int, ...]] = [() for _ in range(self.size)]
        tmp: list[list[int]] = [[] for _ in range(self.size)]
        for m in kept:
            b = m
            while b:
                low = b & -b
                tmp[low.bit_length() - 1].append(m)
                b ^= low
        self.by_cell = [tuple(x) for x in tmp]
        self.free_cells = [c for c in range(self.size) if not (forced >> c) & 1]
        self.full = (1 << self.size) - 1

    def dead_after_adding(self, ones: int, cell: int, dead: int) -> int:
        """Update the set of cells whose flip would complete a copy."""
        for m in self.by_cell[cell]:
            r = m & ~ones
            if r & (r - 1) == 0:
                dead |= r
        return dead

    def dead_set(self, ones: int) -> int:
        dead = self.singletons
        for m in self.masks:
            r = m & ~ones
            if r & (r - 1) == 0:
                dead |= r
        return dead

    def contains(self, ones: int) -> bool:
        if self.no_avoider:
            return True
        if self.singletons & ones:
            return True
        return any(m & ~ones == 0 for m in self.masks)
