"""Pattern containment for d-dimensional 0-1 matrices.

A host contains a pattern when strictly increasing index maps, one per
dimension, send every 1-entry of the pattern onto a 1-entry of the host.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .tensor import Coord, Tensor01, TensorError


@dataclass(frozen=True)
class Embedding:
    maps: tuple[tuple[int, ...], ...]

    def image(self, coord: Sequence[int]) -> Coord:
        return tuple(m[x - 1] for m, x in zip(self.maps, coord))

    def flattened(self) -> tuple[int, ...]:
        return tuple(v for m in self.maps for v in m)


def _patterns_of(fam) -> list[Tensor01]:
    return list(getattr(fam, "patterns", fam))


class _Matcher:
    """Backtracking over phi_1(1), phi_1(2), ..., phi_d(p_d) in that order.

    Candidates ascend, so the first embedding found is the least one in the
    flattened order.  After each assignment phi_j(a), every pattern 1-entry
    with x_j = a must map to a prefix of some host 1-entry.
    """

    def __init__(self, host: Tensor01, pattern: Tensor01):
        if host.d != pattern.d:
            raise TensorError(f"dimensionality mismatch: host d={host.d}, pattern d={pattern.d}")
        self.host = host
        self.pattern = pattern
        d = host.d
        self.prefixes = [set() for _ in range(d)]
        for c in host.ones():
            for j in range(d):
                self.prefixes[j].add(c[: j + 1])
        self.by_level = [[[] for _ in range(p)] for p in pattern.dims]
        for c in pattern.ones():
            for j in range(d):
                self.by_level[j][c[j] - 1].append(c)

    def search(self, pins: dict[int, tuple[int, int]] | None = None) -> Embedding | None:
        """``pins[j] = (a, v)`` forces phi_j(a) = v (0-based dim, 1-based a, v)."""
        host, pattern = self.host, self.pattern
        d = host.d
        if any(p > n for p, n in zip(pattern.dims, host.dims)):
            return None
        pins = pins or {}
        lo_bound = []
        hi_bound = []
        for j in range(d):
            p, n = pattern.dims[j], host.dims[j]
            lo = [a for a in range(1, p + 1)]
            hi = [n - p + a for a in range(1, p + 1)]
            if j in pins:
                a0, v0 = pins[j]
                for a in range(1, p + 1):
                    if a < a0:
                        hi[a - 1] = min(hi[a - 1], v0 - (a0 - a))
                    elif a > a0:
                        lo[a - 1] = max(lo[a - 1], v0 + (a - a0))
                    else:
                        lo[a - 1] = max(lo[a - 1], v0)
                        hi[a - 1] = min(hi[a - 1], v0)
            if any(l > h for l, h in zip(lo, hi)):
                return None
            lo_bound.append(lo)
            hi_bound.append(hi)

        maps = [[0] * p for p in pattern.dims]
        prefixes = self.prefixes
        by_level = self.by_level

        def ok(j, a):
            pre = prefixes[j]
            for c in by_level[j][a]:
                key = tuple(maps[t][c[t] - 1] for t in range(j + 1))
                if key not in pre:
                    return False
            return True

        def rec(j, a):
            if j == d:
                return True
            p = pattern.dims[j]
            if a == p:
                return rec(j + 1, 0)
            start = lo_bound[j][a]
            if a:
                start = max(start, maps[j][a - 1] + 1)
            for v in range(start, hi_bound[j][a] + 1):
                maps[j][a] = v
                if ok(j, a) and rec(j, a + 1):
                    return True
            return False

        if rec(0, 0):
            return Embedding(tuple(tuple(m) for m in maps))
        return None


def contains(host: Tensor01, pattern: Tensor01) -> Embedding | None:
    """Least embedding of ``pattern`` into ``host`` in flattened order, or None."""
    return _Matcher(host, pattern).search()


def avoids(host: Tensor01, pattern: Tensor01) -> bool:
    return contains(host, pattern) is None


def embedding_using(host: Tensor01, pattern: Tensor01, cell: Sequence[int]) -> Embedding | None:
    """An embedding that sends some 1-entry of the pattern onto ``cell``."""
    cell = tuple(cell)
    if host.d != pattern.d:
        raise TensorError(f"dimensionality mismatch: host d={host.d}, pattern d={pattern.d}")
    if not host.get(cell):
        raise TensorError(f"cell {cell} is a 0-entry of the host")
    matcher = _Matcher(host, pattern)
    for o in pattern.ones():
        emb = matcher.search({j: (o[j], cell[j]) for j in range(host.d)})
        if emb is not None:
            return emb
    return None


def contains_using(host: Tensor01, pattern: Tensor01, cell: Sequence[int]) -> bool:
    """True iff some copy of ``pattern`` in ``host`` maps a 1-entry onto ``cell``.

    This is the "new copy" test: after flipping ``cell`` from 0 to 1, the copies
    that did not exist before are exactly those that use the flipped cell.
    """
    return embedding_using(host, pattern, cell) is not None


def check_family(host_d: int, patterns: Iterable[Tensor01]) -> list[Tensor01]:
    pats = list(patterns)
    ds = {p.d for p in pats}
    if len(ds) > 1:
        raise TensorError(f"family mixes dimensionalities {sorted(ds)}")
    if pats and pats[0].d != host_d:
        raise TensorError(f"dimensionality mismatch: host d={host_d}, family d={pats[0].d}")
    return pats


def contains_any(host: Tensor01, fam) -> tuple[int, Embedding] | None:
    """First family member (by order) contained in ``host``."""
    for idx, p in enumerate(check_family(host.d, _patterns_of(fam))):
        emb = contains(host, p)
        if emb is not None:
            return idx, emb
    return None


def new_copy_any(host: Tensor01, fam, cell: Sequence[int]) -> int | None:
    """Index of the first member with a copy through ``cell``, or None."""
    for idx, p in enumerate(check_family(host.d, _patterns_of(fam))):
        if contains_using(host, p, cell):
            return idx
    return None
