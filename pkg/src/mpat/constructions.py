"""Deterministic generators for the explicit matrices and families."""

from __future__ import annotations

import logging
import warnings
from itertools import combinations, product
from math import ceil, comb, prod
from typing import Iterator, Sequence

from .tensor import (
    LOW,
    FaceSpec,
    Tensor01,
    TensorError,
    alone_in_section,
    instantiate_face,
    layer_runs,
    make_tensor,
    template_faces,
)

log = logging.getLogger(__name__)

J_FAMILY_GUARD = 5_000_000


class Family:
    """Ordered, duplicate-free list of patterns sharing one dimensionality."""

    __slots__ = ("d", "patterns")

    def __init__(self, patterns: Sequence[Tensor01]):
        patterns = tuple(patterns)
        if not patterns:
            raise TensorError("a family needs at least one pattern")
        ds = {p.d for p in patterns}
        if len(ds) != 1:
            raise TensorError(f"family mixes dimensionalities {sorted(ds)}")
        if len(set(patterns)) != len(patterns):
            raise TensorError("family contains duplicate patterns")
        self.d = patterns[0].d
        self.patterns = patterns

    @classmethod
    def dedup(cls, patterns: Sequence[Tensor01]) -> "Family":
        return cls(list(dict.fromkeys(patterns)))

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)

    def __getitem__(self, i):
        return self.patterns[i]

    def __eq__(self, other):
        return isinstance(other, Family) and self.patterns == other.patterns

    def __hash__(self):
        return hash(self.patterns)

    def __repr__(self):
        return f"Family(d={self.d}, patterns={list(self.patterns)})"

    def max_sides(self) -> tuple[int, ...]:
        return tuple(max(p.dims[i] for p in self.patterns) for i in range(self.d))


def as_family(fam) -> Family:
    if isinstance(fam, Family):
        return fam
    if isinstance(fam, Tensor01):
        return Family([fam])
    return Family(list(fam))


def identity_equivalents(n0: int, d: int) -> Family:
    """The 2^(d-1) monotone diagonal permutation matrices of side ``n0``.

    Sign vectors are taken in product order with increasing before decreasing,
    so the identity comes first.
    """
    if n0 < 1 or d < 1:
        raise TensorError("n0 and d must be positive")
    pats = []
    for signs in product((1, -1), repeat=d - 1):
        ones = []
        for j in range(1, n0 + 1):
            ones.append((j,) + tuple(j if s > 0 else n0 + 1 - j for s in signs))
        pats.append(make_tensor((n0,) * d, ones))
    return Family.dedup(pats)


def identity(n0: int, d: int = 2) -> Tensor01:
    return identity_equivalents(n0, d)[0]


def j_family(n0: int, d: int, guard: int = J_FAMILY_GUARD) -> Iterator[Tensor01]:
    """n0^d matrices with n0 ones, every pair agreeing in some coordinate.

    Yielded in lexicographic order of the sorted 1-cell list.
    """
    if n0 < 1 or d < 1:
        raise TensorError("n0 and d must be positive")
    cells = list(product(range(1, n0 + 1), repeat=d))
    if comb(len(cells), n0) > guard:
        raise TensorError(f"J-family enumeration for n0={n0}, d={d} exceeds the guard")
    dims = (n0,) * d

    def related(a, b):
        return any(x == y for x, y in zip(a, b))

    chosen: list[tuple[int, ...]] = []

    def rec(start):
        if len(chosen) == n0:
            yield make_tensor(dims, chosen)
            return
        for k in range(start, len(cells) - (n0 - len(chosen)) + 1):
            c = cells[k]
            if all(related(c, o) for o in chosen):
                chosen.append(c)
                yield from rec(k + 1)
                chosen.pop()

    yield from rec(0)


def unit_pattern(i: int, d: int) -> Tensor01:
    """Length 2 along ``i``, length 1 elsewhere, single 1 at the far end."""
    dims = tuple(2 if a == i else 1 for a in range(1, d + 1))
    return make_tensor(dims, [tuple(2 if a == i else 1 for a in range(1, d + 1))])


def column_pattern(length: int, d: int) -> Tensor01:
    """All-ones pattern of the given length along dimension 1."""
    return Tensor01.full((length,) + (1,) * (d - 1))


def family_pkr(d: int, k: int, r: int) -> Family:
    """Family with extremal and saturation function k*n^r for large n.

    Members: the unit patterns along dimensions 2..d-r, then a column of k+1
    ones along dimension 1.
    """
    if d < 1 or k < 1:
        raise TensorError("d and k must be positive")
    if not 0 <= r <= d - 1:
        raise TensorError(f"r must lie in [0, {d - 1}]")
    pats = [unit_pattern(i, d) for i in range(2, d - r + 1)]
    pats.append(column_pattern(k + 1, d))
    return Family(pats)


def corner_block(n: int, d: int, r: int) -> Tensor01:
    """n^d matrix whose 1-entries are exactly the cells with all coordinates <= r."""
    return make_tensor((n,) * d, product(range(1, r + 1), repeat=d))


def family_bdr(d: int, r: int, guard: int = 100_000) -> tuple[Tensor01, Family]:
    """The block B (r x ... x r ones inside (r+1)^d) and its one-flip family."""
    if d < 2 or r < 1:
        raise TensorError("need d >= 2 and r >= 1")
    if (r + 1) ** d > guard:
        raise TensorError("family_bdr size exceeds the guard")
    b = corner_block(r + 1, d, r)
    fam = [b.set(c) for c in b.cells() if not b.get(c)]
    return b, Family(fam)


def single_one_saturated(p: Tensor01, n: int) -> Tensor01:
    """The unique p-saturated n^d matrix when ``p`` has exactly one 1-entry."""
    if p.weight != 1:
        raise TensorError(f"pattern must have exactly one 1-entry, has {p.weight}")
    if n < max(p.dims):
        raise TensorError(f"n={n} is smaller than the largest side {max(p.dims)}")
    if all(k == 1 for k in p.dims):
        warnings.warn(
            "1x...x1 single-one pattern: every cell is forbidden, result is all-zero",
            stacklevel=2,
        )
    (q,) = p.ones()
    ks = p.dims
    ones = [
        y
        for y in product(range(1, n + 1), repeat=p.d)
        if any(not qi <= yi <= n - ki + qi for yi, qi, ki in zip(y, q, ks))
    ]
    return make_tensor((n,) * p.d, ones)


def single_one_saturated_weight(dims: Sequence[int], n: int) -> int:
    return n ** len(dims) - prod(n + 1 - k for k in dims)


def witness_min_n(fam) -> int:
    """Smallest n for which :func:`ssat_witness` is defined."""
    fam = as_family(fam)
    return max(2 * l - 1 for l in fam.max_sides())


def ssat_witness(fam, k: int, n: int) -> Tensor01:
    """Semisaturated matrix with O(n^k) ones for a family of exponent <= k.

    A cell is 1 iff at least d-k of its coordinates fall outside the band
    [l_i, n+1-l_i], where l_i is the largest side of the family along i.
    """
    fam = as_family(fam)
    d = fam.d
    if not 0 <= k <= d - 1:
        raise TensorError(f"k must lie in [0, {d - 1}]")
    sides = fam.max_sides()
    if n < witness_min_n(fam):
        raise TensorError(f"n={n} too small: every band [l_i, n+1-l_i] must be non-empty")
    ones = [
        x
        for x in product(range(1, n + 1), repeat=d)
        if sum(not l <= xi <= n + 1 - l for xi, l in zip(x, sides)) >= d - k
    ]
    return make_tensor((n,) * d, ones)


def line_witness(n: int, d: int, i: int, v: int) -> Tensor01:
    """All cells with x_i = v."""
    if not 1 <= i <= d:
        raise TensorError(f"dimension index {i} out of range for d={d}")
    if not 1 <= v <= n:
        raise TensorError(f"value {v} outside 1..{n}")
    return make_tensor((n,) * d, [x for x in product(range(1, n + 1), repeat=d) if x[i - 1] == v])


def inflate_empty_layers(m: Tensor01, target_n: int) -> Tensor01:
    """Widen the first maximal empty run in each dimension up to side ``target_n``."""
    ones = list(m.ones())
    dims = list(m.dims)
    for a in range(m.d):
        extra = target_n - dims[a]
        if extra < 0:
            raise TensorError(f"target side {target_n} below current side {dims[a]}")
        if extra == 0:
            continue
        runs = layer_runs(make_tensor(dims, ones), a + 1)
        if not runs:
            raise TensorError(f"dimension {a + 1} has no empty layer to widen")
        start, _ = runs[0]
        ones = [x if x[a] < start else x[:a] + (x[a] + extra,) + x[a + 1 :] for x in ones]
        dims[a] = target_n
    return make_tensor(dims, ones)


# semisaturation exponent construction


def _interior(c, face_dims, dims) -> bool:
    return all(1 < c[a] < dims[a] for a in range(len(dims)) if a + 1 not in face_dims)


def has_property_iii(p: Tensor01, f: FaceSpec) -> bool:
    """Face has an interior 1 alone in each of its layers along the free dimensions."""
    sec = instantiate_face(f, p.dims)
    free = [i for i in range(1, p.d + 1) if i not in f.sides]
    for o in p.ones():
        if not sec.contains(o) or not _interior(o, f.fixed_dims, p.dims):
            continue
        if all(alone_in_section(p, o, [j]) for j in free):
            return True
    return False


def _has_lonely_entry(p: Tensor01) -> bool:
    return any(all(alone_in_section(p, o, [j]) for j in range(1, p.d + 1)) for o in p.ones())


def _grow_through_face(p: Tensor01, f: FaceSpec) -> Tensor01:
    dims = p.dims
    free = [a for a in range(p.d) if a + 1 not in f.sides]
    mid = [ceil(n / 2) for n in dims]
    new_dims = tuple(n + (1 if a in free else 0) for a, n in enumerate(dims))
    ones = []
    for c in p.ones():
        ones.append(tuple(x + (1 if a in free and x >= mid[a] else 0) for a, x in enumerate(c)))
    b = instantiate_face(f, dims)
    ones.append(tuple(b.fixed[a + 1] if a + 1 in b.fixed else mid[a] for a in range(p.d)))
    return make_tensor(new_dims, ones)


def _grow_center(p: Tensor01) -> Tensor01:
    mid = [ceil(n / 2) for n in p.dims]
    ones = [tuple(x + (1 if x >= m else 0) for x, m in zip(c, mid)) for c in p.ones()]
    ones.append(tuple(mid))
    return make_tensor(tuple(n + 1 for n in p.dims), ones)


def ssat_exponent_pattern(d: int, k: int, trace: list | None = None) -> Tensor01:
    """Single pattern whose semisaturation function grows like n^k.

    Starts from an empty 4^d matrix.  For each face dimensionality k+1..d-1
    (faces in :func:`template_faces` order) a face lacking an interior lonely
    1-entry gets one, by growing every free side by one at its middle.  The
    scan repeats until no face of that dimensionality needs an insertion.  If
    no 1-entry is then alone in all of its layers, a center 1 is added the
    same way.  Insertions are appended to ``trace`` when given.
    """
    if d < 2:
        raise TensorError("need d >= 2")
    if not 0 <= k <= d - 1:
        raise TensorError(f"k must lie in [0, {d - 1}]")
    p = Tensor01.zeros((4,) * d)
    for dp in range(k + 1, d):
        faces = template_faces(d, dp)
        while True:
            todo = next((f for f in faces if not has_property_iii(p, f)), None)
            if todo is None:
                break
            p = _grow_through_face(p, todo)
            if trace is not None:
                trace.append(("face", dp, dict(todo.sides), p.dims))
    if not _has_lonely_entry(p):
        p = _grow_center(p)
        if trace is not None:
            trace.append(("center", None, None, p.dims))
    log.debug("ssat_exponent_pattern(%d, %d) -> dims %s weight %d", d, k, p.dims, p.weight)
    return p


__all__ = [
    "Family",
    "LOW",
    "as_family",
    "column_pattern",
    "corner_block",
    "family_bdr",
    "family_pkr",
    "has_property_iii",
    "identity",
    "identity_equivalents",
    "inflate_empty_layers",
    "j_family",
    "line_witness",
    "single_one_saturated",
    "single_one_saturated_weight",
    "ssat_exponent_pattern",
    "ssat_witness",
    "unit_pattern",
    "witness_min_n",
]
