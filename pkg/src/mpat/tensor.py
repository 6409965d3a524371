"""d-dimensional 0-1 matrices and the geometry around them.

Entries are stored densely in a Python ``int`` used as a bitset.  The bit for
coordinate ``(x_1, ..., x_d)`` sits at the row-major linear index with
dimension 1 varying slowest, so walking the set bits in ascending order visits
the 1-entries in lexicographic coordinate order.  All coordinates in the
public API are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Iterable, Iterator, Sequence

MAX_DIMENSIONS = 8
MAX_CELLS = 2**32

LOW = "low"
HIGH = "high"

Coord = tuple[int, ...]


class TensorError(ValueError):
    """Invalid tensor construction or out-of-range access."""


def _strides(dims: Sequence[int]) -> tuple[int, ...]:
    out = [1] * len(dims)
    for i in range(len(dims) - 2, -1, -1):
        out[i] = out[i + 1] * dims[i + 1]
    return tuple(out)


class Tensor01:
    """Immutable d-dimensional 0-1 matrix.

    Build one with :func:`make_tensor` or the classmethods; ``Tensor01(dims,
    bits)`` takes the raw bitset and performs no coordinate validation beyond
    the bit range.
    """

    __slots__ = ("dims", "bits", "weight", "_strides", "_ones", "_hash")

    def __init__(self, dims: Sequence[int], bits: int = 0):
        dims = tuple(int(n) for n in dims)
        if not dims:
            raise TensorError("dims must be non-empty")
        if len(dims) > MAX_DIMENSIONS:
            raise TensorError(f"at most {MAX_DIMENSIONS} dimensions are supported")
        if any(n < 1 for n in dims):
            raise TensorError(f"side lengths must be positive, got {dims}")
        size = prod(dims)
        if size > MAX_CELLS:
            raise TensorError(f"{size} cells exceeds the limit of {MAX_CELLS}")
        if bits < 0 or bits >> size:
            raise TensorError("bitset has bits outside the tensor")
        self.dims = dims
        self.bits = bits
        self.weight = bits.bit_count()
        self._strides = _strides(dims)
        self._ones: tuple[Coord, ...] | None = None
        self._hash: int | None = None

    # construction helpers

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Tensor01":
        return cls(dims, 0)

    @classmethod
    def full(cls, dims: Sequence[int]) -> "Tensor01":
        return cls(dims, (1 << prod(dims)) - 1)

    @classmethod
    def from_nested(cls, rows) -> "Tensor01":
        """Build from nested lists (or a numpy array) of 0/1 values."""
        dims: list[int] = []
        probe = rows
        while isinstance(probe, (list, tuple)) or hasattr(probe, "shape"):
            if hasattr(probe, "shape"):
                dims.extend(int(s) for s in probe.shape)
                break
            dims.append(len(probe))
            probe = probe[0]
        flat: list[int] = []

        def walk(node, depth):
            if depth == len(dims):
                flat.append(int(node))
                return
            if len(node) != dims[depth]:
                raise TensorError("ragged nested input")
            for child in node:
                walk(child, depth + 1)

        walk(rows, 0)
        bits = 0
        for idx, v in enumerate(flat):
            if v not in (0, 1):
                raise TensorError(f"entries must be 0 or 1, got {v}")
            if v:
                bits |= 1 << idx
        return cls(dims, bits)

    # basic properties

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return prod(self.dims)

    def index(self, coord: Sequence[int]) -> int:
        if len(coord) != len(self.dims):
            raise TensorError(f"coordinate {tuple(coord)} has wrong length for d={self.d}")
        idx = 0
        for x, n, s in zip(coord, self.dims, self._strides):
            if not 1 <= x <= n:
                raise TensorError(f"coordinate {tuple(coord)} out of range for dims {self.dims}")
            idx += (x - 1) * s
        return idx

    def coord(self, index: int) -> Coord:
        out = []
        for s in self._strides:
            q, index = divmod(index, s)
            out.append(q + 1)
        return tuple(out)

    def get(self, coord: Sequence[int]) -> int:
        return (self.bits >> self.index(coord)) & 1

    def __getitem__(self, coord: Sequence[int]) -> int:
        return self.get(coord)

    def set(self, coord: Sequence[int], value: int = 1) -> "Tensor01":
        bit = 1 << self.index(coord)
        if value:
            return Tensor01(self.dims, self.bits | bit)
        return Tensor01(self.dims, self.bits & ~bit)

    def ones(self) -> tuple[Coord, ...]:
        """1-entries in lexicographic order."""
        if self._ones is None:
            out = []
            b = self.bits
            while b:
                low = b & -b
                out.append(self.coord(low.bit_length() - 1))
                b ^= low
            self._ones = tuple(out)
        return self._ones

    def cells(self) -> Iterator[Coord]:
        return product(*(range(1, n + 1) for n in self.dims))

    def to_nested(self):
        def build(prefix):
            depth = len(prefix)
            if depth == self.d:
                return self.get(prefix)
            return [build(prefix + (x,)) for x in range(1, self.dims[depth] + 1)]

        return build(())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor01):
            return NotImplemented
        return self.dims == other.dims and self.bits == other.bits

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dims, self.bits))
        return self._hash

    def __repr__(self) -> str:
        dims = "x".join(map(str, self.dims))
        return f"Tensor01({dims}, ones={list(self.ones())})"

    def render(self) -> str:
        """Text picture; for d >= 3 the 1-layers are listed in order."""
        if self.d == 1:
            return " ".join(str(v) for v in self.to_nested())
        if self.d == 2:
            return "\n".join(" ".join(map(str, row)) for row in self.to_nested())
        blocks = []
        for x in range(1, self.dims[0] + 1):
            layer = section_tensor(self, SectionSpec({1: x}))
            blocks.append(f"[x1={x}]\n" + layer.render())
        return "\n".join(blocks)


def make_tensor(dims: Sequence[int], ones: Iterable[Sequence[int]]) -> Tensor01:
    """Tensor with 1-entries exactly at ``ones``; duplicates are rejected."""
    t = Tensor01(dims)
    bits = 0
    for c in ones:
        bit = 1 << t.index(tuple(c))
        if bits & bit:
            raise TensorError(f"duplicate coordinate {tuple(c)}")
        bits |= bit
    return Tensor01(t.dims, bits)


def _check_dim(t: Tensor01, i: int) -> None:
    if not 1 <= i <= t.d:
        raise TensorError(f"dimension index {i} out of range for d={t.d}")


def _map_ones(t: Tensor01, dims: Sequence[int], fn) -> Tensor01:
    out = Tensor01(dims)
    bits = 0
    for c in t.ones():
        bits |= 1 << out.index(fn(c))
    return Tensor01(dims, bits)


def exchange_dims(t: Tensor01, i: int, j: int) -> Tensor01:
    _check_dim(t, i)
    _check_dim(t, j)
    if i == j:
        raise TensorError("exchange needs two distinct dimensions")
    a, b = i - 1, j - 1
    dims = list(t.dims)
    dims[a], dims[b] = dims[b], dims[a]

    def swap(c):
        c = list(c)
        c[a], c[b] = c[b], c[a]
        return tuple(c)

    return _map_ones(t, dims, swap)


def reflect_dim(t: Tensor01, i: int) -> Tensor01:
    _check_dim(t, i)
    a, n = i - 1, t.dims[i - 1]
    return _map_ones(t, t.dims, lambda c: c[:a] + (n + 1 - c[a],) + c[a + 1 :])


def permute_dims(t: Tensor01, order: Sequence[int]) -> Tensor01:
    """Reorder dimensions: new dimension k is old dimension ``order[k]`` (1-based)."""
    if sorted(order) != list(range(1, t.d + 1)):
        raise TensorError(f"{order} is not a permutation of 1..{t.d}")
    idx = [o - 1 for o in order]
    return _map_ones(t, [t.dims[a] for a in idx], lambda c: tuple(c[a] for a in idx))


def symmetry_images(t: Tensor01) -> list[Tensor01]:
    """Distinct images under every composition of exchanges and reflections."""
    from itertools import permutations

    seen: dict[Tensor01, None] = {}
    for order in permutations(range(1, t.d + 1)):
        base = permute_dims(t, order)
        for flips in product((False, True), repeat=t.d):
            img = base
            for k, f in enumerate(flips):
                if f:
                    img = reflect_dim(img, k + 1)
            seen.setdefault(img)
    return list(seen)


def project(t: Tensor01, i: int) -> Tensor01:
    """Collapse dimension ``i``: an entry is 1 iff some entry above it is 1."""
    if t.d < 2:
        raise TensorError("projection needs d >= 2")
    _check_dim(t, i)
    a = i - 1
    dims = t.dims[:a] + t.dims[a + 1 :]
    out = Tensor01(dims)
    bits = 0
    for c in t.ones():
        bits |= 1 << out.index(c[:a] + c[a + 1 :])
    return Tensor01(dims, bits)


def project_pair(t: Tensor01, i: int, j: int) -> Tensor01:
    """2-dimensional projection on dimensions ``i`` (rows) and ``j`` (columns)."""
    _check_dim(t, i)
    _check_dim(t, j)
    if i == j:
        raise TensorError("project_pair needs two distinct dimensions")
    dims = (t.dims[i - 1], t.dims[j - 1])
    out = Tensor01(dims)
    bits = 0
    for c in t.ones():
        bits |= 1 << out.index((c[i - 1], c[j - 1]))
    return Tensor01(dims, bits)


# cross sections and faces


@dataclass(frozen=True)
class SectionSpec:
    """Cross section: ``fixed`` maps a dimension index to its fixed value."""

    fixed: dict[int, int]

    def __post_init__(self):
        object.__setattr__(self, "fixed", dict(sorted(self.fixed.items())))

    def __hash__(self):
        return hash(tuple(self.fixed.items()))

    @property
    def fixed_dims(self) -> frozenset[int]:
        return frozenset(self.fixed)

    def dimensionality(self, d: int) -> int:
        return d - len(self.fixed)

    def validate(self, dims: Sequence[int]) -> None:
        for i, v in self.fixed.items():
            if not 1 <= i <= len(dims):
                raise TensorError(f"section fixes dimension {i} outside 1..{len(dims)}")
            if not 1 <= v <= dims[i - 1]:
                raise TensorError(f"section value {v} out of range for dimension {i}")

    def contains(self, coord: Sequence[int]) -> bool:
        return all(coord[i - 1] == v for i, v in self.fixed.items())


@dataclass(frozen=True)
class FaceSpec:
    """Face described by side tags, independent of side lengths."""

    sides: dict[int, str]

    def __post_init__(self):
        for s in self.sides.values():
            if s not in (LOW, HIGH):
                raise TensorError(f"face side must be {LOW!r} or {HIGH!r}, got {s!r}")
        object.__setattr__(self, "sides", dict(sorted(self.sides.items())))

    def __hash__(self):
        return hash(tuple(self.sides.items()))

    @property
    def fixed_dims(self) -> frozenset[int]:
        return frozenset(self.sides)

    def dimensionality(self, d: int) -> int:
        return d - len(self.sides)


def instantiate_face(f: FaceSpec, dims: Sequence[int]) -> SectionSpec:
    for i in f.sides:
        if not 1 <= i <= len(dims):
            raise TensorError(f"face fixes dimension {i} but d={len(dims)}")
    return SectionSpec({i: 1 if s == LOW else dims[i - 1] for i, s in f.sides.items()})


def template_faces(d: int, dimensionality: int) -> list[FaceSpec]:
    """All faces of the given dimensionality of a 2x...x2 matrix.

    Ordered by sorted fixed-dimension set, then by side tags with low before high.
    """
    from itertools import combinations

    out = []
    for fixed in combinations(range(1, d + 1), d - dimensionality):
        for tags in product((LOW, HIGH), repeat=len(fixed)):
            out.append(FaceSpec(dict(zip(fixed, tags))))
    return out


def section_ones(t: Tensor01, s: SectionSpec) -> list[Coord]:
    s.validate(t.dims)
    return [c for c in t.ones() if s.contains(c)]


def section_tensor(t: Tensor01, s: SectionSpec) -> Tensor01:
    """The section as a tensor over its free dimensions (order preserved)."""
    s.validate(t.dims)
    free = [i for i in range(1, t.d + 1) if i not in s.fixed]
    if not free:
        return Tensor01((1,), t.get(tuple(s.fixed[i] for i in range(1, t.d + 1))))
    dims = [t.dims[i - 1] for i in free]
    return make_tensor(dims, [tuple(c[i - 1] for i in free) for c in section_ones(t, s)])


def is_k_orthogonal(g, f, k: int = 1) -> bool:
    """Whether cross section ``g`` is k-orthogonal to ``f``.

    Accepts SectionSpec, FaceSpec or a plain set of fixed dimensions.
    """
    if k < 1:
        raise TensorError("k must be at least 1")
    cg = g if isinstance(g, (set, frozenset)) else g.fixed_dims
    cf = f if isinstance(f, (set, frozenset)) else f.fixed_dims
    return not cg <= cf and not cf <= cg and len(cg - cf) >= k


def alone_in_section(t: Tensor01, o: Sequence[int], fixed_dims: Iterable[int]) -> bool:
    """True if no other 1-entry agrees with ``o`` on every dimension in ``fixed_dims``."""
    idx = [i - 1 for i in fixed_dims]
    o = tuple(o)
    for c in t.ones():
        if c != o and all(c[a] == o[a] for a in idx):
            return False
    return True


def layer_runs(t: Tensor01, i: int) -> list[tuple[int, int]]:
    """Maximal runs ``(start, length)`` of consecutive empty i-layers."""
    _check_dim(t, i)
    used = {c[i - 1] for c in t.ones()}
    runs = []
    start = None
    for x in range(1, t.dims[i - 1] + 2):
        empty = x <= t.dims[i - 1] and x not in used
        if empty and start is None:
            start = x
        elif not empty and start is not None:
            runs.append((start, x - start))
            start = None
    return runs
