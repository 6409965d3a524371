"""Pattern operations with sharp finite-n consequences for the extremal function."""

from __future__ import annotations

from typing import Sequence

from .tensor import Tensor01, TensorError, make_tensor, reflect_dim


def _check_dim(p: Tensor01, i: int) -> None:
    if not 1 <= i <= p.d:
        raise TensorError(f"dimension index {i} out of range for d={p.d}")


def replicate_dim(p: Tensor01, i: int) -> Tensor01:
    """Append a copy of dimension ``i``: each 1 at x moves to (x, x_i)."""
    _check_dim(p, i)
    dims = p.dims + (p.dims[i - 1],)
    return make_tensor(dims, [c + (c[i - 1],) for c in p.ones()])


def lower_entry(p: Tensor01, i: int, c: Sequence[int]) -> Tensor01:
    """Move the bottom 1-entry ``c`` one step past the end of dimension ``i``."""
    _check_dim(p, i)
    c = tuple(c)
    if not p.get(c):
        raise TensorError(f"{c} is not a 1-entry")
    a = i - 1
    if c[a] != p.dims[a]:
        raise TensorError(f"{c} is not a bottom entry along dimension {i}")
    dims = p.dims[:a] + (p.dims[a] + 1,) + p.dims[a + 1 :]
    ones = [x for x in p.ones() if x != c]
    ones.append(c[:a] + (c[a] + 1,) + c[a + 1 :])
    return make_tensor(dims, ones)


def lift_entry(p: Tensor01, i: int, c: Sequence[int]) -> Tensor01:
    """Mirror image of :func:`lower_entry` for a top entry (``c_i == 1``).

    The new layer is prepended, so every other entry shifts by one along ``i``.
    """
    _check_dim(p, i)
    c = tuple(c)
    if c[i - 1] != 1:
        raise TensorError(f"{c} is not a top entry along dimension {i}")
    a = i - 1
    flipped = c[:a] + (p.dims[a],) + c[a + 1 :]
    return reflect_dim(lower_entry(reflect_dim(p, i), i, flipped), i)


def insert_empty_layer(p: Tensor01, i: int, pos: int) -> Tensor01:
    """Insert an all-zero i-layer so that it becomes layer ``pos + 1``.

    ``pos == 0`` or ``pos == l_i`` attaches the layer at an end.
    """
    _check_dim(p, i)
    a = i - 1
    if not 0 <= pos <= p.dims[a]:
        raise TensorError(f"insertion index {pos} outside 0..{p.dims[a]}")
    dims = p.dims[:a] + (p.dims[a] + 1,) + p.dims[a + 1 :]
    ones = [x if x[a] <= pos else x[:a] + (x[a] + 1,) + x[a + 1 :] for x in p.ones()]
    return make_tensor(dims, ones)


def insert_one_layers(
    p: Tensor01, i: int, pos: int, row_coords: Sequence[int], t: int = 1
) -> Tensor01:
    """Insert ``t`` i-layers after layer ``pos``, each with one 1 at ``row_coords``.

    ``row_coords`` gives the coordinates on the other d-1 dimensions, i.e. the
    i-row shared by all new 1-entries.
    """
    _check_dim(p, i)
    a = i - 1
    if t < 1:
        raise TensorError("t must be at least 1")
    if not 1 <= pos <= p.dims[a] - 1:
        raise TensorError(f"insertion index {pos} outside 1..{p.dims[a] - 1}")
    row_coords = tuple(row_coords)
    if len(row_coords) != p.d - 1:
        raise TensorError(f"row coordinates need {p.d - 1} values")
    others = p.dims[:a] + p.dims[a + 1 :]
    if any(not 1 <= x <= n for x, n in zip(row_coords, others)):
        raise TensorError(f"row coordinates {row_coords} out of range")
    dims = p.dims[:a] + (p.dims[a] + t,) + p.dims[a + 1 :]
    ones = [x if x[a] <= pos else x[:a] + (x[a] + t,) + x[a + 1 :] for x in p.ones()]
    for s in range(1, t + 1):
        ones.append(row_coords[:a] + (pos + s,) + row_coords[a:])
    return make_tensor(dims, ones)


def add_adjacent_one(p: Tensor01, i: int, c: Sequence[int], at_end: bool = True) -> Tensor01:
    """Attach an i-layer holding a single 1 next to the 1-entry ``c``.

    ``c`` must sit in the last (``at_end``) or first i-layer so the new 1 is
    adjacent to it along dimension ``i``.
    """
    _check_dim(p, i)
    c = tuple(c)
    a = i - 1
    if not p.get(c):
        raise TensorError(f"{c} is not a 1-entry")
    if at_end:
        if c[a] != p.dims[a]:
            raise TensorError(f"{c} is not in the last layer along dimension {i}")
        q = insert_empty_layer(p, i, p.dims[a])
        return q.set(c[:a] + (c[a] + 1,) + c[a + 1 :])
    if c[a] != 1:
        raise TensorError(f"{c} is not in the first layer along dimension {i}")
    q = insert_empty_layer(p, i, 0)
    return q.set(c)


def longest_empty_run(p: Tensor01, i: int) -> int:
    """Length of the longest run of consecutive empty i-layers."""
    from .tensor import layer_runs

    runs = layer_runs(p, i)
    return max((length for _, length in runs), default=0)
