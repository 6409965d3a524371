import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpat.tensor import Tensor01, TensorError, exchange_dims, make_tensor
from mpat.transforms import (
    add_adjacent_one,
    insert_empty_layer,
    insert_one_layers,
    lift_entry,
    longest_empty_run,
    lower_entry,
    replicate_dim,
)

from strategies import tensors

DIAG1 = make_tensor([2, 2, 2], [(1, 1, 1), (1, 2, 1), (2, 1, 2), (2, 2, 2)])


def test_replicate_examples():
    r = replicate_dim(Tensor01.full((2, 2)), 2)
    assert r.ones() == ((1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 2, 2))
    assert exchange_dims(r, 1, 2) == DIAG1
    assert replicate_dim(Tensor01.full((1,)), 1) == Tensor01.full((1, 1))
    with pytest.raises(TensorError):
        replicate_dim(Tensor01.full((2, 2)), 3)


@given(tensors(max_d=3), st.data())
def test_replicate_preserves_weight(t, data):
    i = data.draw(st.integers(1, t.d))
    r = replicate_dim(t, i)
    assert r.weight == t.weight and r.d == t.d + 1 and r.dims[-1] == t.dims[i - 1]


def test_lower_middle_entry_of_column():
    p1 = Tensor01.full((1, 3, 1))
    p2 = lower_entry(p1, 1, (1, 2, 1))
    assert p2 == make_tensor([2, 3, 1], [(1, 1, 1), (1, 3, 1), (2, 2, 1)])


def test_add_one_after_lowering():
    p2 = make_tensor([2, 3, 1], [(1, 1, 1), (1, 3, 1), (2, 2, 1)])
    p3 = add_adjacent_one(p2, 3, (2, 2, 1), at_end=False)
    layers = Tensor01.from_nested([[[0, 1], [0, 0], [0, 1]], [[0, 0], [1, 1], [0, 0]]])
    assert p3 == layers


def test_lower_then_lift_from_block():
    r = Tensor01.full((1, 2, 2))
    p = lift_entry(lower_entry(r, 1, (1, 2, 2)), 1, (1, 1, 2))
    expected = Tensor01.from_nested([[[0, 1], [0, 0]], [[1, 0], [1, 0]], [[0, 0], [0, 1]]])
    assert p == expected


def test_lower_single_one():
    assert lower_entry(Tensor01.full((1, 1)), 1, (1, 1)) == make_tensor([2, 1], [(2, 1)])


def test_lower_lift_errors():
    p = Tensor01.full((2, 2))
    with pytest.raises(TensorError):
        lower_entry(p, 1, (1, 1))  # not a bottom entry
    with pytest.raises(TensorError):
        lower_entry(make_tensor([2, 2], [(1, 1)]), 1, (2, 2))  # a 0-entry
    with pytest.raises(TensorError):
        lift_entry(p, 1, (2, 1))  # not a top entry


def test_insert_empty_layer_examples():
    assert insert_empty_layer(Tensor01.full((1, 2)), 1, 1) == make_tensor([2, 2], [(1, 1), (1, 2)])
    col = Tensor01.full((3, 1))
    assert insert_empty_layer(col, 1, 1) == make_tensor([4, 1], [(1, 1), (3, 1), (4, 1)])
    assert insert_empty_layer(col, 1, 0) == make_tensor([4, 1], [(2, 1), (3, 1), (4, 1)])
    with pytest.raises(TensorError):
        insert_empty_layer(col, 1, 4)


@given(tensors(), st.data())
def test_insert_empty_layer_weight(t, data):
    i = data.draw(st.integers(1, t.d))
    pos = data.draw(st.integers(0, t.dims[i - 1]))
    u = insert_empty_layer(t, i, pos)
    assert u.weight == t.weight
    assert all(c[i - 1] != pos + 1 for c in u.ones())


def test_insert_one_layers_examples():
    col2 = Tensor01.full((2, 1))
    assert insert_one_layers(col2, 1, 1, (1,), 1) == Tensor01.full((3, 1))
    assert insert_one_layers(col2, 1, 1, (1,), 2) == Tensor01.full((4, 1))
    with pytest.raises(TensorError):
        insert_one_layers(col2, 1, 2, (1,), 1)
    with pytest.raises(TensorError):
        insert_one_layers(col2, 1, 1, (2,), 1)
    with pytest.raises(TensorError):
        insert_one_layers(col2, 1, 1, (1,), 0)


@given(tensors(min_d=2), st.data())
def test_insert_one_layers_weight(t, data):
    i = data.draw(st.integers(1, t.d))
    if t.dims[i - 1] < 2:
        return
    pos = data.draw(st.integers(1, t.dims[i - 1] - 1))
    others = [n for a, n in enumerate(t.dims) if a != i - 1]
    row = tuple(data.draw(st.integers(1, n)) for n in others)
    k = data.draw(st.integers(1, 3))
    assert insert_one_layers(t, i, pos, row, k).weight == t.weight + k


def test_add_adjacent_one_errors():
    p = make_tensor([2, 2], [(1, 1)])
    with pytest.raises(TensorError):
        add_adjacent_one(p, 1, (1, 1), at_end=True)
    with pytest.raises(TensorError):
        add_adjacent_one(p, 1, (2, 2), at_end=False)
    assert add_adjacent_one(p, 1, (1, 1), at_end=False) == make_tensor([3, 2], [(1, 1), (2, 1)])


def test_longest_empty_run():
    t = make_tensor([6, 1], [(1, 1), (4, 1)])
    assert longest_empty_run(t, 1) == 2
    assert longest_empty_run(t, 2) == 0
