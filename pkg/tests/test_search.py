import random

import pytest

from mpat.constructions import corner_block, family_bdr, family_pkr, single_one_saturated, ssat_witness
from mpat.search import (
    ex_exact,
    is_saturated,
    is_semisaturated,
    sat_exact,
    saturate_greedy,
    ssat_exact,
)
from mpat.tensor import Tensor01, TensorError, make_tensor

from oracle import brute_ex, brute_sat, brute_ssat
from strategies import plain

I2 = make_tensor([2, 2], [(1, 1), (2, 2)])
J22 = Tensor01.full((2, 2))


def random_family(rng, d, max_side=2, size=None):
    size = size or rng.randint(1, 2)
    pats = []
    while len(pats) < size:
        dims = tuple(rng.randint(1, max_side) for _ in range(d))
        total = 1
        for n in dims:
            total *= n
        p = Tensor01(dims, rng.getrandbits(total))
        if p.weight and p not in pats:
            pats.append(p)
    return pats


def ones(outcome):
    return frozenset(outcome.witness.ones())


# examples


def test_ex_examples():
    assert ex_exact([I2], 4).value == 7
    assert ex_exact([J22], 3).value == 6 == brute_ex([plain(J22)], 3)[0]
    assert ex_exact(family_pkr(2, 2, 1), 4).value == 8


def test_sat_examples():
    assert sat_exact([I2], 4).value == 7
    assert sat_exact(family_pkr(2, 1, 1), 3).value == 3
    out = sat_exact(family_bdr(2, 2)[1], 5)
    assert out.value == 4 and out.ok


def test_ssat_examples():
    out = ssat_exact([Tensor01.full((1, 1))], 4)
    assert out.value == 0 and out.witness == Tensor01.zeros((4, 4))
    out = ssat_exact([I2], 3)
    assert out.value == brute_ssat([plain(I2)], 3)[0]
    out = ssat_exact([J22], 4)
    assert 0 < out.value <= 12
    assert is_semisaturated(out.witness, [J22])


def test_outcome_fields():
    out = ex_exact([I2], 3)
    assert out.function == "ex" and out.n == 3 and out.exact and out.status == "ok"
    assert out.witness.weight == out.value and out.nodes >= 0 and out.elapsed >= 0


# oracle agreement


@pytest.mark.parametrize("seed", range(12))
def test_random_2d_against_brute_force(seed):
    rng = random.Random(seed)
    fam = random_family(rng, 2, max_side=3)
    plain_fam = [plain(p) for p in fam]
    for func, brute in ((ex_exact, brute_ex), (sat_exact, brute_sat), (ssat_exact, brute_ssat)):
        value, witness = brute(plain_fam, 3)
        out = func(fam, 3)
        assert out.value == value, (func.__name__, fam)
        if witness is not None:
            assert ones(out) == witness, (func.__name__, fam)


@pytest.mark.parametrize("seed", range(6))
def test_random_3d_against_brute_force(seed):
    rng = random.Random(100 + seed)
    fam = random_family(rng, 3, max_side=2)
    plain_fam = [plain(p) for p in fam]
    for func, brute in ((ex_exact, brute_ex), (sat_exact, brute_sat), (ssat_exact, brute_ssat)):
        value, witness = brute(plain_fam, 2)
        out = func(fam, 2)
        assert out.value == value, (func.__name__, fam)
        if witness is not None:
            assert ones(out) == witness, (func.__name__, fam)


@pytest.mark.slow
@pytest.mark.parametrize("fam", [[I2], [J22], [Tensor01.full((1, 3))], [make_tensor([2, 2], [(1, 2), (2, 1)]), Tensor01.full((1, 2))]],
                         ids=["I2", "J22", "row3", "antiI2+row2"])
def test_n4_against_brute_force(fam):
    plain_fam = [plain(p) for p in fam]
    for func, brute in ((ex_exact, brute_ex), (sat_exact, brute_sat)):
        value, witness = brute(plain_fam, 4)
        out = func(fam, 4)
        assert out.value == value and ones(out) == witness


def test_no_avoider_and_no_saturated_matrix():
    fam = [Tensor01.zeros((1, 1)), I2]
    out = ex_exact(fam, 3)
    assert out.value == 0 and out.status == "no-avoider"
    out = sat_exact(fam, 3)
    assert out.value is None and out.status == "none-exists"
    # an all-zero member never makes a new copy, so ssat ignores it
    assert ssat_exact(fam, 3).value == ssat_exact([I2], 3).value


# guards and determinism


def test_guard_reports_inexact():
    out = ex_exact([I2], 6)
    assert out.status == "guard" and not out.exact and out.value is None and not out.ok
    out = sat_exact([I2], 6, max_cells=40, max_placements=10)
    assert out.status == "guard"


def test_forced_zero_reduction_lifts_guard():
    # unit patterns zero out all but one line, so 27 cells shrink to 3
    out = ex_exact(family_pkr(3, 1, 0), 3)
    assert out.ok and out.value == 1 and out.stats["free_cells"] == 3


def test_node_limit():
    out = ex_exact([J22], 5, max_nodes=5)
    assert out.status == "node-limit" and not out.exact


@pytest.mark.parametrize("func", [ex_exact, sat_exact, ssat_exact])
def test_workers_do_not_change_results(func):
    fam = [J22, Tensor01.full((1, 3))]
    a = func(fam, 4, workers=1)
    b = func(fam, 4, workers=2)
    assert (a.value, a.witness, a.nodes) == (b.value, b.witness, b.nodes)
    c = func(fam, 4, workers=1)
    assert (a.value, a.witness, a.nodes) == (c.value, c.witness, c.nodes)


def test_bad_n():
    with pytest.raises(TensorError):
        ex_exact([I2], 0)


# predicates


def test_is_saturated_examples():
    assert is_saturated(single_one_saturated(make_tensor([1, 2], [(1, 1)]), 3), [make_tensor([1, 2], [(1, 1)])])
    assert not is_saturated(Tensor01.zeros((3, 3)), [J22])
    assert is_saturated(corner_block(5, 2, 2), family_bdr(2, 2)[1])
    assert not is_saturated(Tensor01.full((2, 2)), [I2])  # contains I2


def test_is_semisaturated_examples():
    assert is_semisaturated(ssat_witness([J22], 1, 6), [J22])
    assert is_semisaturated(Tensor01.zeros((3, 3)), [Tensor01.full((1, 1))])
    assert not is_semisaturated(Tensor01.zeros((3, 3)), [J22])
    # semisaturation does not require avoidance
    assert is_semisaturated(Tensor01.full((3, 3)), [I2])


def test_saturate_greedy():
    m = saturate_greedy([I2], Tensor01.zeros((4, 4)))
    assert m.weight == 7 and is_saturated(m, [I2])
    assert saturate_greedy([I2], m) == m
    with pytest.raises(TensorError):
        saturate_greedy([I2], Tensor01.full((2, 2)))


@pytest.mark.parametrize("seed", range(8))
def test_greedy_sandwich(seed):
    rng = random.Random(200 + seed)
    fam = random_family(rng, 2, max_side=3)
    m = saturate_greedy(fam, Tensor01.zeros((3, 3)))
    assert is_saturated(m, fam)
    assert sat_exact(fam, 3).value <= m.weight <= ex_exact(fam, 3).value


# invariants on a small corpus


def corpus():
    rng = random.Random(5)
    return [random_family(rng, 2, max_side=3) for _ in range(10)]


def test_ex_monotone_in_n():
    for fam in corpus():
        vals = [ex_exact(fam, n).value for n in (2, 3, 4)]
        assert vals == sorted(vals)


def test_sat_below_ex_and_ex_witness_saturated():
    for fam in corpus():
        ex = ex_exact(fam, 3)
        sat = sat_exact(fam, 3)
        if ex.status == "no-avoider":
            continue
        assert is_saturated(ex.witness, fam)
        assert sat.value <= ex.value
        assert is_saturated(sat.witness, fam)


def test_ssat_smaller_for_larger_family():
    fams = corpus()
    for a, b in zip(fams, fams[1:]):
        union = list(dict.fromkeys(a + b))
        assert ssat_exact(union, 3).value <= ssat_exact(a, 3).value


def test_either_or_small():
    # |fam| = k < d: ex = 0 or ex >= n^(d-k)
    rng = random.Random(9)
    for _ in range(8):
        fam = random_family(rng, 3, max_side=2, size=rng.randint(1, 2))
        for n in (2, 3):
            v = ex_exact(fam, n).value
            if v is None:
                continue
            assert v == 0 or v >= n ** (3 - len(fam))
