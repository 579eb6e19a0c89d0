import numpy as np
import pytest
from hypothesis import given, strategies as st

from connsep.chessboard import (
    IntegerField,
    Labeling,
    enumeration_size,
    exhaustive_verify,
    lebesgue_witness,
    lipschitz_violation,
    random_lipschitz_field,
    random_verify,
    separating_level,
    steinhaus_witness,
)
from connsep.grid import GridSpec, UsageError, intersection_dim
from connsep.oracle import oracle_connects, oracle_separates
from connsep.topology import CellSet, connects


def test_steinhaus_examples():
    s = GridSpec(2, 2)
    w = steinhaus_witness(Labeling(s, [1, 1, 1, 1]))
    assert (w.axis, w.chain.cells) == (1, ((1, 1), (2, 1)))
    checker = Labeling(s, [1, 2, 2, 1])  # F(1,1)=F(2,2)=1
    assert checker[(1, 2)] == 2 and checker[(2, 2)] == 1
    w = steinhaus_witness(checker, generalized=True)
    assert (w.axis, w.chain.cells) == (1, ((1, 1), (2, 2)))
    w = steinhaus_witness(Labeling(GridSpec(1, 3), [1, 1, 1]))
    assert (w.axis, w.chain.cells) == (1, ((1,), (2,), (3,)))


def test_lebesgue_examples():
    s = GridSpec(2, 2)
    A1 = CellSet.from_cells(s, [(1, 1), (1, 2)])
    A2 = CellSet.from_cells(s, [(2, 1), (2, 2)])
    w = lebesgue_witness([A1, A2])
    assert (w.axis, w.chain.cells) == (2, ((2, 1), (2, 2)))
    w = lebesgue_witness([CellSet.full(s), CellSet.empty(s)])
    assert (w.axis, w.chain.cells) == (1, ((1, 1), (2, 1)))
    w = lebesgue_witness([CellSet.full(GridSpec(1, 1))])
    assert (w.axis, w.chain.cells) == (1, ((1,),))
    with pytest.raises(UsageError):
        lebesgue_witness([A1, CellSet.empty(s)])


def test_separating_level_examples():
    s = GridSpec(2, 3)
    G = IntegerField(s, [c[0] - 1 for c in s.cells()])
    r = separating_level(G, 1)
    # column 1 already touches x1 = 0, so the smallest separating level is 0
    assert (r.kind, r.level) == ("separating", 0)
    r.certificate.validate()
    assert oracle_separates(G.level_set(0), 1)
    assert oracle_separates(G.level_set(1), 1)
    assert not any(oracle_connects(G.level_set(p), 1) for p in range(3))
    r = separating_level(G, 2)
    assert (r.kind, r.level) == ("connecting", 0)
    assert r.chain.cells == ((1, 1), (1, 2), (1, 3))
    for axis in (1, 2):
        r = separating_level(IntegerField(s, [5] * 9), axis)
        assert (r.kind, r.level) == ("connecting", 5)


def test_integer_field_rejects_jumps():
    s = GridSpec(2, 2)
    with pytest.raises(UsageError):
        IntegerField(s, [0, 2, 0, 0])
    with pytest.raises(UsageError):
        IntegerField(s, [0, 0, 0, 2])  # diagonal neighbours touch at a vertex
    with pytest.raises(UsageError):
        Labeling(s, [0, 1, 1, 1])


@pytest.mark.parametrize(
    "n,k,mode,total", [(2, 2, "plain", 16), (3, 2, "generalized", 6561), (1, 1, "plain", 1)]
)
def test_exhaustive_examples(n, k, mode, total):
    r = exhaustive_verify(n, k, mode)
    assert r.total == total and r.failures == 0
    assert sum(r.histogram.values()) == total


def test_exhaustive_modes_small():
    assert exhaustive_verify(2, 2, "lebesgue").total == 3**4
    r = exhaustive_verify(2, 2, "level")
    assert r.candidates == 81 and r.failures == 0


def test_exhaustive_guard():
    assert enumeration_size(3, 3, "plain") == 3**27
    with pytest.raises(UsageError):
        exhaustive_verify(3, 3, "plain")


def test_parallel_matches_serial():
    a = exhaustive_verify(2, 3, "generalized")
    b = exhaustive_verify(2, 3, "generalized", jobs=2)
    assert a.to_dict() == b.to_dict()


def test_random_verify_is_replayable():
    a = random_verify(3, 3, "generalized", 50, seed=3)
    b = random_verify(3, 3, "generalized", 50, seed=3)
    assert a.to_dict() == b.to_dict() and a.failures == 0 and a.seed == 3


def labelings(n, k):
    return st.lists(st.integers(1, n), min_size=k**n, max_size=k**n).map(
        lambda v: Labeling(GridSpec(n, k), v)
    )


@given(labelings(3, 3))
def test_generalized_witness_is_a_plain_chain(F):
    w = steinhaus_witness(F, generalized=True)
    color = F.color_set(w.axis)
    w.chain.validate(F.spec, color)
    assert all(d >= w.axis - 1 for d in w.chain.link_dims)
    # relaxing the threshold keeps the chain valid
    assert all(intersection_dim(F.spec, a, b) >= 0 for a, b in zip(w.chain.cells, w.chain.cells[1:]))
    assert connects(color, w.axis, 0) is not None


@given(labelings(3, 3))
def test_lebesgue_agrees_with_generalized_steinhaus(F):
    sets = [F.color_set(i) for i in range(1, 4)]
    a = lebesgue_witness(sets)
    b = steinhaus_witness(F, generalized=True)
    assert a.axis == b.axis and a.chain == b.chain


@given(st.integers(0, 2**32 - 1))
def test_level_dichotomy_on_random_fields(seed):
    rng = np.random.default_rng(seed)
    spec = GridSpec(int(rng.integers(2, 4)), int(rng.integers(2, 5)))
    G = random_lipschitz_field(spec, rng)
    assert lipschitz_violation(spec, G.values) is None
    for axis in range(1, spec.n + 1):
        r = separating_level(G, axis)
        if r.kind == "connecting":
            r.chain.validate(spec, G.level_set(r.level))
            lower = range(int(G.values.min()), r.level)
            assert all(connects(G.level_set(p), axis) is None for p in lower)
        else:
            assert r.certificate.removed == G.level_set(r.level)
            r.certificate.validate()
