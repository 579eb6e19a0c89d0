import pytest

from connsep.grid import GridSpec, UsageError
from connsep.oracle import (
    equivalence_check,
    oracle_closed_components,
    oracle_complement_components,
    oracle_connects,
    oracle_intersection_connects,
    oracle_separates,
)
from connsep.topology import CellSet


def cs(n, k, cells):
    return CellSet.from_cells(GridSpec(n, k), cells)


def test_closed_component_examples():
    assert len(oracle_closed_components(cs(2, 2, [(1, 1), (2, 2)]))) == 1
    assert len(oracle_closed_components(cs(2, 3, [(1, 1), (3, 3)]))) == 2
    assert oracle_closed_components(CellSet.empty(GridSpec(2, 2))) == []


def test_complement_component_examples():
    comps = oracle_complement_components(cs(2, 2, [(1, 2), (2, 1)]))
    assert [c.cells for c in comps] == [((1, 1),), ((2, 2),)]
    assert comps[0].touches == {(1, "-"), (2, "-")}
    assert len(oracle_complement_components(CellSet.empty(GridSpec(2, 2)))) == 1
    assert oracle_complement_components(CellSet.full(GridSpec(2, 2))) == []


def test_predicate_examples():
    mid = cs(2, 3, [(1, 2), (2, 2), (3, 2)])
    assert oracle_separates(mid, 2)
    assert oracle_connects(cs(2, 3, [(1, 1), (2, 1), (3, 1)]), 1)
    empty = CellSet.empty(GridSpec(2, 3))
    assert not oracle_connects(empty, 1) and not oracle_separates(empty, 1)


def test_guard():
    with pytest.raises(UsageError):
        oracle_closed_components(CellSet.empty(GridSpec(3, 4)), guard=100)


@pytest.mark.parametrize("n,k,total", [(2, 2, 16), (2, 3, 512), (3, 2, 256)])
def test_exhaustive_equivalence(n, k, total):
    res = equivalence_check(n, k)
    assert res["total"] == total
    assert res["mismatches"] == 0, res["examples"]


def test_random_equivalence_n3k3():
    res = equivalence_check(3, 3, exhaustive=False, trials=200, seed=7)
    assert res["total"] == 200 and res["mismatches"] == 0


def test_intersection_uses_shared_faces():
    spec = GridSpec(2, 2)
    left = CellSet.from_cells(spec, [(1, 1), (1, 2)])
    right = CellSet.from_cells(spec, [(2, 1), (2, 2)])
    # no common cell, but the shared edge x1 = 1/2 spans axis 2
    assert len(left & right) == 0
    assert oracle_intersection_connects([left, right], 2)
    assert not oracle_intersection_connects([left, right], 1)
    assert oracle_intersection_connects([left], 2) == oracle_connects(left, 2)
