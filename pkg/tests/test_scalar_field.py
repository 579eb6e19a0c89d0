import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from connsep.expr import Const, ExprField, Ramp, VertexField, x
from connsep.grid import GridSpec, UsageError
from connsep.oracle import oracle_connects
from connsep.scalar_field import (
    bracket_sets,
    cell_range,
    certify_conn,
    certify_not_conn,
    certify_not_sep,
    certify_sep,
    fiber_bracket,
    pm_product_witness,
    pm_sign_check,
)
from connsep.topology import CellSet

X1 = VertexField.sample(lambda P: P[:, 0], 2, 2)
CONST = ExprField(2, Const(0.3))


def cells(cs):
    return sorted(cs.cells())


def test_cell_range_examples():
    assert cell_range(X1, (1, 1)) == (0.0, 0.5)
    assert cell_range(CONST, (2, 1), k=2) == (0.3, 0.3)


def test_fiber_bracket_examples():
    left, right = [(1, 1), (1, 2)], [(2, 1), (2, 2)]
    b = fiber_bracket(X1, 0.5)
    assert len(b.outer) == 4
    b = fiber_bracket(X1, 0.25)
    assert cells(b.outer) == left and cells(b.strictly_above) == right
    b = fiber_bracket(X1, 2.0)
    assert len(b.outer) == 0 and len(b.strictly_below) == 4


def test_certificate_examples():
    assert certify_not_conn(X1, 0.25, 1)
    assert not certify_not_conn(X1, 0.5, 1)
    assert not certify_not_conn(CONST, 0.3, 2, k=2)

    assert certify_sep(X1, 0.5, 1)
    assert not certify_sep(X1, 0.5, 2)
    assert not certify_sep(CONST, 0.4, 1, k=2)

    assert certify_not_sep(X1, 0.75, 2)
    assert not certify_not_sep(X1, 0.5, 1)
    assert not certify_not_sep(CONST, 0.3, 1, k=2)

    assert certify_conn(X1, 0.5, 2)
    assert not certify_conn(X1, 0.25, 2)
    assert not certify_conn(CONST, 0.4, 1, k=2)


def test_certify_conn_needs_two_dimensions():
    g = VertexField.sample(lambda P: P[:, 0], 1, 4)
    with pytest.raises(UsageError):
        certify_conn(g, 0.5, 1)
    assert certify_not_conn(g, 0.5, 1)


def test_constant_field_is_certified_at_its_value():
    # the whole cube is the fiber, so it both connects and separates
    for i in (1, 2):
        assert certify_sep(CONST, 0.3, i, k=2)
        assert certify_conn(CONST, 0.3, i, k=2)
    cs = bracket_sets(CONST, schedule=(2,), dp=0.1)
    for i in (1, 2):
        assert cs.points(i, "conn_in").tolist() == [0.3]
        assert cs.points(i, "sep_in").tolist() == [0.3]


def test_bracket_sets_x1_example():
    cs = bracket_sets(X1, axes=[1], schedule=(2,), dp=0.25)
    assert 0.5 in cs.points(1, "sep_in")
    out = cs.points(1, "conn_out")
    assert {0.25, 0.75} <= set(out.tolist())


def test_bracket_sets_nested_and_consistent_on_linear_field():
    f = ExprField(3, Ramp(x(2), [0.0, 1.0], [0.1, 0.9]))
    cs = bracket_sets(f, schedule=(4, 8, 16), dp=0.05)
    assert cs.nested
    sep2 = cs.points(2, "sep_in")
    assert sep2.size and sep2.min() > 0.1 and sep2.max() < 0.9
    assert np.all(cs.points(1, "sep_in") == []) and cs.points(1, "sep_out").size


def test_bracket_sets_rejects_bad_schedule():
    with pytest.raises(UsageError):
        bracket_sets(X1, schedule=(4, 2))


@st.composite
def vertex_fields(draw):
    k = draw(st.integers(1, 3))
    vals = draw(st.lists(st.integers(0, 4), min_size=(k + 1) ** 2, max_size=(k + 1) ** 2))
    return VertexField(GridSpec(2, k), [v / 4 for v in vals])


@settings(max_examples=60)
@given(vertex_fields(), st.integers(0, 4), st.integers(1, 2))
def test_certificates_agree_with_dense_fiber(g, p4, i):
    """Check against the fiber of a fine resampling, judged by the oracle."""
    p = p4 / 4
    fine = g.at(g.spec.k * 8)
    vals = fine.grid()
    # cells of the fine grid whose corner values straddle p approximate the fiber
    lo, hi = fine.cell_ranges()
    fiber = CellSet(fine.spec, (lo <= p) & (p <= hi))
    below = CellSet(fine.spec, hi < p)
    above = CellSet(fine.spec, lo > p)
    assert vals.size
    if certify_not_conn(g, p, i):
        assert not oracle_connects(fiber, i)
    if certify_not_sep(g, p, i):
        assert oracle_connects(below, i) or oracle_connects(above, i)
    assert not (certify_conn(g, p, i) and certify_not_conn(g, p, i))
    assert not (certify_sep(g, p, i) and certify_not_sep(g, p, i))


def test_sep_implies_conn_on_the_other_axis_for_n2():
    f = ExprField(2, Ramp(x(1), [0.0, 1.0], [0.0, 1.0]) * Ramp(x(2), [0.0, 1.0], [0.5, 1.0]))
    for p in np.linspace(0, 1, 21):
        if certify_sep(f, p, 1, k=8):
            assert certify_conn(f, p, 2, k=8)


def test_pm_sign_check_examples():
    f = ExprField(2, x(1) - 0.5)
    assert pm_sign_check(f, 1, 0.0, k=4)
    assert not pm_sign_check(f, 2, 0.0, k=4)
    assert not pm_sign_check(ExprField(2, x(1) * x(2) - 2), 1, 0.0, k=4)


def test_pm_product_witness_examples():
    f1 = VertexField.sample(lambda P: P[:, 0], 2, 2)
    ch = pm_product_witness([f1], [0.5], [1], 2, 2)
    assert len(ch) == 2 and ch.cells[0][1] == 1 and ch.cells[-1][1] == 2

    fs = [ExprField(3, x(1) - 0.5), ExprField(3, x(2) - 0.5)]
    ch = pm_product_witness(fs, [0.0, 0.0], [1, 2], 3, 4)
    assert [c[2] for c in ch.cells] == [1, 2, 3, 4]
    assert all(c[0] in (2, 3) and c[1] in (2, 3) for c in ch.cells)

    zero = ExprField(2, Const(0.0))
    ch = pm_product_witness([zero], [0.0], [1], 2, 2)
    assert [c[1] for c in ch.cells] == [1, 2]


def test_pm_product_witness_requires_certificates():
    with pytest.raises(UsageError):
        pm_product_witness([ExprField(2, x(1))], [0.5], [2], 1, 4)
    with pytest.raises(UsageError):
        pm_product_witness([ExprField(2, x(2))], [0.5], [1], 2, 4)
