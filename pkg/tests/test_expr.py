import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from connsep.expr import (
    Abs,
    Const,
    ExprField,
    Interval,
    Max,
    Min,
    Ramp,
    SegDist,
    VertexField,
    field_from_dict,
    node_from_dict,
    x,
)
from connsep.grid import GridSpec, UsageError

coords = st.integers(1, 3).map(x)
consts = st.floats(-2, 2, allow_nan=False).map(Const)


def _extend(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda t: t[0] + t[1]),
        pair.map(lambda t: t[0] - t[1]),
        pair.map(lambda t: t[0] * t[1]),
        children.map(Abs),
        children.map(lambda c: -c),
        pair.map(lambda t: Min(list(t))),
        pair.map(lambda t: Max(list(t))),
        children.map(lambda c: Ramp(c, [-0.5, 0.25, 1.0], [0.3, -1.0, 2.0])),
    )


exprs = st.recursive(
    st.one_of(coords, consts, st.just(SegDist([0.5, 0.0, 0.3], 2, 0.0, 1.0))),
    _extend,
    max_leaves=8,
)


@st.composite
def boxes(draw):
    a = np.array(draw(st.lists(st.floats(0, 1), min_size=3, max_size=3)))
    b = np.array(draw(st.lists(st.floats(0, 1), min_size=3, max_size=3)))
    return np.minimum(a, b), np.maximum(a, b)


@given(exprs, boxes(), st.integers(0, 2**32 - 1))
def test_box_range_encloses_samples(e, box, seed):
    f = ExprField(3, e)
    lo, hi = box
    rlo, rhi = f.box_range(lo, hi)
    pts = lo + (hi - lo) * np.random.default_rng(seed).random((64, 3))
    pts = np.vstack([pts, lo, hi])
    vals = e.eval(pts)
    assert np.all(vals >= rlo) and np.all(vals <= rhi)


@given(exprs, boxes())
def test_range_is_inclusion_isotone(e, box):
    lo, hi = box
    mid = (lo + hi) / 2
    outer = e.range(lo[None], hi[None])
    inner = e.range(lo[None], mid[None])
    assert outer.lo[0] <= inner.lo[0] and inner.hi[0] <= outer.hi[0]


@given(exprs)
def test_json_round_trip(e):
    f = ExprField(3, e)
    g = field_from_dict(json.loads(json.dumps(f.to_dict())))
    pts = np.random.default_rng(0).random((20, 3))
    assert np.array_equal(f(pts), g(pts))
    assert node_from_dict(e.to_dict()).to_dict() == e.to_dict()


def test_interval_add_is_outward():
    s = Interval(0.1) + Interval(0.2)
    true = Fraction(0.1) + Fraction(0.2)
    assert Fraction(float(s.lo)) <= true <= Fraction(float(s.hi))
    assert float(s.lo) < float(s.hi)
    exact = Interval(0.5) + Interval(0.25)
    assert float(exact.lo) == float(exact.hi) == 0.75


def test_segdist_lower_bound_away_from_segment():
    e = SegDist([0.5, 0.5], 2, 0.0, 1.0)  # the line x1 = 0.5
    f = ExprField(2, e)
    lo, hi = f.box_range(np.array([0.0, 0.0]), np.array([0.25, 1.0]))
    assert lo > 0 and lo <= 0.25 <= hi
    pts = np.random.default_rng(1).random((1000, 2)) * [0.25, 1.0]
    assert e.eval(pts).min() >= lo


def test_ramp_is_exact_on_flat_parts():
    r = Ramp(x(1), [0.5, 1.0], [0.2, 0.8])
    f = ExprField(1, r)
    assert f.box_range(np.array([0.0]), np.array([0.5])) == (0.2, 0.2)
    assert f(np.array([0.75])) == pytest.approx(0.5)


def test_vertex_field_ranges():
    g = VertexField.sample(lambda X: X[:, 0], 2, 2)
    lo, hi = g.cell_ranges()
    assert (lo[0], hi[0]) == (0.0, 0.5)  # cell (1,1)
    c = VertexField(GridSpec(2, 2), [0.3] * 9)
    lo, hi = c.cell_ranges()
    assert np.all(lo == 0.3) and np.all(hi == 0.3)


def test_vertex_field_interpolates_and_refines():
    f = ExprField(2, x(1) * x(2))
    g = VertexField.sample(f, 2, 4)
    pts = np.random.default_rng(2).random((50, 2))
    assert np.allclose(g(pts), pts[:, 0] * pts[:, 1])  # bilinear is exact here
    h = VertexField(GridSpec(2, 2), g.at(2).values).at(4)
    assert np.allclose(h.values, g.values)


def test_field_rejects_points_outside_cube():
    with pytest.raises(UsageError):
        ExprField(2, x(1))(np.array([1.5, 0.0]))
    with pytest.raises(UsageError):
        ExprField(1, x(2))
