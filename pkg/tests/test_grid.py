from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from connsep.grid import (
    FaceId,
    FaceLattice,
    GridFace,
    GridSpec,
    UsageError,
    adjacency_threshold,
    cell_face,
    face_count,
    intersection_dim,
    shared_face,
    touches_face,
)


def overlap_dim(k, a, b):
    """Independent oracle: intersect the closed intervals axis by axis with exact rationals."""
    dim = 0
    for x, y in zip(a, b):
        lo = max(Fraction(x - 1, k), Fraction(y - 1, k))
        hi = min(Fraction(x, k), Fraction(y, k))
        if lo > hi:
            return -1
        dim += lo < hi
    return dim


@pytest.mark.parametrize(
    "n,k,a,b,expected",
    [
        (2, 3, (2, 2), (2, 2), 2),
        (2, 3, (1, 1), (2, 2), 0),
        (2, 3, (1, 1), (3, 1), -1),
        (3, 2, (1, 1, 1), (1, 2, 1), 2),
    ],
)
def test_intersection_dim_examples(n, k, a, b, expected):
    spec = GridSpec(n, k)
    assert intersection_dim(spec, a, b) == expected
    assert overlap_dim(k, a, b) == expected


def test_intersection_dim_rejects_foreign_cell():
    with pytest.raises(UsageError):
        intersection_dim(GridSpec(2, 3), (1, 1), (4, 1))
    with pytest.raises(UsageError):
        intersection_dim(GridSpec(2, 3), (1, 1), (1, 1, 1))


@pytest.mark.parametrize(
    "cell,face,expected",
    [((1, 2), FaceId(1, "-"), True), ((1, 2), FaceId(1, "+"), False), ((3, 2), FaceId(1, "+"), True)],
)
def test_touches_face_examples(cell, face, expected):
    assert touches_face(GridSpec(2, 3), cell, face) is expected


def test_adjacency_threshold():
    assert adjacency_threshold(3, 1) == 0
    assert adjacency_threshold(4, 4) == 3
    assert adjacency_threshold(3, 2) == 1
    for bad in (0, 4):
        with pytest.raises(UsageError):
            adjacency_threshold(3, bad)


@pytest.mark.parametrize("n,k,count", [(1, 1, 3), (2, 1, 9), (2, 2, 25)])
def test_face_lattice_counts(n, k, count):
    faces = list(FaceLattice(GridSpec(n, k)))
    assert len(faces) == count == face_count(GridSpec(n, k))
    assert len(set(faces)) == count


def test_face_lattice_dimensions_n2k1():
    lat = FaceLattice(GridSpec(2, 1))
    dims = sorted(f.dim for f in lat)
    assert dims == [0, 0, 0, 0, 1, 1, 1, 1, 2]


def test_face_lattice_guard():
    with pytest.raises(UsageError):
        FaceLattice(GridSpec(3, 300))


def test_gridspec_validation():
    assert GridSpec(3, 4).num_cells == 64
    assert GridSpec(3, 4).num_vertices == 125
    for n, k in ((0, 2), (2, 0)):
        with pytest.raises(UsageError):
            GridSpec(n, k)


def test_flat_order_axis_one_fastest():
    spec = GridSpec(2, 3)
    assert list(spec.cells())[:4] == [(1, 1), (2, 1), (3, 1), (1, 2)]
    for f in range(spec.num_cells):
        assert spec.flat(spec.cell(f)) == f
    assert [tuple(r) for r in spec.index_array()] == list(spec.cells())


def test_no_face_in_minus_one_skeleton():
    assert not any(f.in_skeleton(-1) for f in FaceLattice(GridSpec(2, 2)))
    assert GridFace((0, 1)).in_skeleton(1) and not GridFace((1, 1)).in_skeleton(1)


cells3 = st.tuples(*[st.integers(1, 4)] * 3)


@given(cells3, cells3)
def test_intersection_dim_symmetric_and_matches_oracle(a, b):
    spec = GridSpec(3, 4)
    d = intersection_dim(spec, a, b)
    assert d == intersection_dim(spec, b, a) == overlap_dim(4, a, b)
    assert (d == 3) == (a == b)


@given(cells3, cells3)
def test_shared_face_dimension_and_containment(a, b):
    spec = GridSpec(3, 4)
    f = shared_face(spec, a, b)
    d = intersection_dim(spec, a, b)
    if d < 0:
        assert f is None
    else:
        assert f.dim == d
        assert cell_face(spec, a).contains(f) and cell_face(spec, b).contains(f)


@given(st.lists(st.fractions(0, 1), min_size=2, max_size=2))
def test_every_point_in_exactly_one_relative_interior(pt):
    k = 3
    owners = []
    for f in FaceLattice(GridSpec(2, k)):
        inside = True
        for c, x in zip(f.coords, pt):
            if c % 2 == 0:
                inside &= x == Fraction(c, 2 * k)
            else:
                inside &= Fraction(c - 1, 2 * k) < x < Fraction(c + 1, 2 * k)
        if inside:
            owners.append(f)
    assert len(owners) == 1
