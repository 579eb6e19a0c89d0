"""Connect / separate predicates for unions of closed cells.

A :class:`CellSet` stands for the compact set ``∪S``.  ``connects`` asks
whether some connected component of ``∪S`` meets both faces ``x_i = 0`` and
``x_i = 1``; ``separates`` asks whether no component of the open complement
``I^n \\ ∪S`` does.

Closed-union connectivity is cell adjacency through shared faces of a
minimum dimension ``d`` (``d = 0``: any contact).  Complement connectivity
uses the open-complement rule of :func:`complement_adjacent`: two free cells
are joined only through a shared face that no member cell owns.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .grid import (
    Cell,
    FaceId,
    GridSpec,
    UsageError,
    intersection_dim,
    shared_face,
)

# grids up to this many cells use the pure-Python table-driven paths
SMALL_GRID = 4096


class CellSet:
    """An immutable subset of the cells of a :class:`GridSpec`.

    Membership is a flat boolean vector of length ``k^n`` in flat order
    (axis 1 fastest).
    """

    __slots__ = ("spec", "_mask")

    def __init__(self, spec: GridSpec, mask):
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.shape[0] != spec.num_cells:
            raise UsageError(f"membership has length {mask.shape[0]}, expected {spec.num_cells}")
        mask = mask.copy()
        mask.setflags(write=False)
        self.spec = spec
        self._mask = mask

    # construction -------------------------------------------------------
    @classmethod
    def from_cells(cls, spec: GridSpec, cells: Iterable[Sequence[int]]) -> "CellSet":
        mask = np.zeros(spec.num_cells, dtype=bool)
        for c in cells:
            mask[spec.flat(c)] = True
        return cls(spec, mask)

    @classmethod
    def empty(cls, spec: GridSpec) -> "CellSet":
        return cls(spec, np.zeros(spec.num_cells, dtype=bool))

    @classmethod
    def full(cls, spec: GridSpec) -> "CellSet":
        return cls(spec, np.ones(spec.num_cells, dtype=bool))

    @classmethod
    def from_grid(cls, spec: GridSpec, arr) -> "CellSet":
        """From an n-d boolean array indexed ``arr[i_1 - 1, ..., i_n - 1]``."""
        arr = np.asarray(arr, dtype=bool)
        if arr.shape != spec.shape:
            raise UsageError(f"grid array shape {arr.shape} != {spec.shape}")
        return cls(spec, arr.reshape(-1, order="F"))

    # views ----------------------------------------------------------------
    @property
    def mask(self) -> np.ndarray:
        return self._mask

    def grid(self) -> np.ndarray:
        return self._mask.reshape(self.spec.shape, order="F")

    def cells(self) -> list[Cell]:
        return [self.spec.cell(int(f)) for f in np.flatnonzero(self._mask)]

    def __contains__(self, cell) -> bool:
        return bool(self._mask[self.spec.flat(cell)])

    def __len__(self) -> int:
        return int(self._mask.sum())

    def __bool__(self) -> bool:
        return bool(self._mask.any())

    def __iter__(self):
        return iter(self.cells())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CellSet)
            and self.spec == other.spec
            and bool(np.array_equal(self._mask, other._mask))
        )

    def __hash__(self):
        return hash((self.spec, self._mask.tobytes()))

    def __repr__(self) -> str:
        return f"CellSet(n={self.spec.n}, k={self.spec.k}, cells={self.cells()})"

    # algebra --------------------------------------------------------------
    def _other(self, other: "CellSet") -> np.ndarray:
        if not isinstance(other, CellSet) or other.spec != self.spec:
            raise UsageError("cell sets belong to different grids")
        return other._mask

    def __or__(self, other):
        return CellSet(self.spec, self._mask | self._other(other))

    def __and__(self, other):
        return CellSet(self.spec, self._mask & self._other(other))

    def __sub__(self, other):
        return CellSet(self.spec, self._mask & ~self._other(other))

    def __xor__(self, other):
        return CellSet(self.spec, self._mask ^ self._other(other))

    def complement(self) -> "CellSet":
        return CellSet(self.spec, ~self._mask)

    def issubset(self, other: "CellSet") -> bool:
        return not bool((self._mask & ~self._other(other)).any())

    def refine(self, factor: int) -> "CellSet":
        """Same point set on the grid subdivided ``factor`` times per axis."""
        g = self.grid()
        for ax in range(self.spec.n):
            g = np.repeat(g, factor, axis=ax)
        return CellSet.from_grid(self.spec.refine(factor), g)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Chain:
    """Cells ``P_1..P_r`` linking face ``(axis, -)`` to ``(axis, +)``."""

    axis: int
    cells: tuple
    link_dims: tuple
    threshold: int

    def __len__(self) -> int:
        return len(self.cells)

    def validate(self, spec: GridSpec, members: "CellSet | None" = None) -> None:
        """Raise ``UsageError`` unless this is a valid chain (inside ``members``)."""
        if not self.cells:
            raise UsageError("empty chain")
        if self.cells[0][self.axis - 1] != 1:
            raise UsageError(f"first cell {self.cells[0]} misses face ({self.axis}, -)")
        if self.cells[-1][self.axis - 1] != spec.k:
            raise UsageError(f"last cell {self.cells[-1]} misses face ({self.axis}, +)")
        if len(self.link_dims) != len(self.cells) - 1:
            raise UsageError("link_dims length mismatch")
        for a, b, dim in zip(self.cells, self.cells[1:], self.link_dims):
            real = intersection_dim(spec, a, b)
            if real != dim:
                raise UsageError(f"link {a}-{b} recorded dim {dim}, actual {real}")
            if real < self.threshold or real < 0:
                raise UsageError(f"link {a}-{b} has dim {real} < threshold {self.threshold}")
        if members is not None:
            for c in self.cells:
                if c not in members:
                    raise UsageError(f"chain cell {c} not in the cell set")

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "threshold": self.threshold,
            "cells": [list(c) for c in self.cells],
            "link_dims": list(self.link_dims),
        }


@dataclass(frozen=True)
class SeparationCertificate:
    """Complement components of ``removed`` for one axis, none spanning it."""

    axis: int
    removed: CellSet
    components: tuple  # tuple of tuples of cells, ordered by lowest flat index
    touches_minus: tuple  # per component
    touches_plus: tuple

    def minus_components(self) -> list:
        return [c for c, t in zip(self.components, self.touches_minus) if t]

    def plus_components(self) -> list:
        return [c for c, t in zip(self.components, self.touches_plus) if t]

    def validate(self) -> None:
        """Recompute the complement partition and check it matches."""
        again = complement_components(self.removed)
        if [tuple(c) for c in again] != list(self.components):
            raise UsageError("certificate partition does not match the complement")
        for comp, lo, hi in zip(self.components, self.touches_minus, self.touches_plus):
            if lo and hi:
                raise UsageError(f"component {comp[:3]}... touches both faces of axis {self.axis}")
            real_lo = any(c[self.axis - 1] == 1 for c in comp)
            real_hi = any(c[self.axis - 1] == self.removed.spec.k for c in comp)
            if (real_lo, real_hi) != (lo, hi):
                raise UsageError("face-touching flags are wrong")

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "removed": [list(c) for c in self.removed.cells()],
            "components": [[list(c) for c in comp] for comp in self.components],
            "touches_minus": list(self.touches_minus),
            "touches_plus": list(self.touches_plus),
        }


# ---------------------------------------------------------------------------
# adjacency tables


def _check_d(spec: GridSpec, d: int) -> int:
    if not 0 <= d <= spec.n:
        raise UsageError(f"min shared dimension d={d} outside [0, {spec.n}]")
    return d


@lru_cache(maxsize=None)
def _offsets(n: int, d: int) -> tuple:
    """Index offsets to cells sharing a face of dimension >= d."""
    out = []
    for off in itertools.product((-1, 0, 1), repeat=n):
        nz = sum(1 for o in off if o)
        if 0 < nz <= n - d:
            out.append(off)
    return tuple(out)


@lru_cache(maxsize=128)
def _neighbor_table(spec: GridSpec, d: int) -> tuple:
    idx = spec.index_array()
    k = spec.k
    strides = [k**s for s in range(spec.n)]
    table = []
    offs = _offsets(spec.n, d)
    for f in range(spec.num_cells):
        c = idx[f]
        nb = []
        for off in offs:
            ok = True
            g = f
            for s, o in enumerate(off):
                if o:
                    v = c[s] + o
                    if v < 1 or v > k:
                        ok = False
                        break
                    g += o * strides[s]
            if ok:
                nb.append(g)
        table.append(tuple(nb))
    return tuple(table)


@lru_cache(maxsize=128)
def _lex_rank(spec: GridSpec) -> tuple:
    """Rank of each flat index under lexicographic order of index tuples."""
    idx = spec.index_array()
    order = np.lexsort(idx.T[::-1])
    rank = np.empty(spec.num_cells, dtype=np.int64)
    rank[order] = np.arange(spec.num_cells)
    return tuple(int(r) for r in rank)


@lru_cache(maxsize=128)
def _face_flats(spec: GridSpec, axis: int, sign: str) -> tuple:
    idx = spec.index_array()
    target = 1 if sign == "-" else spec.k
    return tuple(int(f) for f in np.flatnonzero(idx[:, axis - 1] == target))


def _structure(n: int, d: int) -> np.ndarray:
    if d >= n:
        # scipy treats connectivity 0 like 1; only the cell itself is adjacent
        out = np.zeros((3,) * n, dtype=bool)
        out[(1,) * n] = True
        return out
    return ndimage.generate_binary_structure(n, n - d)


# ---------------------------------------------------------------------------
# closed-union connectivity


def components(S: CellSet, d: int = 0) -> list[list[Cell]]:
    """Maximal classes of ``S`` under shared-face dimension >= ``d``.

    Components are ordered by their lowest flat index; cells inside a
    component are in flat order.
    """
    spec = S.spec
    _check_d(spec, d)
    if not S:
        return []
    labels, _ = ndimage.label(S.grid(), structure=_structure(spec.n, d))
    flat_labels = labels.reshape(-1, order="F")
    groups: dict[int, list[Cell]] = {}
    for f in np.flatnonzero(flat_labels):
        groups.setdefault(int(flat_labels[f]), []).append(spec.cell(int(f)))
    return list(groups.values())


def spans(S: CellSet, axis: int, d: int = 0) -> bool:
    """Fast existence test: does some d-component of ``S`` touch both ``axis`` faces."""
    return bool(spanning_axes(S, d, axes=(axis,))[0])


def spanning_axes(S: CellSet, d: int = 0, axes: Sequence[int] | None = None) -> list[bool]:
    """For each axis, whether some d-component of ``S`` touches both of its faces."""
    spec = S.spec
    _check_d(spec, d)
    axes = tuple(range(1, spec.n + 1)) if axes is None else tuple(axes)
    for a in axes:
        spec.check_axis(a)
    if not S:
        return [False] * len(axes)
    g = S.grid()
    if spec.k == 1:
        return [True] * len(axes)
    labels, _ = ndimage.label(g, structure=_structure(spec.n, d))
    out = []
    for a in axes:
        lo = np.take(labels, 0, axis=a - 1)
        hi = np.take(labels, spec.k - 1, axis=a - 1)
        lo_set = np.unique(lo[lo > 0])
        hi_set = np.unique(hi[hi > 0])
        out.append(bool(np.intersect1d(lo_set, hi_set, assume_unique=True).size))
    return out


def _chain_small(S: CellSet, axis: int, d: int):
    spec = S.spec
    member = S.mask
    table = _neighbor_table(spec, d)
    targets = [f for f in _face_flats(spec, axis, "+") if member[f]]
    if not targets:
        return None
    dist = {f: 0 for f in targets}
    queue = deque(targets)
    while queue:
        f = queue.popleft()
        nd = dist[f] + 1
        for g in table[f]:
            if member[g] and g not in dist:
                dist[g] = nd
                queue.append(g)
    starts = [f for f in _face_flats(spec, axis, "-") if f in dist]
    if not starts:
        return None
    rank = _lex_rank(spec)
    best = min(dist[f] for f in starts)
    cur = min((f for f in starts if dist[f] == best), key=rank.__getitem__)
    path = [cur]
    while dist[cur] > 0:
        want = dist[cur] - 1
        cur = min((g for g in table[cur] if dist.get(g) == want), key=rank.__getitem__)
        path.append(cur)
    return path


def _chain_large(S: CellSet, axis: int, d: int):
    spec = S.spec
    g = S.grid()
    struct = _structure(spec.n, d)
    dist = np.full(spec.shape, -1, dtype=np.int64)
    sl_hi = [slice(None)] * spec.n
    sl_hi[axis - 1] = spec.k - 1
    front = np.zeros(spec.shape, dtype=bool)
    front[tuple(sl_hi)] = g[tuple(sl_hi)]
    if not front.any():
        return None
    level = 0
    dist[front] = 0
    while front.any():
        grown = ndimage.binary_dilation(front, structure=struct) & g & (dist < 0)
        level += 1
        dist[grown] = level
        front = grown
    sl_lo = [slice(None)] * spec.n
    sl_lo[axis - 1] = 0
    lo_dist = dist[tuple(sl_lo)]
    if not (lo_dist >= 0).any():
        return None
    best = lo_dist[lo_dist >= 0].min()
    flat_dist = dist.reshape(-1, order="F")
    starts = [f for f in _face_flats(spec, axis, "-") if flat_dist[f] == best]
    cur = min(starts, key=spec.cell)
    path = [cur]
    offs = _offsets(spec.n, d)
    while flat_dist[cur] > 0:
        want = flat_dist[cur] - 1
        c = spec.cell(cur)
        cand = []
        for off in offs:
            nc = tuple(x + o for x, o in zip(c, off))
            if all(1 <= x <= spec.k for x in nc):
                nf = spec.flat(nc)
                if flat_dist[nf] == want:
                    cand.append(nc)
        cur = spec.flat(min(cand))
        path.append(cur)
    return path


def connects(S: CellSet, axis: int, d: int = 0) -> Chain | None:
    """Shortest chain through ``S`` from face ``(axis,-)`` to ``(axis,+)``.

    Consecutive cells share a face of dimension >= ``d``.  Among shortest
    chains the lexicographically smallest cell sequence is returned.
    ``None`` when no component of ``S`` touches both faces.
    """
    spec = S.spec
    spec.check_axis(axis)
    _check_d(spec, d)
    if not S:
        return None
    if spec.num_cells <= SMALL_GRID:
        path = _chain_small(S, axis, d)
    else:
        path = _chain_large(S, axis, d)
    if path is None:
        return None
    cells = tuple(spec.cell(f) for f in path)
    dims = tuple(intersection_dim(spec, a, b) for a, b in zip(cells, cells[1:]))
    return Chain(axis=axis, cells=cells, link_dims=dims, threshold=d)


# ---------------------------------------------------------------------------
# open-complement connectivity


def complement_adjacent(a: Sequence[int], b: Sequence[int], S: CellSet) -> bool:
    """Whether free cells ``a`` and ``b`` are joined through the open complement.

    True iff ``a ∩ b`` is nonempty and is a face of no member cell of ``S``.
    """
    spec = S.spec
    a = spec.check_cell(a)
    b = spec.check_cell(b)
    if a in S or b in S:
        raise UsageError("complement_adjacent needs two cells outside S")
    if a == b:
        raise UsageError("complement_adjacent needs two distinct cells")
    face = shared_face(spec, a, b)
    if face is None:
        return False
    # cells owning the face: the box spanned by a and b
    ranges = [range(min(x, y), max(x, y) + 1) for x, y in zip(a, b)]
    for c in itertools.product(*ranges):
        if c in S:
            return False
    return True


@lru_cache(maxsize=64)
def _boxes(spec: GridSpec) -> tuple:
    """Flat-index tuples for every box of 2^|T| cells around an interior face."""
    n, k = spec.n, spec.k
    out = []
    for r in range(1, n + 1):
        for T in itertools.combinations(range(n), r):
            ranges = [range(1, k) if s in T else range(1, k + 1) for s in range(n)]
            corners = list(itertools.product((0, 1), repeat=len(T)))
            for base in itertools.product(*ranges):
                box = []
                for e in corners:
                    c = list(base)
                    for s, o in zip(T, e):
                        c[s] += o
                    box.append(spec.flat(c))
                out.append(tuple(box))
    return tuple(out)


def _complement_labels_small(S: CellSet) -> np.ndarray:
    spec = S.spec
    member = S.mask
    parent = list(range(spec.num_cells))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for box in _boxes(spec):
        if any(member[f] for f in box):
            continue
        r0 = find(box[0])
        for f in box[1:]:
            r = find(f)
            if r != r0:
                parent[r] = r0
    return np.array([find(f) if not member[f] else -1 for f in range(spec.num_cells)])


def _complement_labels_large(S: CellSet) -> np.ndarray:
    spec = S.spec
    n, k = spec.n, spec.k
    free = ~S.grid()
    flat_ids = np.arange(spec.num_cells).reshape(spec.shape, order="F")
    rows, cols = [], []
    for r in range(1, n + 1):
        for T in itertools.combinations(range(n), r):
            corners = list(itertools.product((0, 1), repeat=len(T)))

            def view(arr, e):
                sl = [slice(None)] * n
                for s, o in zip(T, e):
                    sl[s] = slice(o, k - 1 + o)
                return arr[tuple(sl)]

            ok = np.ones(view(free, corners[0]).shape, dtype=bool)
            for e in corners:
                ok &= view(free, e)
            base = view(flat_ids, corners[0])[ok]
            for e in corners[1:]:
                rows.append(base)
                cols.append(view(flat_ids, e)[ok])
    N = spec.num_cells
    if rows:
        rr = np.concatenate(rows)
        cc = np.concatenate(cols)
    else:
        rr = cc = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(rr.size, dtype=np.int8), (rr, cc)), shape=(N, N))
    _, labels = connected_components(graph, directed=False)
    member = S.mask
    labels = labels.astype(np.int64)
    labels[member] = -1
    return labels


def _complement_labels(S: CellSet) -> np.ndarray:
    if S.spec.num_cells <= SMALL_GRID:
        return _complement_labels_small(S)
    return _complement_labels_large(S)


def complement_components(S: CellSet) -> list[list[Cell]]:
    """Components of the free cells under :func:`complement_adjacent`.

    Ordered by lowest flat index; cells in flat order.
    """
    spec = S.spec
    labels = _complement_labels(S)
    groups: dict[int, list[Cell]] = {}
    for f in np.flatnonzero(labels >= 0):
        groups.setdefault(int(labels[f]), []).append(spec.cell(int(f)))
    return list(groups.values())


def _complement_spanning(S: CellSet, axes: Sequence[int]) -> list[bool]:
    spec = S.spec
    labels = _complement_labels(S)
    idx = spec.index_array()
    out = []
    for a in axes:
        lo = labels[(idx[:, a - 1] == 1) & (labels >= 0)]
        hi = labels[(idx[:, a - 1] == spec.k) & (labels >= 0)]
        out.append(bool(np.intersect1d(lo, hi).size))
    return out


def separates(S: CellSet, axis: int) -> SeparationCertificate | None:
    """Certificate that ``∪S`` separates the two faces of ``axis``, or ``None``."""
    spec = S.spec
    spec.check_axis(axis)
    comps = complement_components(S)
    lo = tuple(any(c[axis - 1] == 1 for c in comp) for comp in comps)
    hi = tuple(any(c[axis - 1] == spec.k for c in comp) for comp in comps)
    if any(a and b for a, b in zip(lo, hi)):
        return None
    return SeparationCertificate(
        axis=axis,
        removed=S,
        components=tuple(tuple(c) for c in comps),
        touches_minus=lo,
        touches_plus=hi,
    )


def separating_axes(S: CellSet, axes: Sequence[int] | None = None) -> list[bool]:
    """Boolean form of :func:`separates` for several axes at once."""
    spec = S.spec
    axes = tuple(range(1, spec.n + 1)) if axes is None else tuple(axes)
    for a in axes:
        spec.check_axis(a)
    return [not x for x in _complement_spanning(S, axes)]


def separates_all_axes(S: CellSet) -> tuple:
    return tuple(separating_axes(S))
