"""The cubical subdivision of the unit cube into k^n closed cells.

Cells are addressed by 1-based multi-indices ``(i_1, ..., i_n)`` with
``1 <= i_s <= k``; index ``i_s`` stands for the closed interval
``[(i_s - 1)/k, i_s/k]`` along axis ``s``.  Flat indices enumerate cells
with axis 1 varying fastest.

Grid faces use doubled integer coordinates: per axis a value ``c`` in
``[0, 2k]``; even ``c`` is the fixed coordinate ``c/(2k)``, odd ``c`` is the
interval ``[(c-1)/(2k), (c+1)/(2k)]``.  Everything here is exact integer
arithmetic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np


class UsageError(ValueError):
    """Invalid input to an operation (bad index, mismatched grid, ...)."""


class SoundnessError(RuntimeError):
    """A guaranteed witness or certificate was not found.

    Raised only when an implementation defect (or a broken theorem) is
    detected; carries a diagnostic dump in ``details``.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


FACE_SIZE_GUARD = 10**7

Cell = tuple  # tuple[int, ...], 1-based


@dataclass(frozen=True)
class GridSpec:
    n: int
    k: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise UsageError(f"dimension n must be an integer >= 1, got {self.n!r}")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise UsageError(f"subdivision k must be an integer >= 1, got {self.k!r}")

    @property
    def num_cells(self) -> int:
        return self.k**self.n

    @property
    def num_vertices(self) -> int:
        return (self.k + 1) ** self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.k,) * self.n

    def check_cell(self, cell: Sequence[int]) -> Cell:
        cell = tuple(int(c) for c in cell)
        if len(cell) != self.n:
            raise UsageError(f"cell {cell} has {len(cell)} coordinates, grid has n={self.n}")
        if any(c < 1 or c > self.k for c in cell):
            raise UsageError(f"cell {cell} out of range [1, {self.k}]")
        return cell

    def check_axis(self, axis: int) -> int:
        if not 1 <= axis <= self.n:
            raise UsageError(f"axis {axis} out of range [1, {self.n}]")
        return axis

    def flat(self, cell: Sequence[int]) -> int:
        cell = self.check_cell(cell)
        idx = 0
        for c in reversed(cell):
            idx = idx * self.k + (c - 1)
        return idx

    def cell(self, flat: int) -> Cell:
        if not 0 <= flat < self.num_cells:
            raise UsageError(f"flat index {flat} out of range")
        out = []
        for _ in range(self.n):
            flat, r = divmod(flat, self.k)
            out.append(r + 1)
        return tuple(out)

    def cells(self) -> Iterator[Cell]:
        """All cells in flat order (axis 1 fastest)."""
        for rev in itertools.product(range(1, self.k + 1), repeat=self.n):
            yield tuple(reversed(rev))

    def index_array(self) -> np.ndarray:
        """``(k^n, n)`` array of 1-based indices in flat order."""
        return _index_array(self.n, self.k)

    def refine(self, factor: int) -> "GridSpec":
        return GridSpec(self.n, self.k * factor)


@lru_cache(maxsize=64)
def _index_array(n: int, k: int) -> np.ndarray:
    flat = np.arange(k**n)
    out = np.empty((k**n, n), dtype=np.int64)
    for s in range(n):
        out[:, s] = flat % k + 1
        flat = flat // k
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FaceId:
    axis: int
    sign: str  # '-' or '+'

    def __post_init__(self):
        if self.sign not in ("-", "+"):
            raise UsageError(f"face sign must be '-' or '+', got {self.sign!r}")
        if self.axis < 1:
            raise UsageError(f"face axis must be >= 1, got {self.axis}")

    @property
    def opposite(self) -> "FaceId":
        return FaceId(self.axis, "+" if self.sign == "-" else "-")


def _same_spec(spec: GridSpec, *cells):
    return tuple(spec.check_cell(c) for c in cells)


def intersection_dim(spec: GridSpec, a: Sequence[int], b: Sequence[int]) -> int:
    """Dimension of the closed polytope ``a ∩ b``; -1 when empty."""
    a, b = _same_spec(spec, a, b)
    dim = 0
    for x, y in zip(a, b):
        d = abs(x - y)
        if d >= 2:
            return -1
        if d == 0:
            dim += 1
    return dim


def touches_face(spec: GridSpec, cell: Sequence[int], face: FaceId) -> bool:
    (cell,) = _same_spec(spec, cell)
    spec.check_axis(face.axis)
    c = cell[face.axis - 1]
    return c == 1 if face.sign == "-" else c == spec.k


def adjacency_threshold(n: int, i: int) -> int:
    """Minimum shared-face dimension between consecutive cells of a colour-i chain."""
    if not 1 <= i <= n:
        raise UsageError(f"colour/axis {i} out of range [1, {n}]")
    return i - 1


# ---------------------------------------------------------------------------
# grid faces


@dataclass(frozen=True, order=True)
class GridFace:
    """A face of the subdivision in doubled coordinates (see module docstring)."""

    coords: tuple[int, ...]

    @property
    def dim(self) -> int:
        return sum(c & 1 for c in self.coords)

    def in_skeleton(self, i: int) -> bool:
        # Skel_{-1} is empty; dim >= 0 always exceeds -1
        return self.dim <= i

    def contains(self, other: "GridFace") -> bool:
        """True iff ``other`` is a (not necessarily proper) face of ``self``."""
        for g, f in zip(self.coords, other.coords):
            if g == f:
                continue
            if not (g & 1) or abs(g - f) != 1:
                return False
        return True

    def descriptor(self, k: int) -> list:
        """Per-axis description with exact rationals as ``(num, k)`` pairs.

        A fixed coordinate is ``("at", j)`` meaning ``j/k``; an interval is
        ``("in", j)`` meaning ``[(j-1)/k, j/k]``.
        """
        out = []
        for c in self.coords:
            if c & 1:
                out.append(("in", (c + 1) // 2))
            else:
                out.append(("at", c // 2))
        return out

    def lies_on(self, face: FaceId, k: int) -> bool:
        c = self.coords[face.axis - 1]
        return c == 0 if face.sign == "-" else c == 2 * k


def cell_face(spec: GridSpec, cell: Sequence[int]) -> GridFace:
    (cell,) = _same_spec(spec, cell)
    return GridFace(tuple(2 * c - 1 for c in cell))


def shared_face(spec: GridSpec, a: Sequence[int], b: Sequence[int]) -> GridFace | None:
    """The face ``a ∩ b`` or ``None`` when the cells are disjoint."""
    a, b = _same_spec(spec, a, b)
    coords = []
    for x, y in zip(a, b):
        if x == y:
            coords.append(2 * x - 1)
        elif abs(x - y) == 1:
            coords.append(2 * max(x, y) - 2)
        else:
            return None
    return GridFace(tuple(coords))


def face_count(spec: GridSpec) -> int:
    return (2 * spec.k + 1) ** spec.n


class FaceLattice:
    """All grid faces of a subdivision with containment queries."""

    def __init__(self, spec: GridSpec, guard: int = FACE_SIZE_GUARD):
        total = face_count(spec)
        if total > guard:
            raise UsageError(f"face lattice has {total} faces, above guard {guard}")
        self.spec = spec

    def __len__(self) -> int:
        return face_count(self.spec)

    def __iter__(self) -> Iterator[GridFace]:
        m = 2 * self.spec.k + 1
        for coords in itertools.product(range(m), repeat=self.spec.n):
            yield GridFace(coords)

    def faces_of_dim(self, d: int) -> Iterator[GridFace]:
        return (f for f in self if f.dim == d)

    def facets_of(self, face: GridFace) -> list[GridFace]:
        """Faces one dimension lower contained in ``face``."""
        out = []
        for s, c in enumerate(face.coords):
            if c & 1:
                for e in (c - 1, c + 1):
                    out.append(GridFace(face.coords[:s] + (e,) + face.coords[s + 1 :]))
        return out

    def cells_containing(self, face: GridFace) -> list[Cell]:
        """All cells having ``face`` as a face, in flat order."""
        k = self.spec.k
        choices = []
        for c in face.coords:
            if c & 1:
                choices.append([(c + 1) // 2])
            else:
                j = c // 2
                choices.append([x for x in (j, j + 1) if 1 <= x <= k])
        cells = [tuple(reversed(r)) for r in itertools.product(*reversed(choices))]
        return cells

    @staticmethod
    def contains(outer: GridFace, inner: GridFace) -> bool:
        return outer.contains(inner)
