"""One-sided certificates for the level sets of a scalar field.

For a level ``p`` and an axis ``i`` the question is whether the fiber
``g = p`` connects the two ``i``-faces (``p`` in Conn_i(g)) and whether it
separates them (``p`` in Sep_i(g)).  Neither is decidable for a black-box
field, so every routine here answers "certified yes", "certified no" or
nothing, using per-cell value ranges:

``outer``            cells whose range contains p (cover the fiber)
``inner``            cells where the field is identically p
``strictly_below``   range entirely below p (inside ``g < p``)
``strictly_above``   range entirely above p
``below_outer``      range minimum below p (cover ``g < p``)
``above_outer``      range maximum above p

Each certificate is a topological fact about one of these cell unions,
computed by :mod:`connsep.topology`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .expr import ExprField, ScalarField, VertexField
from .grid import GridSpec, SoundnessError, UsageError
from .topology import CellSet, Chain, connects, separating_axes, spanning_axes


def _grid_k(f: ScalarField, k: int | None) -> int:
    if k is None:
        if isinstance(f, VertexField):
            return f.spec.k
        raise UsageError("a grid size k is required for expression fields")
    return int(k)


_RANGE_CACHE: dict = {}


def _ranges(f: ScalarField, k: int):
    key = (id(f), k)
    hit = _RANGE_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1], hit[2]
    lo, hi = f.cell_ranges(k)
    if len(_RANGE_CACHE) > 16:
        _RANGE_CACHE.clear()
    _RANGE_CACHE[key] = (f, lo, hi)
    return lo, hi


def cell_range(f: ScalarField, cell, k: int | None = None) -> tuple[float, float]:
    """Enclosure ``[lo, hi]`` of the field over one closed cell."""
    k = _grid_k(f, k)
    spec = GridSpec(f.n, k)
    lo, hi = _ranges(f, k)
    i = spec.flat(cell)
    return float(lo[i]), float(hi[i])


@dataclass(frozen=True)
class FiberBracket:
    level: float
    outer: CellSet
    inner: CellSet
    strictly_below: CellSet
    strictly_above: CellSet
    below_outer: CellSet
    above_outer: CellSet


def fiber_bracket(f: ScalarField, p: float, k: int | None = None) -> FiberBracket:
    k = _grid_k(f, k)
    spec = GridSpec(f.n, k)
    lo, hi = _ranges(f, k)
    return FiberBracket(
        level=float(p),
        outer=CellSet(spec, (lo <= p) & (p <= hi)),
        inner=CellSet(spec, (lo == p) & (hi == p)),
        strictly_below=CellSet(spec, hi < p),
        strictly_above=CellSet(spec, lo > p),
        below_outer=CellSet(spec, lo < p),
        above_outer=CellSet(spec, hi > p),
    )


# ---------------------------------------------------------------------------
# per-level certificates


class _Level:
    """Lazily evaluated certificates for one level, shared across axes."""

    def __init__(self, f: ScalarField, p: float, k: int):
        self.n = f.n
        self.b = fiber_bracket(f, p, k)
        self._span: dict = {}
        self._sep: dict = {}

    def spans(self, name: str, axis: int) -> bool:
        if name not in self._span:
            S = getattr(self.b, name)
            self._span[name] = spanning_axes(S, 0) if S else [False] * self.n
        return self._span[name][axis - 1]

    def separates(self, name: str, axis: int) -> bool:
        if name not in self._sep:
            S = getattr(self.b, name)
            self._sep[name] = separating_axes(S) if S else [False] * self.n
        return self._sep[name][axis - 1]

    def not_conn(self, i: int) -> bool:
        return not self.spans("outer", i)

    def sep(self, i: int) -> bool:
        if not self.spans("below_outer", i) and not self.spans("above_outer", i):
            return True
        if self.b.inner and self.separates("inner", i):
            return True
        # compact pieces on both sides of the fiber, each separating
        return (
            bool(self.b.strictly_below)
            and bool(self.b.strictly_above)
            and self.separates("strictly_below", i)
            and self.separates("strictly_above", i)
        )

    def not_sep(self, i: int) -> bool:
        return self.spans("strictly_below", i) or self.spans("strictly_above", i)

    def conn(self, i: int) -> bool:
        if self.n == 1:
            raise UsageError("positive Conn certificates need n >= 2")
        if self.b.inner and self.spans("inner", i):
            return True
        if self.spans("strictly_below", i) and self.spans("strictly_above", i):
            return True
        return all(self.sep(j) for j in range(1, self.n + 1) if j != i)

    def all_axes(self, axes) -> dict:
        """``{axis: (conn_in, conn_out, sep_in, sep_out)}`` with soundness checks."""
        out = {}
        for i in axes:
            c_out = self.not_conn(i)
            s_in = self.sep(i)
            s_out = self.not_sep(i)
            c_in = False if self.n == 1 else self.conn(i)
            if c_in and c_out:
                raise SoundnessError(
                    "level certified both in and out of Conn",
                    {"level": self.b.level, "axis": i},
                )
            if s_in and s_out:
                raise SoundnessError(
                    "level certified both in and out of Sep",
                    {"level": self.b.level, "axis": i},
                )
            out[i] = (c_in, c_out, s_in, s_out)
        if self.n == 2:
            # at n=2 a separating fiber for one axis connects the other
            for i in axes:
                if out[i][2] and not self.conn(3 - i):
                    raise SoundnessError("Sep certificate without the dual Conn certificate",
                                         {"level": self.b.level, "axis": i})
        return out


def _check_axis(f: ScalarField, i: int):
    if not 1 <= i <= f.n:
        raise UsageError(f"axis {i} out of range [1, {f.n}]")


def certify_not_conn(f: ScalarField, p: float, i: int, k: int | None = None) -> bool:
    """True only if ``p`` is certainly not in Conn_i(g)."""
    _check_axis(f, i)
    return _Level(f, p, _grid_k(f, k)).not_conn(i)


def certify_sep(f: ScalarField, p: float, i: int, k: int | None = None) -> bool:
    """True only if the fiber at ``p`` certainly separates the ``i``-faces."""
    _check_axis(f, i)
    return _Level(f, p, _grid_k(f, k)).sep(i)


def certify_not_sep(f: ScalarField, p: float, i: int, k: int | None = None) -> bool:
    _check_axis(f, i)
    return _Level(f, p, _grid_k(f, k)).not_sep(i)


def certify_conn(f: ScalarField, p: float, i: int, k: int | None = None) -> bool:
    """True only if the fiber at ``p`` certainly connects the ``i``-faces.

    Three routes: the field is identically ``p`` on a spanning cell set;
    both ``g < p`` and ``g > p`` contain spanning compact sets; or the fiber
    separates every other axis.
    """
    _check_axis(f, i)
    if f.n == 1:
        raise UsageError("positive Conn certificates need n >= 2")
    return _Level(f, p, _grid_k(f, k)).conn(i)


# ---------------------------------------------------------------------------
# scanning


def _merge_intervals(levels: np.ndarray, flags: np.ndarray) -> list:
    """Runs of consecutive flagged scan levels as closed ``[a, b]`` pairs."""
    out = []
    start = None
    for j, on in enumerate(flags):
        if on and start is None:
            start = j
        if not on and start is not None:
            out.append((float(levels[start]), float(levels[j - 1])))
            start = None
    if start is not None:
        out.append((float(levels[start]), float(levels[-1])))
    return out


@dataclass
class AxisBracket:
    """Certificates for one axis: boolean arrays indexed like ``levels``."""

    axis: int
    conn_in: np.ndarray
    conn_out: np.ndarray
    sep_in: np.ndarray
    sep_out: np.ndarray


NAMES = ("conn_in", "conn_out", "sep_in", "sep_out")


@dataclass
class CertifiedSets:
    levels: np.ndarray
    schedule: tuple
    dp: float
    axes: tuple
    by_k: dict  # k -> {axis: AxisBracket}
    nesting_violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def finest(self) -> int:
        return self.schedule[-1]

    def flags(self, axis: int, name: str, k: int | None = None) -> np.ndarray:
        k = self.finest if k is None else k
        return getattr(self.by_k[k][axis], name)

    def points(self, axis: int, name: str, k: int | None = None) -> np.ndarray:
        return self.levels[self.flags(axis, name, k)]

    def intervals(self, axis: int, name: str, k: int | None = None) -> list:
        return _merge_intervals(self.levels, self.flags(axis, name, k))

    @property
    def nested(self) -> bool:
        return not self.nesting_violations

    def to_dict(self) -> dict:
        per_k = {}
        for k in self.schedule:
            per_axis = {}
            for i in self.axes:
                per_axis[str(i)] = {
                    name: [[_fmt(a), _fmt(b)] for a, b in self.intervals(i, name, k)]
                    for name in NAMES
                }
            per_k[str(k)] = per_axis
        return {
            "schedule": list(self.schedule),
            "dp": self.dp,
            "num_levels": int(self.levels.size),
            "axes": list(self.axes),
            "certified": per_k,
            "nested": self.nested,
            "warnings": list(self.warnings),
        }


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def scan_levels(lo: float, hi: float, dp: float, extra=()) -> np.ndarray:
    """Multiples of ``dp`` inside ``[lo, hi]`` plus the endpoints and extras."""
    if dp <= 0:
        raise UsageError("scan resolution dp must be positive")
    m0, m1 = math.ceil(lo / dp - 1e-9), math.floor(hi / dp + 1e-9)
    grid = [round(m * dp, 12) for m in range(m0, m1 + 1)]
    pts = [v for v in grid if lo <= v <= hi] + [lo, hi]
    pts += [float(v) for v in extra if lo <= v <= hi]
    return np.unique(np.asarray(pts, dtype=float))


def _scan_chunk(f: ScalarField, k: int, levels, axes):
    return [_Level(f, float(p), k).all_axes(axes) for p in levels]


def _scan(f: ScalarField, k: int, levels: np.ndarray, axes, jobs: int) -> dict:
    if jobs > 1 and levels.size > jobs:
        chunks = np.array_split(levels, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_chunk, [f] * jobs, [k] * jobs, chunks, [axes] * jobs))
        rows = [r for part in parts for r in part]
    else:
        rows = _scan_chunk(f, k, levels, axes)
    out = {}
    for i in axes:
        arr = np.array([r[i] for r in rows], dtype=bool).reshape(-1, 4)
        out[i] = AxisBracket(i, *(arr[:, c].copy() for c in range(4)))
    return out


def _consistency(levels, flags_in, flags_out) -> bool:
    """No certified-out level between two certified-in levels."""
    idx = np.flatnonzero(flags_in)
    if idx.size < 2:
        return True
    return not flags_out[idx[0] : idx[-1] + 1].any()


def bracket_sets(
    f: ScalarField,
    axes=None,
    schedule=(8,),
    dp: float = 0.01,
    extra_levels=(),
    jobs: int = 1,
) -> CertifiedSets:
    """Scan levels and collect the four certified sets per axis and grid size.

    The same level list is used at every grid size so results can be
    compared; it holds the multiples of ``dp`` inside the coarsest range
    enclosure, that enclosure's endpoints, every vertex value for sampled
    fields and ``extra_levels``.
    """
    axes = tuple(range(1, f.n + 1)) if axes is None else tuple(int(a) for a in axes)
    for i in axes:
        _check_axis(f, i)
    schedule = tuple(int(k) for k in schedule)
    if not schedule or any(k < 1 for k in schedule) or list(schedule) != sorted(set(schedule)):
        raise UsageError("grid schedule must be a strictly increasing list of positive k")

    versions = {}
    for k in schedule:
        versions[k] = f.at(k) if isinstance(f, VertexField) else f
    lo, hi = _ranges(versions[schedule[0]], schedule[0])
    extra = list(extra_levels)
    for k in schedule:
        if isinstance(versions[k], VertexField):
            extra += np.unique(versions[k].values).tolist()
    levels = scan_levels(float(lo.min()), float(hi.max()), dp, extra)

    by_k = {k: _scan(versions[k], k, levels, axes, jobs) for k in schedule}
    result = CertifiedSets(levels, schedule, float(dp), axes, by_k)

    for k in schedule:
        for i in axes:
            b = by_k[k][i]
            for a, c in (("conn_in", "conn_out"), ("sep_in", "sep_out")):
                if not _consistency(levels, getattr(b, a), getattr(b, c)):
                    raise SoundnessError(
                        f"{a} is not an interval at axis {i}, k={k}",
                        {"levels": levels.tolist(), a: getattr(b, a).tolist(),
                         c: getattr(b, c).tolist()},
                    )
    for k0, k1 in zip(schedule, schedule[1:]):
        for i in axes:
            for name in NAMES:
                lost = by_k[k0][i].__dict__[name] & ~by_k[k1][i].__dict__[name]
                if lost.any():
                    result.nesting_violations.append(
                        {"axis": i, "set": name, "from_k": k0, "to_k": k1,
                         "levels": levels[lost].tolist()}
                    )
    for i in axes:
        b = by_k[schedule[-1]][i]
        if not (b.conn_in.any() or b.sep_in.any()):
            result.warnings.append(f"axis {i}: undetermined (no positive certificate)")
    return result


# ---------------------------------------------------------------------------
# Poincare-Miranda style checks


def _face_range(f: ScalarField, axis: int, side: int, k: int) -> tuple[float, float]:
    """Range enclosure of the field over the face ``x_axis = side``."""
    if isinstance(f, VertexField):
        g = f.at(k).grid() if k != f.spec.k else f.grid()
        face = np.take(g, 0 if side == 0 else -1, axis=axis - 1)
        return float(face.min()), float(face.max())
    spec = GridSpec(f.n, k)
    from .expr import _cell_boxes

    lo, hi = _cell_boxes(f.n, k)
    sel = spec.index_array()[:, axis - 1] == (1 if side == 0 else k)
    blo, bhi = lo[sel].copy(), hi[sel].copy()
    blo[:, axis - 1] = bhi[:, axis - 1] = float(side)
    r = f.expr.range(blo, bhi)
    return float(np.min(r.lo)), float(np.max(r.hi))


def pm_sign_check(f: ScalarField, i: int, p: float, k: int | None = None) -> bool:
    """``g <= p`` on one ``i``-face and ``g >= p`` on the other, verified by ranges."""
    _check_axis(f, i)
    k = _grid_k(f, k)
    lo0, hi0 = _face_range(f, i, 0, k)
    lo1, hi1 = _face_range(f, i, 1, k)
    return (hi0 <= p <= lo1) or (hi1 <= p <= lo0)


def pm_product_witness(fields, levels, sigma, i0: int, k: int) -> Chain:
    """Chain across axis ``i0`` inside the intersection of the outer fibers.

    ``sigma[j]`` is the axis separated by ``fields[j]`` at ``levels[j]``.
    Each separation must be certified first; the intersection of the true
    fibers then connects the ``i0``-faces, and so does any cell cover of it.
    """
    fields, levels, sigma = list(fields), list(levels), [int(s) for s in sigma]
    if not fields:
        raise UsageError("need n-1 fields")
    n = fields[0].n
    if len(fields) != n - 1 or len(levels) != n - 1 or len(sigma) != n - 1:
        raise UsageError(f"need exactly n-1={n - 1} fields, levels and axes")
    if any(g.n != n for g in fields):
        raise UsageError("fields live in different dimensions")
    if not 1 <= i0 <= n or sorted(sigma + [i0]) != list(range(1, n + 1)):
        raise UsageError("sigma must be a bijection onto the axes other than i0")
    spec = GridSpec(n, k)
    mask = np.ones(spec.num_cells, dtype=bool)
    for j, (g, p, ax) in enumerate(zip(fields, levels, sigma)):
        if not certify_sep(g, p, ax, k):
            raise UsageError(f"field {j + 1} is not certified to separate axis {ax} at level {p}")
        mask &= fiber_bracket(g, p, k).outer.mask
    chain = connects(CellSet(spec, mask), i0, 0)
    if chain is None:
        raise SoundnessError(
            "outer fiber intersection does not connect",
            {"levels": levels, "sigma": sigma, "i0": i0, "k": k},
        )
    return chain
