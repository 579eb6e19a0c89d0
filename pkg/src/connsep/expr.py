"""Scalar fields on the unit cube: closed-form expression trees and vertex samples.

:class:`ExprField` wraps a small expression tree (constants, coordinates,
``+ - *``, ``min``/``max``, ``abs``, point-to-segment distance and
piecewise-linear ramps).  Every node can be evaluated pointwise and over
axis-aligned boxes; box evaluation is interval arithmetic with outward
rounding so the enclosure always contains the true range.

Rounding is directed only where it matters: sums that happen to be exact
(detected with the TwoSum error term) are not widened, and ramps return
their knot values exactly in clamped regions.  This keeps "flat" regions of
synthesized fields exactly flat, which is what makes level certificates at
those values possible.

:class:`VertexField` stores samples on the ``(k+1)^n`` vertex lattice and
is read as the multilinear interpolant; its cell ranges are exact.
"""
from __future__ import annotations

import json
from functools import lru_cache

import numpy as np

from .grid import GridSpec, UsageError

_INF = np.inf


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _two_sum_err(a, b, s):
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _add_down(a, b):
    s = a + b
    err = _two_sum_err(a, b, s)
    return np.where(err < 0, _down(s), s)


def _add_up(a, b):
    s = a + b
    err = _two_sum_err(a, b, s)
    return np.where(err > 0, _up(s), s)


class Interval:
    """Vectorised closed interval ``[lo, hi]`` (arrays of equal shape)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=float)
        hi = lo if hi is None else np.asarray(hi, dtype=float)
        self.lo, self.hi = np.broadcast_arrays(lo, hi)

    def __add__(self, other):
        return Interval(_add_down(self.lo, other.lo), _add_up(self.hi, other.hi))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        prods = np.stack(
            [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        )
        lo, hi = prods.min(axis=0), prods.max(axis=0)
        # products involving an exact zero are exact; the rest get one ulp
        exact_lo = lo == 0
        exact_hi = hi == 0
        return Interval(np.where(exact_lo, lo, _down(lo)), np.where(exact_hi, hi, _up(hi)))

    def abs(self):
        lo = np.where(self.lo >= 0, self.lo, np.where(self.hi <= 0, -self.hi, 0.0))
        hi = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return Interval(lo, hi)

    def square(self):
        a = self.abs()
        lo = a.lo * a.lo
        hi = a.hi * a.hi
        return Interval(np.where(lo == 0, lo, _down(lo)), np.where(hi == 0, hi, _up(hi)))

    def sqrt(self):
        lo = np.sqrt(np.maximum(self.lo, 0.0))
        hi = np.sqrt(np.maximum(self.hi, 0.0))
        return Interval(np.where(lo == 0, lo, _down(lo)), np.where(hi == 0, hi, _up(hi)))

    @staticmethod
    def minimum(parts):
        return Interval(
            np.minimum.reduce([p.lo for p in parts]), np.minimum.reduce([p.hi for p in parts])
        )

    @staticmethod
    def maximum(parts):
        return Interval(
            np.maximum.reduce([p.lo for p in parts]), np.maximum.reduce([p.hi for p in parts])
        )


# ---------------------------------------------------------------------------
# expression nodes


class Node:
    op = "?"

    def eval(self, X: np.ndarray) -> np.ndarray:  # X: (m, n)
        raise NotImplementedError

    def range(self, lo: np.ndarray, hi: np.ndarray) -> Interval:  # boxes (m, n)
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def max_axis(self) -> int:
        return max((c.max_axis() for c in self.children()), default=0)

    def children(self):
        return ()

    # operator sugar for building trees
    def __add__(self, other):
        return Add([self, _lift(other)])

    def __radd__(self, other):
        return Add([_lift(other), self])

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __neg__(self):
        return Neg(self)


def _lift(x) -> Node:
    return x if isinstance(x, Node) else Const(float(x))


class Const(Node):
    op = "const"

    def __init__(self, value: float):
        self.value = float(value)

    def eval(self, X):
        return np.full(X.shape[0], self.value)

    def range(self, lo, hi):
        return Interval(np.full(lo.shape[0], self.value))

    def to_dict(self):
        return {"op": "const", "value": self.value}


class Coord(Node):
    op = "coord"

    def __init__(self, axis: int):
        if axis < 1:
            raise UsageError(f"coordinate axis must be >= 1, got {axis}")
        self.axis = int(axis)

    def eval(self, X):
        return X[:, self.axis - 1].astype(float)

    def range(self, lo, hi):
        return Interval(lo[:, self.axis - 1], hi[:, self.axis - 1])

    def max_axis(self):
        return self.axis

    def to_dict(self):
        return {"op": "coord", "axis": self.axis}


class Add(Node):
    op = "add"

    def __init__(self, args):
        self.args = [_lift(a) for a in args]
        if not self.args:
            raise UsageError("add needs at least one argument")

    def children(self):
        return self.args

    def eval(self, X):
        out = self.args[0].eval(X)
        for a in self.args[1:]:
            out = out + a.eval(X)
        return out

    def range(self, lo, hi):
        out = self.args[0].range(lo, hi)
        for a in self.args[1:]:
            out = out + a.range(lo, hi)
        return out

    def to_dict(self):
        return {"op": "add", "args": [a.to_dict() for a in self.args]}


class Sub(Node):
    op = "sub"

    def __init__(self, a, b):
        self.a, self.b = _lift(a), _lift(b)

    def children(self):
        return (self.a, self.b)

    def eval(self, X):
        return self.a.eval(X) - self.b.eval(X)

    def range(self, lo, hi):
        return self.a.range(lo, hi) - self.b.range(lo, hi)

    def to_dict(self):
        return {"op": "sub", "args": [self.a.to_dict(), self.b.to_dict()]}


class Mul(Node):
    op = "mul"

    def __init__(self, a, b):
        self.a, self.b = _lift(a), _lift(b)

    def children(self):
        return (self.a, self.b)

    def eval(self, X):
        return self.a.eval(X) * self.b.eval(X)

    def range(self, lo, hi):
        return self.a.range(lo, hi) * self.b.range(lo, hi)

    def to_dict(self):
        return {"op": "mul", "args": [self.a.to_dict(), self.b.to_dict()]}


class Neg(Node):
    op = "neg"

    def __init__(self, a):
        self.a = _lift(a)

    def children(self):
        return (self.a,)

    def eval(self, X):
        return -self.a.eval(X)

    def range(self, lo, hi):
        return -self.a.range(lo, hi)

    def to_dict(self):
        return {"op": "neg", "arg": self.a.to_dict()}


class Abs(Node):
    op = "abs"

    def __init__(self, a):
        self.a = _lift(a)

    def children(self):
        return (self.a,)

    def eval(self, X):
        return np.abs(self.a.eval(X))

    def range(self, lo, hi):
        return self.a.range(lo, hi).abs()

    def to_dict(self):
        return {"op": "abs", "arg": self.a.to_dict()}


class Min(Node):
    op = "min"

    def __init__(self, args):
        self.args = [_lift(a) for a in args]
        if not self.args:
            raise UsageError("min needs at least one argument")

    def children(self):
        return self.args

    def eval(self, X):
        return np.minimum.reduce([a.eval(X) for a in self.args])

    def range(self, lo, hi):
        return Interval.minimum([a.range(lo, hi) for a in self.args])

    def to_dict(self):
        return {"op": self.op, "args": [a.to_dict() for a in self.args]}


class Max(Min):
    op = "max"

    def eval(self, X):
        return np.maximum.reduce([a.eval(X) for a in self.args])

    def range(self, lo, hi):
        return Interval.maximum([a.range(lo, hi) for a in self.args])


class SegDist(Node):
    """Euclidean distance to an axis-aligned segment.

    The segment runs along ``axis`` from ``start`` to ``stop``; every other
    coordinate is fixed at ``point[s]``.  Restricting to axis-aligned
    segments makes the squared distance separable, so the box range is the
    exact range of a sum of one-variable terms.
    """

    op = "segdist"

    def __init__(self, point, axis: int, start: float, stop: float):
        self.point = tuple(float(v) for v in point)
        self.axis = int(axis)
        if not 1 <= self.axis <= len(self.point):
            raise UsageError(f"segment axis {axis} out of range")
        if start > stop:
            raise UsageError("segment start must not exceed stop")
        self.start, self.stop = float(start), float(stop)

    def max_axis(self):
        return len(self.point)

    def eval(self, X):
        a = self.axis - 1
        total = np.zeros(X.shape[0])
        for s, c in enumerate(self.point):
            if s == a:
                gap = np.maximum(0.0, np.maximum(self.start - X[:, s], X[:, s] - self.stop))
            else:
                gap = X[:, s] - c
            total = total + gap * gap
        return np.sqrt(total)

    def range(self, lo, hi):
        a = self.axis - 1
        m = lo.shape[0]
        total = Interval(np.zeros(m))
        for s, c in enumerate(self.point):
            if s == a:
                # gap = max(0, start - x, x - stop), monotone pieces
                below = Interval(self.start) - Interval(hi[:, s], lo[:, s])
                above = Interval(lo[:, s], hi[:, s]) - Interval(self.stop)
                g_lo = np.maximum(0.0, np.maximum(below.lo, above.lo))
                g_hi = np.maximum(0.0, np.maximum(below.hi, above.hi))
                term = Interval(g_lo, g_hi).square()
            else:
                term = (Interval(lo[:, s], hi[:, s]) - Interval(c)).square()
            total = total + term
        return total.sqrt()

    def to_dict(self):
        return {
            "op": "segdist",
            "point": list(self.point),
            "axis": self.axis,
            "start": self.start,
            "stop": self.stop,
        }


class Ramp(Node):
    """Piecewise-linear function of its argument, constant outside the knots."""

    op = "ramp"

    def __init__(self, arg, xs, ys):
        self.arg = _lift(arg)
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        if self.xs.ndim != 1 or self.xs.shape != self.ys.shape or self.xs.size < 1:
            raise UsageError("ramp needs matching 1-D knot and value lists")
        if np.any(np.diff(self.xs) <= 0):
            raise UsageError("ramp knots must be strictly increasing")

    def children(self):
        return (self.arg,)

    def _point(self, t):
        """Value at ``t`` with a lower and upper bound accounting for rounding."""
        xs, ys = self.xs, self.ys
        val = np.interp(t, xs, ys)
        lo, hi = val.copy(), val.copy()
        if xs.size == 1:
            return lo, hi
        seg = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, xs.size - 2)
        inside = (t > xs[0]) & (t < xs[-1])
        onknot = np.isin(t, xs)
        y0, y1 = ys[seg], ys[seg + 1]
        x0, x1 = xs[seg], xs[seg + 1]
        u = (t - x0) / (x1 - x0)
        v = y0 + u * (y1 - y0)
        w = 8 * np.finfo(float).eps * (np.abs(y0) + np.abs(y1))
        smin, smax = np.minimum(y0, y1), np.maximum(y0, y1)
        interior = inside & ~onknot
        lo = np.where(interior, np.clip(v - w, smin, smax), lo)
        hi = np.where(interior, np.clip(v + w, smin, smax), hi)
        # knots and clamped regions are exact
        exact = ~interior
        knot_val = np.interp(t, xs, ys)
        lo = np.where(exact, knot_val, lo)
        hi = np.where(exact, knot_val, hi)
        return lo, hi

    def eval(self, X):
        return np.interp(self.arg.eval(X), self.xs, self.ys)

    def range(self, lo, hi):
        r = self.arg.range(lo, hi)
        a_lo, a_hi = self._point(r.lo)
        b_lo, b_hi = self._point(r.hi)
        out_lo = np.minimum(a_lo, b_lo)
        out_hi = np.maximum(a_hi, b_hi)
        for x, y in zip(self.xs, self.ys):
            mid = (r.lo < x) & (x < r.hi)
            out_lo = np.where(mid, np.minimum(out_lo, y), out_lo)
            out_hi = np.where(mid, np.maximum(out_hi, y), out_hi)
        return Interval(out_lo, out_hi)

    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs) if self.xs.size > 1 else np.zeros(0)

    def to_dict(self):
        return {
            "op": "ramp",
            "arg": self.arg.to_dict(),
            "xs": self.xs.tolist(),
            "ys": self.ys.tolist(),
        }


def node_from_dict(d: dict) -> Node:
    """Rebuild an expression tree from its JSON form."""
    if not isinstance(d, dict) or "op" not in d:
        raise UsageError(f"expression node must be an object with 'op', got {d!r}")
    op = d["op"]
    try:
        if op == "const":
            return Const(d["value"])
        if op == "coord":
            return Coord(d["axis"])
        if op == "add":
            return Add([node_from_dict(a) for a in d["args"]])
        if op == "sub":
            a, b = d["args"]
            return Sub(node_from_dict(a), node_from_dict(b))
        if op == "mul":
            a, b = d["args"]
            return Mul(node_from_dict(a), node_from_dict(b))
        if op == "neg":
            return Neg(node_from_dict(d["arg"]))
        if op == "abs":
            return Abs(node_from_dict(d["arg"]))
        if op == "min":
            return Min([node_from_dict(a) for a in d["args"]])
        if op == "max":
            return Max([node_from_dict(a) for a in d["args"]])
        if op == "segdist":
            return SegDist(d["point"], d["axis"], d["start"], d["stop"])
        if op == "ramp":
            return Ramp(node_from_dict(d["arg"]), d["xs"], d["ys"])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed {op!r} node: {exc}") from exc
    raise UsageError(f"unknown expression op {op!r}")


# ---------------------------------------------------------------------------
# fields


@lru_cache(maxsize=32)
def _cell_boxes(n: int, k: int):
    """Lower/upper corners of every cell in flat order.

    ``j/k`` is exact when k is a power of two; otherwise the corners are
    pushed outward by one ulp so the float box still covers the real cell.
    """
    idx = GridSpec(n, k).index_array()
    lo = (idx - 1) / k
    hi = idx / k
    if k & (k - 1):
        lo = np.maximum(np.where(lo > 0, _down(lo), lo), 0.0)
        hi = np.minimum(np.where(hi < 1, _up(hi), hi), 1.0)
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


class ScalarField:
    """Common interface: ``n``, pointwise ``__call__`` and per-cell ``cell_ranges``."""

    n: int

    def __call__(self, x) -> float | np.ndarray:
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n:
            raise UsageError(f"points must have {self.n} coordinates")
        if np.any(X < 0) or np.any(X > 1):
            raise UsageError("point outside the unit cube")
        out = self._eval(X)
        return float(out[0]) if single else out

    def _eval(self, X):
        raise NotImplementedError

    def cell_ranges(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


class ExprField(ScalarField):
    """A scalar field given by an expression tree over ``x_1..x_n``."""

    def __init__(self, n: int, expr: Node):
        if n < 1:
            raise UsageError("dimension must be >= 1")
        if expr.max_axis() > n:
            raise UsageError(f"expression uses axis {expr.max_axis()} but n={n}")
        self.n = int(n)
        self.expr = expr

    def _eval(self, X):
        return self.expr.eval(X)

    def box_range(self, lo, hi) -> tuple[float, float]:
        lo = np.asarray(lo, dtype=float).reshape(1, -1)
        hi = np.asarray(hi, dtype=float).reshape(1, -1)
        r = self.expr.range(lo, hi)
        return float(r.lo[0]), float(r.hi[0])

    def cell_ranges(self, k: int):
        lo, hi = _cell_boxes(self.n, k)
        r = self.expr.range(lo, hi)
        return np.asarray(r.lo, dtype=float), np.asarray(r.hi, dtype=float)

    def to_dict(self) -> dict:
        return {"type": "expr", "n": self.n, "expr": self.expr.to_dict()}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _vertex_index(n: int, k: int) -> np.ndarray:
    """``((k+1)^n, n)`` integer vertex coordinates, axis 1 fastest."""
    return GridSpec(n, k + 1).index_array() - 1


class VertexField(ScalarField):
    """Samples on the vertex lattice, read as the multilinear interpolant."""

    def __init__(self, spec: GridSpec, values, source=None):
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape[0] != spec.num_vertices:
            raise UsageError(
                f"vertex field has {values.shape[0]} values, expected {spec.num_vertices}"
            )
        if not np.all(np.isfinite(values)):
            raise UsageError("vertex values must be finite")
        values.setflags(write=False)
        self.spec = spec
        self.n = spec.n
        self.values = values
        self.source = source  # callable used for resampling, if any

    @classmethod
    def sample(cls, func, n: int, k: int) -> "VertexField":
        """Sample ``func`` (vectorised over an ``(m, n)`` array) at the vertices."""
        V = _vertex_index(n, k) / k
        vals = np.asarray(func(V), dtype=float).reshape(-1)
        return cls(GridSpec(n, k), vals, source=func)

    def grid(self) -> np.ndarray:
        return self.values.reshape((self.spec.k + 1,) * self.n, order="F")

    def _eval(self, X):
        from scipy.interpolate import RegularGridInterpolator

        axis = np.linspace(0.0, 1.0, self.spec.k + 1)
        interp = RegularGridInterpolator((axis,) * self.n, self.grid(), method="linear")
        return interp(X)

    def corner_values(self) -> np.ndarray:
        """``(k^n, 2^n)`` corner samples of every cell."""
        g = self.grid()
        k = self.spec.k
        cols = []
        for bits in np.ndindex(*(2,) * self.n):
            sl = tuple(slice(b, b + k) for b in bits)
            cols.append(g[sl].reshape(-1, order="F"))
        return np.stack(cols, axis=1)

    def cell_ranges(self, k: int | None = None):
        if k is not None and k != self.spec.k:
            return self.at(k).cell_ranges()
        c = self.corner_values()
        return c.min(axis=1), c.max(axis=1)

    def at(self, k: int) -> "VertexField":
        """This field on a ``k``-grid: resampled from the source, else refined."""
        if k == self.spec.k:
            return self
        if self.source is not None:
            return VertexField.sample(self.source, self.n, k)
        if k % self.spec.k:
            raise UsageError(f"without a source, k={k} must be a multiple of {self.spec.k}")
        V = _vertex_index(self.n, k) / k
        vals = self._eval(V)
        return VertexField(GridSpec(self.n, k), vals)

    def to_dict(self) -> dict:
        return {"type": "vertex", "n": self.n, "k": self.spec.k, "values": self.values.tolist()}


def field_from_dict(d: dict) -> ScalarField:
    kind = d.get("type")
    if kind is None:
        kind = "expr" if "expr" in d else "vertex"
    if kind == "expr":
        if "n" not in d or "expr" not in d:
            raise UsageError("expression field needs 'n' and 'expr'")
        return ExprField(int(d["n"]), node_from_dict(d["expr"]))
    if kind == "vertex":
        for key in ("n", "k", "values"):
            if key not in d:
                raise UsageError(f"vertex field missing {key!r}")
        return VertexField(GridSpec(int(d["n"]), int(d["k"])), d["values"])
    raise UsageError(f"unknown field type {kind!r}")


def x(axis: int) -> Coord:
    """Shorthand for the coordinate node ``x_axis``."""
    return Coord(axis)
