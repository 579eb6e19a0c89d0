"""Build a scalar field with prescribed Conn_i / Sep_i level sets.

A :class:`ConnSepSpec` lists, for every axis ``i``, the wanted sets
``A_i = Conn_i(g)`` and ``B_i = Sep_i(g)``; each is empty, a point or a
closed interval.  :func:`validate_spec` checks the five necessary and
sufficient conditions, :func:`build_function` writes down an explicit
field as an :class:`~connsep.expr.ExprField`:

* n = 2 with an empty ``A_i``: a linear ramp along axis ``i``.
* n = 2 otherwise: a constant.
* n >= 3 with an empty ``A_i``: a ramp in ``x_i`` on the far half of the
  cube plus, for every other axis ``j``, a thin tube around a segment
  spanning axis ``j`` on which the field sweeps through ``A_j``.
* n >= 3 with every ``A_i`` nonempty: the constant ``p`` plus tubes for
  the axes whose ``A_j`` is a genuine interval.

Tube distances are Euclidean.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .expr import Add, Const, Coord, ExprField, Ramp, SegDist
from .grid import UsageError


@dataclass(frozen=True)
class LevelSet:
    """A prescribed subset of R: empty, a point or ``[lo, hi]`` with lo < hi."""

    lo: float | None = None
    hi: float | None = None

    @classmethod
    def parse(cls, v) -> "LevelSet":
        if v is None:
            return cls()
        if isinstance(v, (int, float)):
            return cls(float(v), float(v))
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return cls(float(v[0]), float(v[1]))
        raise UsageError(f"level set must be null, a number or [lo, hi], got {v!r}")

    @property
    def empty(self) -> bool:
        return self.lo is None

    @property
    def point(self) -> bool:
        return not self.empty and self.lo == self.hi

    @property
    def interval(self) -> bool:
        return not self.empty and self.lo < self.hi

    def well_formed(self) -> bool:
        if self.empty:
            return self.hi is None
        return (
            self.hi is not None
            and math.isfinite(self.lo)
            and math.isfinite(self.hi)
            and self.lo <= self.hi
        )

    def __contains__(self, p: float) -> bool:
        return not self.empty and self.lo <= p <= self.hi

    def issubset(self, other: "LevelSet") -> bool:
        if self.empty:
            return True
        return not other.empty and other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "LevelSet") -> "LevelSet":
        if self.empty or other.empty:
            return LevelSet()
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return LevelSet(lo, hi) if lo <= hi else LevelSet()

    def to_json(self):
        if self.empty:
            return None
        if self.point:
            return self.lo
        return [self.lo, self.hi]

    def __str__(self) -> str:
        if self.empty:
            return "{}"
        if self.point:
            return f"{{{self.lo:g}}}"
        return f"[{self.lo:g}, {self.hi:g}]"


@dataclass(frozen=True)
class ConnSepSpec:
    n: int
    A: tuple
    B: tuple

    @classmethod
    def make(cls, A, B) -> "ConnSepSpec":
        A = tuple(a if isinstance(a, LevelSet) else LevelSet.parse(a) for a in A)
        B = tuple(b if isinstance(b, LevelSet) else LevelSet.parse(b) for b in B)
        if len(A) != len(B):
            raise UsageError("A and B must list the same number of axes")
        return cls(len(A), A, B)

    @classmethod
    def from_dict(cls, d: dict) -> "ConnSepSpec":
        for key in ("n", "A", "B"):
            if key not in d:
                raise UsageError(f"spec missing {key!r}")
        spec = cls.make(d["A"], d["B"])
        if spec.n != int(d["n"]):
            raise UsageError(f"spec declares n={d['n']} but lists {spec.n} axes")
        for s in spec.A + spec.B:
            if not s.empty and not (0.0 <= s.lo <= 1.0 and 0.0 <= s.hi <= 1.0):
                raise UsageError("prescribed endpoints must lie in [0, 1]")
        return spec

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "A": [a.to_json() for a in self.A],
            "B": [b.to_json() for b in self.B],
        }


@dataclass(frozen=True)
class Violation:
    condition: int
    axis: int | None
    detail: str

    def to_dict(self) -> dict:
        return {"condition": self.condition, "axis": self.axis, "detail": self.detail}


def _common(sets) -> LevelSet:
    out = LevelSet(-math.inf, math.inf)
    for s in sets:
        out = out.intersect(s)
    return out


def validate_spec(spec: ConnSepSpec) -> Violation | None:
    """First violated condition, or ``None`` when the data is realizable."""
    n = spec.n
    if n < 2:
        raise UsageError("prescribed Conn/Sep data is only supported for n >= 2")
    for i in range(n):
        for name, s in (("A", spec.A[i]), ("B", spec.B[i])):
            if not s.well_formed():
                return Violation(1, i + 1, f"{name}_{i + 1} is not empty, a point or an interval")
    for i in range(n):
        a, b = spec.A[i], spec.B[i]
        if a.empty and not b.interval:
            return Violation(2, i + 1, f"A_{i + 1} is empty but B_{i + 1} = {b} is not an interval")
        if a.point and b != a:
            return Violation(2, i + 1, f"A_{i + 1} = {a} is a point but B_{i + 1} = {b}")
        if a.interval and not b.empty:
            return Violation(2, i + 1, f"A_{i + 1} = {a} is an interval but B_{i + 1} = {b}")
    for i in range(n):
        others = _common(spec.A[j] for j in range(n) if j != i)
        if not spec.B[i].issubset(others):
            return Violation(3, i + 1, f"B_{i + 1} = {spec.B[i]} is not inside the other A_j")
    if all(not a.empty for a in spec.A) and _common(spec.A).empty:
        return Violation(4, None, "the A_i are nonempty but have no common point")
    if n == 2 and (spec.A[0] != spec.B[1] or spec.A[1] != spec.B[0]):
        return Violation(5, None, "for n=2 need A_1 = B_2 and A_2 = B_1")
    return None


@dataclass
class SynthesizedField:
    spec: ConnSepSpec
    field: ExprField
    branch: str  # "n2-linear" | "n2-constant" | "empty-axis" | "all-nonempty"
    permutation: tuple  # construction axis s is the real axis permutation[s-1]
    elements: list = field(default_factory=list)
    lipschitz_bound: float = 0.0
    special_levels: tuple = ()

    def __call__(self, x):
        return evaluate(self, x)

    def provenance(self) -> dict:
        return {
            "branch": self.branch,
            "permutation": list(self.permutation),
            "elements": self.elements,
            "lipschitz_bound": self.lipschitz_bound,
            "special_levels": list(self.special_levels),
        }

    def to_dict(self) -> dict:
        out = self.field.to_dict()
        out["spec"] = self.spec.to_dict()
        out["provenance"] = self.provenance()
        return out


def evaluate(sf: SynthesizedField, x) -> float:
    """Value of the synthesized field at a point of the unit cube."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sf.spec.n,):
        raise UsageError(f"point must have {sf.spec.n} coordinates")
    if np.any(x < 0) or np.any(x > 1) or not np.all(np.isfinite(x)):
        raise UsageError(f"point {x.tolist()} is outside the unit cube")
    return float(sf.field(x))


def _tube(point, axis, radius, v_axis, v_mid, base):
    """Ramp on the distance to a segment: ``v_axis`` on it, ``v_mid`` at radius/2, ``base`` at radius."""
    dist = SegDist(point, axis, 0.0, 1.0)
    return Ramp(dist, [0.0, radius / 2, radius], [v_axis - base, v_mid - base, 0.0])


def _segment_gap(p, ax_p, q, ax_q) -> float:
    """Distance between two full-length axis-parallel segments of the unit cube."""
    total = 0.0
    for s in range(len(p)):
        if s in (ax_p - 1, ax_q - 1):
            continue
        total += (p[s] - q[s]) ** 2
    return math.sqrt(total)


def _check_tubes(tubes, n, slab_from=None):
    """Tubes must be disjoint, miss the slab and touch only their own faces."""
    for t in tubes:
        for s in range(n):
            if s == t["axis"] - 1:
                continue
            c = t["point"][s]
            if not (c - t["radius"] > 0 and c + t["radius"] < 1):
                raise UsageError(f"tube around axis {t['axis']} reaches a foreign face")
        if slab_from is not None:
            ax, start = slab_from
            if t["point"][ax - 1] + t["radius"] >= start:
                raise UsageError(f"tube around axis {t['axis']} meets the ramp slab")
    for t, u in itertools.combinations(tubes, 2):
        gap = _segment_gap(t["point"], t["axis"], u["point"], u["axis"])
        if gap <= t["radius"] + u["radius"]:
            raise UsageError(f"tubes for axes {t['axis']} and {u['axis']} overlap")


def build_function(spec: ConnSepSpec) -> SynthesizedField:
    """Explicit field realizing the prescribed sets (see module docstring)."""
    bad = validate_spec(spec)
    if bad is not None:
        raise UsageError(f"spec violates condition ({bad.condition}): {bad.detail}")
    n = spec.n
    empties = [i + 1 for i in range(n) if spec.A[i].empty]
    if len(empties) > 1:
        raise UsageError(f"more than one empty A_i ({empties}); conditions should exclude this")
    ident = tuple(range(1, n + 1))

    if n == 2:
        if empties:
            i = empties[0]
            other = spec.A[2 - i]
            a, b = other.lo, other.hi
            expr = Add([Const(a), Coord(i) * (b - a)])
            perm = (i, 3 - i)
            return SynthesizedField(
                spec, ExprField(2, expr), "n2-linear", perm,
                [{"kind": "linear", "axis": i, "from": a, "to": b}],
                abs(b - a), (a, b),
            )
        p = spec.A[0].lo
        return SynthesizedField(
            spec, ExprField(2, Const(p)), "n2-constant", ident,
            [{"kind": "constant", "value": p}], 0.0, (p,),
        )

    if empties:
        i = empties[0]
        perm = list(ident)
        perm[0], perm[i - 1] = perm[i - 1], perm[0]
        perm = tuple(perm)
        bl, br = spec.B[i - 1].lo, spec.B[i - 1].hi
        terms = [Ramp(Coord(perm[0]), [0.5, 1.0], [bl, br])]
        elements = [{"kind": "slab", "axis": perm[0], "from": 0.5, "values": [bl, br]}]
        lip = (br - bl) / 0.5
        specials = {bl, br}
        tubes = []
        for j in range(2, n + 1):
            real = perm[j - 1]
            a = spec.A[real - 1]
            point = [0.5] * n
            point[perm[0] - 1] = 0.5**j
            point[real - 1] = 0.0
            r = 0.2**j
            terms.append(_tube(point, real, r, a.hi, a.lo, bl))
            tubes.append({"kind": "tube", "axis": real, "point": point, "radius": r,
                          "values": [a.hi, a.lo, bl]})
            lip += max(abs(a.hi - a.lo), abs(a.lo - bl)) / (r / 2)
            specials |= {a.lo, a.hi}
        _check_tubes(tubes, n, slab_from=(perm[0], 0.5))
        return SynthesizedField(
            spec, ExprField(n, Add(terms)), "empty-axis", perm, elements + tubes,
            lip, tuple(sorted(specials)),
        )

    singles = [a for a in spec.A if a.point]
    if singles:
        p = singles[0].lo
    else:
        common = _common(spec.A)
        p = 0.5 * (common.lo + common.hi)
    terms = [Const(p)]
    tubes = []
    lip = 0.0
    specials = {p}
    for j in range(1, n + 1):
        a = spec.A[j - 1]
        if not a.interval:
            continue
        point = [0.5**j] * n
        point[j - 1] = 0.0
        r = 0.2**j
        terms.append(_tube(point, j, r, a.hi, a.lo, p))
        tubes.append({"kind": "tube", "axis": j, "point": point, "radius": r,
                      "values": [a.hi, a.lo, p]})
        lip += max(abs(a.hi - a.lo), abs(a.lo - p)) / (r / 2)
        specials |= {a.lo, a.hi}
    _check_tubes(tubes, n)
    expr = Add(terms) if len(terms) > 1 else terms[0]
    return SynthesizedField(
        spec, ExprField(n, expr), "all-nonempty", ident,
        [{"kind": "constant", "value": p}] + tubes, lip, tuple(sorted(specials)),
    )


# ---------------------------------------------------------------------------
# round trip against the analyzer


@dataclass
class RoundTrip:
    violations: list
    uncovered_sep: list  # B-interior levels not sep-certified at the finest k
    nested: bool
    positive_axes: dict  # axis -> bool, some Conn or Sep certificate at the finest k
    certified: object = None

    @property
    def ok(self) -> bool:
        return not self.violations and not self.uncovered_sep and self.nested

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": self.violations[:20],
            "num_violations": len(self.violations),
            "uncovered_sep": self.uncovered_sep[:20],
            "nested": self.nested,
            "positive_axes": {str(k): v for k, v in self.positive_axes.items()},
        }


def verify_round_trip(sf: SynthesizedField, schedule=(16, 32, 64), dp: float = 0.01,
                      jobs: int = 1) -> RoundTrip:
    """Analyze the built field and compare every certificate with the prescription."""
    from .scalar_field import bracket_sets

    cs = bracket_sets(sf.field, None, schedule, dp, extra_levels=sf.special_levels, jobs=jobs)
    spec = sf.spec
    violations = []
    for k in cs.schedule:
        for i in cs.axes:
            A, B = spec.A[i - 1], spec.B[i - 1]
            for name, target, inside in (
                ("conn_in", A, True), ("conn_out", A, False),
                ("sep_in", B, True), ("sep_out", B, False),
            ):
                for p in cs.points(i, name, k):
                    if (float(p) in target) != inside:
                        violations.append({"k": k, "axis": i, "set": name, "level": float(p)})
    kmax = cs.finest
    margin = 2.0 / kmax
    uncovered = []
    for i in cs.axes:
        B = spec.B[i - 1]
        if B.empty:
            continue
        sep = cs.flags(i, "sep_in")
        for p, ok in zip(cs.levels, sep):
            if B.lo + margin < p < B.hi - margin and not ok:
                uncovered.append({"axis": i, "level": float(p)})
    positive = {
        i: bool(cs.flags(i, "conn_in").any() or cs.flags(i, "sep_in").any()) for i in cs.axes
    }
    return RoundTrip(violations, uncovered, cs.nested, positive, cs)
