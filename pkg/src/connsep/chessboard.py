"""Witness finders for the chessboard / covering theorems and the level lemma.

* :func:`steinhaus_witness` - some colour ``i`` of an n-colouring of the
  cells has a monochromatic chain from face ``(i,-)`` to ``(i,+)``; in the
  generalized form consecutive cells share a face of dimension ``>= i-1``.
* :func:`lebesgue_witness` - the same for a cover by n (possibly
  overlapping) cell sets.
* :func:`separating_level` - for an integer field that changes by at most 1
  between touching cells, some level set connects or separates axis ``i``.

All searches are deterministic: the smallest colour / level wins.  A failed
search contradicts a theorem and raises :class:`SoundnessError`.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, SoundnessError, UsageError, adjacency_threshold
from .topology import CellSet, Chain, SeparationCertificate, _offsets, connects, separates

DEFAULT_MAX_ENUM = 10**7
MODES = ("plain", "generalized", "lebesgue", "level")


# ---------------------------------------------------------------------------
# inputs


class Labeling:
    """Colour in ``[1, n]`` for every cell (flat order, axis 1 fastest)."""

    def __init__(self, spec: GridSpec, colors):
        colors = np.asarray(colors, dtype=np.int64).reshape(-1)
        if colors.shape[0] != spec.num_cells:
            raise UsageError(f"labeling has {colors.shape[0]} entries, expected {spec.num_cells}")
        if colors.size and (colors.min() < 1 or colors.max() > spec.n):
            raise UsageError(f"colours must lie in [1, {spec.n}]")
        colors.setflags(write=False)
        self.spec = spec
        self.colors = colors

    @classmethod
    def from_function(cls, spec: GridSpec, func) -> "Labeling":
        return cls(spec, [func(c) for c in spec.cells()])

    def color_set(self, i: int) -> CellSet:
        return CellSet(self.spec, self.colors == i)

    def __getitem__(self, cell) -> int:
        return int(self.colors[self.spec.flat(cell)])

    def to_dict(self) -> dict:
        return {"n": self.spec.n, "k": self.spec.k, "labels": self.colors.tolist()}


class IntegerField:
    """Integer per cell with ``|G(a) - G(b)| <= 1`` whenever cells a, b touch."""

    def __init__(self, spec: GridSpec, values, check: bool = True):
        values = np.asarray(values).reshape(-1)
        if values.shape[0] != spec.num_cells:
            raise UsageError(f"field has {values.shape[0]} entries, expected {spec.num_cells}")
        if not np.issubdtype(values.dtype, np.integer):
            if not np.all(np.equal(np.mod(values, 1), 0)):
                raise UsageError("integer field values must be integers")
        values = values.astype(np.int64)
        values.setflags(write=False)
        self.spec = spec
        self.values = values
        if check:
            bad = lipschitz_violation(spec, values)
            if bad is not None:
                a, b = bad
                raise UsageError(
                    f"adjacency-Lipschitz violated between {a} and {b}: "
                    f"{self[a]} vs {self[b]}"
                )

    def __getitem__(self, cell) -> int:
        return int(self.values[self.spec.flat(cell)])

    def level_set(self, p: int) -> CellSet:
        return CellSet(self.spec, self.values == p)

    def to_dict(self) -> dict:
        return {"n": self.spec.n, "k": self.spec.k, "values": self.values.tolist()}


def lipschitz_violation(spec: GridSpec, values):
    """First pair of touching cells whose values differ by more than 1, or None."""
    g = np.asarray(values).reshape(spec.shape, order="F")
    k = spec.k
    for off in _offsets(spec.n, 0):
        a_sl, b_sl = [], []
        for o in off:
            if o == 1:
                a_sl.append(slice(0, k - 1))
                b_sl.append(slice(1, k))
            elif o == -1:
                a_sl.append(slice(1, k))
                b_sl.append(slice(0, k - 1))
            else:
                a_sl.append(slice(None))
                b_sl.append(slice(None))
        diff = np.abs(g[tuple(a_sl)] - g[tuple(b_sl)])
        if diff.size and diff.max() > 1:
            pos = np.argwhere(diff > 1)[0]
            a = tuple(int(p) + 1 + (1 if o == -1 else 0) for p, o in zip(pos, off))
            b = tuple(x + o for x, o in zip(a, off))
            return a, b
    return None


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    axis: int
    chain: Chain


def steinhaus_witness(F: Labeling, generalized: bool = False) -> Witness:
    """Smallest colour ``i`` whose cells chain across axis ``i``, with the chain."""
    n = F.spec.n
    for i in range(1, n + 1):
        d = adjacency_threshold(n, i) if generalized else 0
        chain = connects(F.color_set(i), i, d)
        if chain is not None:
            return Witness(i, chain)
    raise SoundnessError(
        "no monochromatic spanning chain found for any colour",
        {"n": n, "k": F.spec.k, "generalized": generalized, "labels": F.colors.tolist()},
    )


def lebesgue_witness(sets) -> Witness:
    """Smallest ``i`` such that ``A_i`` chains across axis ``i`` at threshold ``i-1``."""
    sets = list(sets)
    if not sets:
        raise UsageError("need n cell sets")
    spec = sets[0].spec
    if len(sets) != spec.n:
        raise UsageError(f"need exactly n={spec.n} cell sets, got {len(sets)}")
    cover = np.zeros(spec.num_cells, dtype=bool)
    for A in sets:
        if A.spec != spec:
            raise UsageError("cell sets belong to different grids")
        cover |= A.mask
    if not cover.all():
        missing = spec.cell(int(np.flatnonzero(~cover)[0]))
        raise UsageError(f"sets do not cover the grid; cell {missing} is uncovered")
    for i, A in enumerate(sets, start=1):
        chain = connects(A, i, adjacency_threshold(spec.n, i))
        if chain is not None:
            return Witness(i, chain)
    raise SoundnessError(
        "no set chains across its own axis",
        {"n": spec.n, "k": spec.k, "sets": [A.mask.astype(int).tolist() for A in sets]},
    )


@dataclass(frozen=True)
class LevelResult:
    kind: str  # "connecting" | "separating"
    level: int
    chain: Chain | None = None
    certificate: SeparationCertificate | None = None


def separating_level(G: IntegerField, axis: int) -> LevelResult:
    """Smallest connecting level of ``G`` along ``axis``; failing that, the smallest separating one."""
    spec = G.spec
    spec.check_axis(axis)
    lo, hi = int(G.values.min()), int(G.values.max())
    for p in range(lo, hi + 1):
        chain = connects(G.level_set(p), axis, 0)
        if chain is not None:
            return LevelResult("connecting", p, chain=chain)
    for p in range(lo, hi + 1):
        cert = separates(G.level_set(p), axis)
        if cert is not None:
            return LevelResult("separating", p, certificate=cert)
    raise SoundnessError(
        "no level connects or separates",
        {"n": spec.n, "k": spec.k, "axis": axis, "values": G.values.tolist()},
    )


# ---------------------------------------------------------------------------
# random instances


def random_lipschitz_field(spec: GridSpec, rng: np.random.Generator) -> IntegerField:
    """A random adjacency-Lipschitz field.

    Either the floor of a scaled random coordinate function (sum of slopes
    and absolute-value kinks, scaled so touching cell centres differ by
    less than 1) or a minimum of Chebyshev cones ``h_j + ||c - s_j||_inf``.
    """
    idx = spec.index_array()
    if rng.random() < 0.5:
        centers = (idx - 0.5) / spec.k
        a = rng.normal(size=spec.n)
        b = rng.normal(size=spec.n)
        c = rng.random(spec.n)
        vals = centers @ a + np.abs(centers - c) @ b
        lip = np.abs(a).sum() + np.abs(b).sum()
        scale = rng.uniform(0.2, 0.999) * spec.k / max(lip, 1e-12)
        g = np.floor(scale * vals + rng.random() * 3)
    else:
        m = int(rng.integers(1, 5))
        seeds = rng.integers(1, spec.k + 1, size=(m, spec.n))
        heights = rng.integers(-2, 3, size=m)
        dists = np.abs(idx[:, None, :] - seeds[None, :, :]).max(axis=2) + heights[None, :]
        g = dists.min(axis=1) if rng.random() < 0.5 else -dists.min(axis=1)
    return IntegerField(spec, g.astype(np.int64))


def _random_instance(mode: str, spec: GridSpec, rng: np.random.Generator):
    N, n = spec.num_cells, spec.n
    if mode in ("plain", "generalized"):
        return Labeling(spec, rng.integers(1, n + 1, size=N))
    if mode == "lebesgue":
        codes = rng.integers(1, 2**n, size=N)
        return [CellSet(spec, (codes >> (i - 1)) & 1) for i in range(1, n + 1)]
    if mode == "level":
        return random_lipschitz_field(spec, rng)
    raise UsageError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# verification harness


@dataclass
class VerifyReport:
    mode: str
    n: int
    k: int
    total: int = 0
    failures: int = 0
    histogram: dict = field(default_factory=dict)
    max_chain_length: int = 0
    randomized: bool = False
    seed: int | None = None
    candidates: int | None = None
    elapsed: float = 0.0
    failed_instances: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "n": self.n,
            "k": self.k,
            "total": self.total,
            "failures": self.failures,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "max_chain_length": self.max_chain_length,
            "randomized": self.randomized,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.candidates is not None:
            out["candidates"] = self.candidates
        if self.failed_instances:
            out["failed_instances"] = self.failed_instances[:10]
        return out


def enumeration_size(n: int, k: int, mode: str, level_values: int = 3) -> int:
    N = k**n
    if mode in ("plain", "generalized"):
        return n**N
    if mode == "lebesgue":
        return (2**n - 1) ** N
    if mode == "level":
        return level_values**N
    raise UsageError(f"unknown mode {mode!r}; expected one of {MODES}")


def _digits(idx: int, base: int, N: int) -> list:
    out = []
    for _ in range(N):
        idx, r = divmod(idx, base)
        out.append(r)
    return out


def _check_one(mode: str, inst, partial: dict):
    """Run one instance; update the partial report in place."""
    hist = partial["histogram"]
    try:
        if mode in ("plain", "generalized"):
            w = steinhaus_witness(inst, generalized=(mode == "generalized"))
            w.chain.validate(inst.spec, inst.color_set(w.axis))
            hist[w.axis] = hist.get(w.axis, 0) + 1
            partial["max_chain"] = max(partial["max_chain"], len(w.chain))
        elif mode == "lebesgue":
            w = lebesgue_witness(inst)
            w.chain.validate(inst[0].spec, inst[w.axis - 1])
            hist[w.axis] = hist.get(w.axis, 0) + 1
            partial["max_chain"] = max(partial["max_chain"], len(w.chain))
        else:
            for axis in range(1, inst.spec.n + 1):
                r = separating_level(inst, axis)
                if r.kind == "connecting":
                    r.chain.validate(inst.spec, inst.level_set(r.level))
                    partial["max_chain"] = max(partial["max_chain"], len(r.chain))
                else:
                    r.certificate.validate()
                    if r.certificate.removed != inst.level_set(r.level):
                        raise UsageError("certificate removed set is not the level set")
                hist[r.kind] = hist.get(r.kind, 0) + 1
        partial["total"] += 1
    except (SoundnessError, UsageError) as exc:
        partial["total"] += 1
        partial["failures"] += 1
        partial["failed"].append(str(exc))


def _new_partial():
    return {"total": 0, "failures": 0, "histogram": {}, "max_chain": 0, "failed": [], "candidates": 0}


def _enum_range(mode: str, n: int, k: int, start: int, stop: int, level_values: int) -> dict:
    spec = GridSpec(n, k)
    N = spec.num_cells
    partial = _new_partial()
    for idx in range(start, stop):
        if mode in ("plain", "generalized"):
            inst = Labeling(spec, [d + 1 for d in _digits(idx, n, N)])
        elif mode == "lebesgue":
            codes = np.array(_digits(idx, 2**n - 1, N)) + 1
            inst = [CellSet(spec, (codes >> (i - 1)) & 1) for i in range(1, n + 1)]
        else:
            vals = _digits(idx, level_values, N)
            partial["candidates"] += 1
            try:
                inst = IntegerField(spec, vals)
            except UsageError:
                continue
        _check_one(mode, inst, partial)
    return partial


def _merge(report: VerifyReport, partial: dict):
    report.total += partial["total"]
    report.failures += partial["failures"]
    for key, v in partial["histogram"].items():
        report.histogram[key] = report.histogram.get(key, 0) + v
    report.max_chain_length = max(report.max_chain_length, partial["max_chain"])
    report.failed_instances.extend(partial["failed"])
    if partial["candidates"]:
        report.candidates = (report.candidates or 0) + partial["candidates"]


def exhaustive_verify(
    n: int,
    k: int,
    mode: str,
    max_enum: int = DEFAULT_MAX_ENUM,
    jobs: int = 1,
    level_values: int = 3,
) -> VerifyReport:
    """Check the witness theorem on every instance of the given size.

    ``level`` mode enumerates fields with values in ``range(level_values)``
    and keeps the adjacency-Lipschitz ones, checking every axis of each.
    """
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}; expected one of {MODES}")
    GridSpec(n, k)
    size = enumeration_size(n, k, mode, level_values)
    if size > max_enum:
        raise UsageError(
            f"enumeration size {size} exceeds guard {max_enum}; use randomized verification"
        )
    t0 = time.perf_counter()
    report = VerifyReport(mode, n, k)
    if jobs <= 1 or size < 1000:
        _merge(report, _enum_range(mode, n, k, 0, size, level_values))
    else:
        step = math.ceil(size / (jobs * 4))
        bounds = [(a, min(a + step, size)) for a in range(0, size, step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [
                pool.submit(_enum_range, mode, n, k, a, b, level_values) for a, b in bounds
            ]
            for fut in futs:
                _merge(report, fut.result())
    report.elapsed = time.perf_counter() - t0
    return report


def random_verify(n: int, k: int, mode: str, trials: int, seed: int = 0) -> VerifyReport:
    """Seeded randomized counterpart of :func:`exhaustive_verify`."""
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}; expected one of {MODES}")
    spec = GridSpec(n, k)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    report = VerifyReport(mode, n, k, randomized=True, seed=seed)
    partial = _new_partial()
    for _ in range(trials):
        _check_one(mode, _random_instance(mode, spec, rng), partial)
    _merge(report, partial)
    report.elapsed = time.perf_counter() - t0
    return report
