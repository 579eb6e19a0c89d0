"""Reference connectivity by explicit face enumeration.

Slow on purpose.  The closed union ``∪S`` is the disjoint union of the
relative interiors of the grid faces owned by some member cell; the open
complement is the disjoint union of the relative interiors of all other
faces.  Within either family two relative interiors touch exactly when one
face contains the other, so components come straight from the containment
graph.  None of this shares code with :mod:`connsep.topology`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx

from .grid import FACE_SIZE_GUARD, FaceLattice, GridFace, GridSpec, UsageError


@dataclass(frozen=True)
class OracleComponent:
    cells: tuple  # cells in flat order
    touches: frozenset  # {(axis, '-'|'+'), ...}


def _owned_faces(spec: GridSpec, cells) -> set:
    owned = set()
    for c in cells:
        per_axis = [(2 * x - 2, 2 * x - 1, 2 * x) for x in c]
        for coords in itertools.product(*per_axis):
            owned.add(coords)
    return owned


def _face_graph(spec: GridSpec, nodes: set) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(nodes)
    lattice = FaceLattice(spec)
    for coords in nodes:
        for sub in lattice.facets_of(GridFace(coords)):
            if sub.coords in nodes:
                G.add_edge(coords, sub.coords)
    return G


def _is_cell(coords) -> bool:
    return all(c & 1 for c in coords)


def _to_cell(coords) -> tuple:
    return tuple((c + 1) // 2 for c in coords)


def _ordered(spec: GridSpec, groups):
    groups = [sorted(g, key=spec.flat) for g in groups if g]
    groups.sort(key=lambda g: spec.flat(g[0]))
    return groups


def _guard(spec: GridSpec, guard: int):
    FaceLattice(spec, guard=guard)  # raises when too large


def oracle_closed_components(S, guard: int = FACE_SIZE_GUARD) -> list[list[tuple]]:
    """Components of ``∪S`` as lists of member cells."""
    spec = S.spec
    _guard(spec, guard)
    owned = _owned_faces(spec, S.cells())
    G = _face_graph(spec, owned)
    groups = [[_to_cell(f) for f in comp if _is_cell(f)] for comp in nx.connected_components(G)]
    return _ordered(spec, groups)


def oracle_complement_components(S, guard: int = FACE_SIZE_GUARD) -> list[OracleComponent]:
    """Components of ``I^n \\ ∪S`` projected to the free cells they contain."""
    spec = S.spec
    _guard(spec, guard)
    owned = _owned_faces(spec, S.cells())
    free = {f.coords for f in FaceLattice(spec, guard=guard)} - owned
    G = _face_graph(spec, free)
    top = 2 * spec.k
    out = []
    for comp in nx.connected_components(G):
        cells = [_to_cell(f) for f in comp if _is_cell(f)]
        if not cells:
            # every free face is a face of some free cell
            raise UsageError("oracle found a cell-less complement component")
        touches = set()
        for f in comp:
            for s, c in enumerate(f):
                if c == 0:
                    touches.add((s + 1, "-"))
                elif c == top:
                    touches.add((s + 1, "+"))
        out.append(OracleComponent(tuple(sorted(cells, key=spec.flat)), frozenset(touches)))
    out.sort(key=lambda c: spec.flat(c.cells[0]))
    return out


def _faces_connect(spec: GridSpec, faces: set, axis: int) -> bool:
    top = 2 * spec.k
    for comp in nx.connected_components(_face_graph(spec, faces)):
        lo = any(f[axis - 1] == 0 for f in comp)
        hi = any(f[axis - 1] == top for f in comp)
        if lo and hi:
            return True
    return False


def oracle_connects(S, axis: int, guard: int = FACE_SIZE_GUARD) -> bool:
    spec = S.spec
    spec.check_axis(axis)
    _guard(spec, guard)
    return _faces_connect(spec, _owned_faces(spec, S.cells()), axis)


def oracle_intersection_connects(sets, axis: int, guard: int = FACE_SIZE_GUARD) -> bool:
    """Whether the point set ``∩_j ∪A_j`` connects the ``axis`` faces.

    This is usually larger than the union of the common cells: two
    touching cells from different sets contribute their shared face.  A
    face lies in the intersection iff every set owns it.
    """
    sets = list(sets)
    if not sets:
        raise UsageError("need at least one cell set")
    spec = sets[0].spec
    spec.check_axis(axis)
    _guard(spec, guard)
    faces = _owned_faces(spec, sets[0].cells())
    for S in sets[1:]:
        faces &= _owned_faces(spec, S.cells())
    return _faces_connect(spec, faces, axis)


def oracle_separates(S, axis: int, guard: int = FACE_SIZE_GUARD) -> bool:
    S.spec.check_axis(axis)
    for comp in oracle_complement_components(S, guard=guard):
        if (axis, "-") in comp.touches and (axis, "+") in comp.touches:
            return False
    return True


# ---------------------------------------------------------------------------
# equivalence with the fast engine


def mismatches(S, guard: int = FACE_SIZE_GUARD) -> list[str]:
    """Differences between the oracle and :mod:`connsep.topology` on one set."""
    from .topology import complement_components, components

    spec = S.spec
    out = []
    if [list(c) for c in oracle_closed_components(S, guard)] != [list(c) for c in components(S, 0)]:
        out.append("closed components differ")
    ref = oracle_complement_components(S, guard)
    fast = complement_components(S)
    if [list(c.cells) for c in ref] != [list(c) for c in fast]:
        out.append("complement components differ")
    else:
        for comp, cells in zip(ref, fast):
            for axis in range(1, spec.n + 1):
                lo = any(c[axis - 1] == 1 for c in cells)
                hi = any(c[axis - 1] == spec.k for c in cells)
                if lo != ((axis, "-") in comp.touches) or hi != ((axis, "+") in comp.touches):
                    out.append(f"face touching differs on axis {axis}")
    return out


def equivalence_check(n: int, k: int, exhaustive: bool = True, trials: int = 0,
                      seed: int = 0, max_enum: int = 10**6) -> dict:
    """Compare oracle and engine over all cell sets, or over seeded random ones."""
    import numpy as np

    from .topology import CellSet

    spec = GridSpec(n, k)
    N = spec.num_cells
    if exhaustive:
        if 2**N > max_enum:
            raise UsageError(f"2^{N} cell sets exceed the guard {max_enum}; use --trials")
        masks = (((m >> np.arange(N)) & 1).astype(bool) for m in range(2**N))
        total = 2**N
    else:
        rng = np.random.default_rng(seed)
        dens = rng.random(trials)
        masks = (rng.random(N) < d for d in dens)
        total = trials
    bad = []
    for idx, mask in enumerate(masks):
        S = CellSet(spec, mask)
        diff = mismatches(S)
        if diff:
            bad.append({"index": idx, "cells": [list(c) for c in S.cells()], "issues": diff})
    out = {"n": n, "k": k, "mode": "exhaustive" if exhaustive else "random",
           "total": total, "mismatches": len(bad), "examples": bad[:5]}
    if not exhaustive:
        out["seed"] = seed
    return out
