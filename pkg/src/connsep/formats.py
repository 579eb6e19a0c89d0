"""JSON file formats.

All grids use 1-based cell indices and flat arrays with axis 1 varying
fastest.

* labeling   ``{"n", "k", "labels": [...k^n colours in 1..n]}``
* cover      ``{"n", "k", "sets": [[cell, ...], ...]}`` (n lists)
* cell set   ``{"n", "k", "cells": [[i_1, ..., i_n], ...]}``
* integer field ``{"n", "k", "values": [...k^n integers]}``
* vertex field  ``{"type": "vertex", "n", "k", "values": [...(k+1)^n]}``
* expression field ``{"type": "expr", "n", "expr": {"op": ...}}``
* Conn/Sep spec ``{"n", "A": [...], "B": [...]}`` with entries
  ``null``, a number or ``[lo, hi]``
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .chessboard import IntegerField, Labeling
from .expr import field_from_dict
from .grid import GridSpec, UsageError
from .synthesis import ConnSepSpec
from .topology import CellSet


def read_json(path) -> tuple[dict, str]:
    """Parsed document and the sha256 of the raw bytes."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: top level must be an object")
    return doc, hashlib.sha256(raw).hexdigest()


def _spec(doc: dict) -> GridSpec:
    try:
        return GridSpec(int(doc["n"]), int(doc["k"]))
    except KeyError as exc:
        raise UsageError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad grid size: {exc}") from exc


def _ints(values, what: str) -> list:
    if not isinstance(values, list):
        raise UsageError(f"{what} must be a list")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise UsageError(f"{what} must hold integers, found {v!r}")
        out.append(int(v))
    return out


def labeling_from_dict(doc: dict) -> Labeling:
    spec = _spec(doc)
    if "labels" not in doc:
        raise UsageError("labeling needs 'labels'")
    return Labeling(spec, _ints(doc["labels"], "labels"))


def cellset_from_cells(spec: GridSpec, cells) -> CellSet:
    if not isinstance(cells, list):
        raise UsageError("cells must be a list of multi-indices")
    return CellSet.from_cells(spec, [_ints(c, "cell index") for c in cells])


def cellset_from_dict(doc: dict) -> CellSet:
    spec = _spec(doc)
    return cellset_from_cells(spec, doc.get("cells", []))


def cover_from_dict(doc: dict) -> list:
    spec = _spec(doc)
    sets = doc.get("sets")
    if not isinstance(sets, list):
        raise UsageError("cover needs 'sets', a list of cell lists")
    return [cellset_from_cells(spec, s) for s in sets]


def integer_field_from_dict(doc: dict) -> IntegerField:
    spec = _spec(doc)
    if "values" not in doc:
        raise UsageError("integer field needs 'values'")
    return IntegerField(spec, _ints(doc["values"], "values"))


def scalar_field_from_dict(doc: dict):
    return field_from_dict(doc)


def connsep_spec_from_dict(doc: dict) -> ConnSepSpec:
    return ConnSepSpec.from_dict(doc)


def dumps(report: dict) -> str:
    """Canonical report text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
