"""JSON law specifications and table writers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Mapping, Sequence

import numpy as np

from .errors import InvalidSpec
from .measures import (
    Arcsine,
    Atomic,
    CauchyBDerivative,
    CauchyLaw,
    DerivativeOfMeasure,
    DifferenceOfMeasures,
    FreePoisson,
    GridDensity,
    MeasureRepr,
    SecondCoordRepr,
    Semicircle,
    SemicircleBDerivative,
    SignedAtomic,
    UnitCircleAtomic,
    ZERO_SECOND,
)

__all__ = [
    "SCHEMA",
    "load_spec",
    "parse_measure",
    "parse_second",
    "parse_grid",
    "write_table",
]

SCHEMA = "freeconv-b/1"


def load_spec(source: str) -> dict:
    """Read a JSON spec from a file path, or inline when it starts with ``{``."""
    text = source if source.lstrip().startswith("{") else Path(source).read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"malformed JSON in {source!r}: {exc}") from exc
    if not isinstance(spec, dict) or "type" not in spec:
        raise InvalidSpec("a spec must be an object with a 'type' key")
    return spec


def _atoms(spec):
    try:
        atoms = spec["atoms"]
        return [float(a["x"]) for a in atoms], [float(a["w"]) for a in atoms]
    except (KeyError, TypeError) as exc:
        raise InvalidSpec("atoms must be a list of {'x': .., 'w': ..}") from exc


def parse_measure(spec: Mapping) -> MeasureRepr:
    """Build a :class:`MeasureRepr` from its JSON description."""
    kind = spec.get("type")
    try:
        if kind == "atomic":
            return Atomic(*_atoms(spec))
        if kind == "dirac":
            return Atomic.dirac(float(spec.get("at", 0.0)))
        if kind == "semicircle":
            return Semicircle(float(spec.get("mean", 0.0)), float(spec.get("variance", 1.0)))
        if kind == "arcsine":
            return Arcsine(float(spec.get("center", 0.0)), float(spec.get("radius", 2.0)))
        if kind == "cauchy":
            return CauchyLaw(float(spec.get("location", 0.0)), float(spec.get("scale", 1.0)))
        if kind == "free_poisson":
            return FreePoisson(float(spec.get("rate", 1.0)), float(spec.get("jump", 1.0)))
        if kind == "unit_circle":
            atoms = spec["atoms"]
            return UnitCircleAtomic(
                [float(a["theta"]) for a in atoms], [float(a["w"]) for a in atoms]
            )
        if kind == "grid":
            return GridDensity(np.asarray(spec["x"], float), np.asarray(spec["density"], float))
    except InvalidSpec:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad {kind!r} measure spec: {exc}") from exc
    raise InvalidSpec(f"unknown measure type {kind!r}")


def parse_second(spec: Mapping | None) -> SecondCoordRepr:
    """Build a :class:`SecondCoordRepr`; ``None`` gives the zero functional."""
    if spec is None:
        return ZERO_SECOND
    kind = spec.get("type")
    try:
        if kind == "zero":
            return ZERO_SECOND
        if kind == "diff":
            return DifferenceOfMeasures(parse_measure(spec["plus"]), parse_measure(spec["minus"]))
        if kind == "deriv":
            return DerivativeOfMeasure(parse_measure(spec["base"]), float(spec.get("mass", 1.0)))
        if kind == "semicircle_b":
            return SemicircleBDerivative(float(spec.get("variance", 1.0)))
        if kind == "cauchy_b":
            return CauchyBDerivative(float(spec.get("scale", 1.0)))
        if kind == "signed_atomic":
            return SignedAtomic(*_atoms(spec))
    except InvalidSpec:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad {kind!r} second-coordinate spec: {exc}") from exc
    raise InvalidSpec(f"unknown second-coordinate type {kind!r}")


def parse_grid(text: str) -> np.ndarray:
    """``"a:b:n"`` to ``n`` equally spaced points from ``a`` to ``b``."""
    try:
        a, b, n = text.split(":")
        start, stop, count = float(a), float(b), int(n)
    except ValueError as exc:
        raise InvalidSpec(f"grid must look like a:b:n, got {text!r}") from exc
    if count < 2 or not start < stop:
        raise InvalidSpec("grid needs start < stop and at least 2 points")
    return np.linspace(start, stop, count)


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str, stream: IO) -> None:
    """Write rows as CSV (with header) or as versioned JSON."""
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    elif fmt == "json":
        data = {c: [] for c in columns}
        for row in rows:
            for c, v in zip(columns, row):
                if isinstance(v, (float, np.floating)):
                    v = float(v) if math.isfinite(v) else None
                elif isinstance(v, np.integer):
                    v = int(v)
                data[c].append(v)
        json.dump({"schema": SCHEMA, "columns": list(columns), "data": data}, stream, indent=1)
        stream.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")
