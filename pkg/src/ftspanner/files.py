"""Reading and writing point sets, graphs and reports."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import as_points, check_distinct
from .spanner import SpannerGraph

SIG_DIGITS = 12


class InputError(ValueError):
    """Malformed or invalid input file."""


def fmt(x) -> str:
    """Number as text with 12 significant digits."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.{SIG_DIGITS}g}"


def round_sig(obj):
    """Recursively round floats in a JSON-able object to 12 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_sig(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_sig(v) for v in obj]
    return obj


@dataclass(frozen=True)
class PointSetFile:
    dim: int
    points: np.ndarray

    def __post_init__(self):
        try:
            pts = as_points(self.points)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if pts.shape[1] != self.dim:
            raise InputError(f"rows have length {pts.shape[1]}, expected dim={self.dim}")
        try:
            check_distinct(pts)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        object.__setattr__(self, "points", pts)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "points": self.points.tolist()}


def dump_points(ps: PointSetFile) -> str:
    # full repr precision so a round trip is exact
    return json.dumps(ps.to_dict())


def load_points_json(text: str) -> PointSetFile:
    try:
        data = json.loads(text)
        dim, rows = int(data["dim"]), data["points"]
        if any(len(r) != dim for r in rows):
            raise InputError("row length differs from dim")
        return PointSetFile(dim, np.array(rows, dtype=np.float64).reshape(len(rows), dim))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad point file: {exc}") from exc


def load_points_csv(text: str) -> PointSetFile:
    try:
        rows = [[float(v) for v in r] for r in csv.reader(text.splitlines()) if r]
    except ValueError as exc:
        raise InputError(f"bad CSV: {exc}") from exc
    if not rows:
        raise InputError("empty point file")
    dim = len(rows[0])
    if any(len(r) != dim for r in rows):
        raise InputError("ragged CSV rows")
    return PointSetFile(dim, np.array(rows))


def dump_points_csv(ps: PointSetFile) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in ps.points)


def read_points(path: str | Path, as_csv: bool = False) -> PointSetFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    return load_points_csv(text) if as_csv else load_points_json(text)


def write_points(path: str | Path, ps: PointSetFile, as_csv: bool = False) -> None:
    Path(path).write_text(dump_points_csv(ps) if as_csv else dump_points(ps))


def dump_graph(g: SpannerGraph) -> str:
    return json.dumps(round_sig(g.to_dict()))


def load_graph(text: str) -> SpannerGraph:
    return SpannerGraph.from_dict(json.loads(text))


def dump_report(report: dict) -> str:
    return json.dumps(round_sig(report), sort_keys=True)
