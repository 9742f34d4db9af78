"""Trajectory CSV files with JSON sidecars, and deterministic JSON output."""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .radial_ode import (InitialConditions, IntegratorConfig, ProblemSpec,
                         TerminalEvent, Trajectory)

SCHEMA = 1


def fmt(x):
    """Float with 17 significant digits (round-trips exactly)."""
    return format(float(x), ".17g")


def to_plain(obj):
    """Convert dataclasses, enums, numpy values and fractions to JSON types."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating, Fraction)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(x, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in x.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        return "[" + sep.join(pad + _encode(v, indent, level + 1) for v in x) + end + "]"
    if isinstance(x, float):
        # JSON has no NaN/inf
        return fmt(x) if math.isfinite(x) else "null"
    return json.dumps(x)


def dumps(obj, indent=2, schema=True):
    """Deterministic JSON: 17 significant digits, a top-level schema field."""
    plain = to_plain(obj)
    if schema:
        plain = {"schema": SCHEMA, **plain} if isinstance(plain, dict) else {
            "schema": SCHEMA, "result": plain}
    return _encode(plain, indent, 0) + "\n"


def trajectory_header(m):
    return ["r", *(f"w{k}" for k in range(m)), *(f"dw{k}" for k in range(m))]


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_trajectory(trajectory, path):
    """Write ``path`` (CSV) and ``path.json`` (problem, ic, config, event)."""
    path = Path(path)
    m = trajectory.problem.m
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(trajectory_header(m))
        for r, w, dw in zip(trajectory.r, trajectory.w, trajectory.dw):
            out.writerow([fmt(r), *map(fmt, w), *map(fmt, dw)])
    meta = {
        "problem": {"m": m, "n": trajectory.problem.n},
        "ic": list(trajectory.ic.alpha),
        "config": dataclasses.asdict(trajectory.config),
        "terminal_event": trajectory.terminal_event.value,
        "r_event": trajectory.r_event,
        "source": trajectory.source,
    }
    sidecar_path(path).write_text(dumps(meta))
    return path


def read_trajectory(path):
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    m = meta["problem"]["m"]
    if header != trajectory_header(m):
        raise ValueError(f"unexpected CSV header {header}")
    return Trajectory(ProblemSpec(m, meta["problem"]["n"]), InitialConditions(meta["ic"]),
                      data[:, 0], data[:, 1 : m + 1], data[:, m + 1 :],
                      TerminalEvent(meta["terminal_event"]), meta.get("r_event"),
                      IntegratorConfig(**meta["config"]), meta.get("source", "file"))


def write_csv(path_or_file, header, rows):
    """Headered CSV of numeric rows (17 significant digits)."""
    def emit(fh):
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
