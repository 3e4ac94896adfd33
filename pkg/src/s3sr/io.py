"""Curve-file formats: columnar CSV and JSON with exact round-tripping.

CSV layout is bit-stable: '#'-prefixed header lines (a format marker,
sorted key=value metadata, the column list), then comma-separated rows
rendered with 17 significant digits and LF line endings.  Column order
is fixed: s, x1, x2, y1, y2, a, b, omega_res.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curves import SampledCurve, fd_velocities, omega_fd_residuals
from .frames import I1, I3
from .geodesics import GeodesicParams, ab_profile

__all__ = ["COLUMNS", "CurveRecord", "FORMAT_MARKER"]

COLUMNS = ("s", "x1", "x2", "y1", "y2", "a", "b", "omega_res")
FORMAT_MARKER = "s3sr-curve v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class CurveRecord:
    """Header metadata plus an (n, 8) table in COLUMNS order."""

    header: dict
    data: np.ndarray

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.shape[1] != len(COLUMNS):
            raise ValueError(f"curve table needs {len(COLUMNS)} columns")

    # -- construction -------------------------------------------------

    @classmethod
    def from_curve(cls, curve: SampledCurve, **extra_header) -> "CurveRecord":
        """Build a record, filling the a, b columns from the best source.

        Geodesic-tagged curves use the closed-form control profile;
        otherwise frame components of the stored (or finite-difference)
        velocities are used.  omega_res is the finite-difference
        horizontality residual (0 for single-sample curves).
        """
        n = curve.n
        meta = dict(curve.meta)
        meta.update(extra_header)
        if meta.get("tag") in ("geodesic", "hamiltonian") and "lambda" in meta:
            params = GeodesicParams(meta.get("r", 1.0), meta.get("theta0", 0.0), meta["lambda"])
            a, b = ab_profile(params, curve.s)
        else:
            vel = curve.velocities if curve.velocities is not None else (
                fd_velocities(curve) if n >= 2 else np.zeros_like(curve.points)
            )
            a = np.sum(vel * (-(curve.points @ I1)), axis=1)
            b = np.sum(vel * (-(curve.points @ I3)), axis=1)
        omega_res = omega_fd_residuals(curve) if n >= 2 else np.zeros(1)
        table = np.column_stack([curve.s, curve.points, a, b, omega_res])
        header = {str(k): v for k, v in meta.items() if _scalarish(v)}
        return cls(header, table)

    def to_sampled_curve(self) -> SampledCurve:
        """Points-only curve (velocities are not stored in files)."""
        return SampledCurve(self.data[:, 0], self.data[:, 1:5], None, dict(self.header))

    # -- validation ----------------------------------------------------

    def validate(self, unit_tol=1e-8):
        s = self.data[:, 0]
        if len(s) > 1 and np.any(np.diff(s) <= 0.0):
            raise ValueError("s column must be strictly increasing")
        norms = np.linalg.norm(self.data[:, 1:5], axis=1)
        dev = float(np.max(np.abs(norms - 1.0)))
        if dev > unit_tol:
            raise ValueError(f"curve points leave the sphere by {dev:.3e}")

    # -- CSV -----------------------------------------------------------

    def to_csv(self, path):
        lines = [f"# {FORMAT_MARKER}"]
        for key in sorted(self.header):
            lines.append(f"# {key}={_header_str(self.header[key])}")
        lines.append("# columns: " + ",".join(COLUMNS))
        for row in self.data:
            lines.append(",".join(_fmt(v) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", newline="\n")

    @classmethod
    def from_csv(cls, path) -> "CurveRecord":
        header: dict = {}
        rows = []
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body == FORMAT_MARKER or body.startswith("columns:"):
                    continue
                if "=" in body:
                    key, value = body.split("=", 1)
                    header[key.strip()] = _parse_value(value.strip())
                continue
            parts = line.split(",")
            if len(parts) != len(COLUMNS):
                raise ValueError(f"line {lineno}: expected {len(COLUMNS)} fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if not rows:
            raise ValueError("no data rows found")
        return cls(header, np.array(rows))

    # -- JSON ----------------------------------------------------------

    def to_json(self, path):
        payload = {
            "format": FORMAT_MARKER,
            "header": self.header,
            "columns": list(COLUMNS),
            "rows": [list(map(float, row)) for row in self.data],
        }
        Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", newline="\n")

    @classmethod
    def from_json(cls, path) -> "CurveRecord":
        payload = json.loads(Path(path).read_text())
        if payload.get("format") != FORMAT_MARKER or "rows" not in payload:
            raise ValueError("not a curve file")
        return cls(dict(payload.get("header", {})), np.array(payload["rows"], dtype=float))

    # -- generic -------------------------------------------------------

    def write(self, path, fmt):
        if fmt == "csv":
            self.to_csv(path)
        elif fmt == "json":
            self.to_json(path)
        else:
            raise ValueError(f"unknown format {fmt!r}")

    @classmethod
    def read(cls, path) -> "CurveRecord":
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            return cls.from_json(path)
        return cls.from_csv(path)


def _scalarish(v) -> bool:
    return isinstance(v, (int, float, str, bool, np.integer, np.floating))


def _header_str(v) -> str:
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def _parse_value(v: str):
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v
