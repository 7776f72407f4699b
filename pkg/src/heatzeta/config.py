"""Run configuration: parsing, validation, hashing, and the result manifest.

A run is described by a single JSON document (TOML is accepted on Python
3.11+ and normalized to the same dictionary).  The geometry record format:

    {"factors": [{"radius": 1.0, "alpha": 0.5},
                 {"radius": 1.0, "alpha": 0.25, "beta": 0.5, "torus": true}],
     "group":   [{"f1": {"rot": 0.0}, "f2": {"rot": 0.0}},
                 {"f1": {"rot": 3.141592653589793, "phase": [0.0, -1.0]},
                  "f2": {"refl": 0.0, "phase": 1}}]}

Rotations take an angle and an optional unimodular bundle phase (scalar or
[re, im] pair); reflections take an axis angle and a +-1 lift phase.  An
omitted group means the trivial group.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ValidationError
from .geometry import (
    CircleFactor,
    GroupElement,
    QuotientGeometry,
    Reflection,
    Rotation,
    TorusFactor,
    identity_element,
)

TASKS = ("zeta", "det", "torsion", "eta", "multitorsion", "verify", "trace")

VERIFY_SUITES = (
    "dualrep", "mellin", "multizeta", "evenvanish", "fixedpoint",
    "index", "closedness", "variation", "adjoint", "all",
)


class ConfigParseError(ValueError):
    """Raised when the document cannot be read at all (exit code 2)."""


def load_config(path: str | Path) -> dict:
    """Read a JSON (or, on 3.11+, TOML) config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError as exc:
            raise ConfigParseError(
                "TOML configs need Python >= 3.11 (tomllib); use JSON on this interpreter"
            ) from exc
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigParseError(f"TOML parse error in {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"JSON parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunConfig:
    task: str
    tolerance: float
    raw: dict
    geometry: QuotientGeometry | None = None
    t_grid: list[float] = field(default_factory=list)
    radius_grid: list[float] = field(default_factory=list)
    seed: int = 0

    @property
    def sha256(self) -> str:
        return config_hash(self.raw)


def _parse_phase(value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"phase must be a number or [re, im] pair, got {value!r}")


def _parse_action(rec: dict) -> Rotation | Reflection:
    if "rot" in rec:
        return Rotation(float(rec["rot"]), _parse_phase(rec.get("phase", 1.0)))
    if "refl" in rec:
        phase = rec.get("phase", 1.0)
        if phase not in (1, -1, 1.0, -1.0):
            raise ValidationError("reflection phase must be +1 or -1")
        return Reflection(float(rec["refl"]), float(phase))
    raise ValidationError(f"action record needs 'rot' or 'refl': {rec!r}")


def _parse_factor(rec: dict) -> CircleFactor | TorusFactor:
    radius = float(rec.get("radius", 1.0))
    if radius <= 0.0:
        raise ValidationError(f"factor radius must be positive, got {radius}")
    if rec.get("torus", False) or "beta" in rec:
        return TorusFactor(radius, float(rec.get("alpha", 0.5)), float(rec.get("beta", 0.5)))
    return CircleFactor(radius, float(rec.get("alpha", 0.5)))


def parse_geometry(rec: dict) -> QuotientGeometry:
    factors = [_parse_factor(f) for f in rec.get("factors", [])]
    if len(factors) == 1:
        factors.append(CircleFactor(factors[0].radius, getattr(factors[0], "alpha", 0.5)))
    if len(factors) != 2:
        raise ValidationError(f"geometry needs one or two factors, got {len(factors)}")
    group_rec = rec.get("group")
    if not group_rec:
        group = (identity_element(),)
    else:
        group = tuple(
            GroupElement(_parse_action(g["f1"]), _parse_action(g["f2"]), label=g.get("label", f"g{i}"))
            for i, g in enumerate(group_rec)
        )
    return QuotientGeometry(factors[0], factors[1], group)


def parse_run_config(cfg: dict) -> RunConfig:
    """Validate the document and build the typed run configuration."""
    if not isinstance(cfg, dict):
        raise ValidationError("config document must be a JSON object")
    task = cfg.get("task")
    if task not in TASKS:
        raise ValidationError(f"task must be one of {TASKS}, got {task!r}")
    tol = float(cfg.get("tolerance", 1e-10))
    if not 1e-14 <= tol <= 1e-2:
        raise ValidationError(f"tolerance must lie in [1e-14, 1e-2], got {tol:g}")

    grids = cfg.get("grids", {})
    t_grid = [float(x) for x in grids.get("t", [])]
    radius_grid = [float(x) for x in grids.get("radius1", [])]
    for name, grid in (("t", t_grid), ("radius1", radius_grid)):
        if grid and (sorted(grid) != grid or any(x <= 0 for x in grid)):
            raise ValidationError(f"grid '{name}' must be positive and sorted ascending")
        if name in grids and not grid:
            raise ValidationError(f"grid '{name}' must be nonempty when present")

    geometry = None
    if "geometry" in cfg:
        geometry = parse_geometry(cfg["geometry"])

    if task == "verify":
        suite = cfg.get("suite", "all")
        if suite not in VERIFY_SUITES:
            raise ValidationError(f"verify suite must be one of {VERIFY_SUITES}, got {suite!r}")

    seed = int(cfg.get("seed", 0))
    return RunConfig(task=task, tolerance=tol, raw=cfg, geometry=geometry,
                     t_grid=t_grid, radius_grid=radius_grid, seed=seed)


def build_manifest(run: RunConfig, values: list[dict], checks: list[dict],
                   wall_time: float, engine_version: str) -> dict:
    """Assemble the result manifest; round-trips losslessly through JSON."""
    for v in values:
        if "error_bound" not in v:
            raise ValidationError(f"manifest value {v.get('name')!r} lacks an error estimate")
    return {
        "schema_version": 1,
        "engine": {"name": "heatzeta", "version": engine_version},
        "task": run.task,
        "config": run.raw,
        "config_sha256": run.sha256,
        "values": values,
        "checks": checks,
        "all_passed": all(c.get("passed", False) for c in checks) if checks else True,
        "wall_time_s": wall_time,
    }
