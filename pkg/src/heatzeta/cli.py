"""Config-driven command line front end.

    heatzeta --config run.json --out results/ [--tol X] [--format json|csv|both]
             [--seed N] [--threads N] [--figures]

Reads a JSON (or TOML) run configuration, executes the requested task, and
writes a JSON manifest plus optional CSV tables (and, with --figures, PNG
figures next to the tables).  Exit codes: 0 success, 2 parse error,
3 validation error, 4 accuracy error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigParseError,
    RunConfig,
    build_manifest,
    load_config,
    parse_run_config,
)
from .errors import AccuracyError, CapabilityError, ConditioningError, DomainError, ValidationError
from .geometry import CircleFactor, quotient_weighted_trace, validate_geometry
from .mellin import circle_eta, continue_zeta, log_det, log_torsion
from .multizeta import multi_torsion
from .report import figure_convergence, figure_parameter_scan, figure_trace, format_cell, write_csv
from .spectral import WEIGHTS, Spectrum, circle_spectrum, spectrum_trace_model
from .verify import run_suite

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_ACCURACY = 4


def _map_grid(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _model_from_config(rec: dict, label: str = "model"):
    """Build a heat-trace model from a config 'model' record."""
    if "circle" in rec:
        c = rec["circle"]
        return spectrum_trace_model(circle_spectrum(float(c.get("radius", 1.0)),
                                                    float(c.get("alpha", 0.5))), label=label)
    if "spectrum" in rec:
        s = rec["spectrum"]
        entries = tuple((float(lam), int(mult)) for lam, mult in s.get("entries", []))
        spec = Spectrum(entries=entries, kernel_dim=int(s.get("kernel_dim", 0)))
        return spectrum_trace_model(spec, label=label)
    raise ValidationError("model record needs a 'circle' or 'spectrum' entry")


def _value(name: str, value: float, error: float, **extra) -> dict:
    rec = {"name": name, "value": float(value), "error_bound": float(error)}
    rec.update(extra)
    return rec


# ---------------------------------------------------------------------------
# Tasks
# ---------------------------------------------------------------------------

def task_zeta(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    model = _model_from_config(run.raw.get("model", {}))
    res = continue_zeta(model, run.tolerance)
    values = [
        _value("zeta_value_at_0", float(np.real(res.value_at_0)), 0.0,
               imag=float(np.imag(res.value_at_0))),
        _value("zeta_derivative_at_0", float(np.real(res.derivative_at_0)), run.tolerance,
               imag=float(np.imag(res.derivative_at_0))),
    ]
    rows = [(float(p), float(np.real(c)), float(np.imag(c))) for p, c in res.residues]
    tables = {"residues": (("pole", "residue_re", "residue_im"), rows)}
    return values, [], tables, {}


def task_det(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    model = _model_from_config(run.raw.get("model", {}))
    value = log_det(model, run.tolerance)
    return [_value("log_det", value, run.tolerance)], [], {}, {}


def task_torsion(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    if run.geometry is None:
        raise ValidationError("torsion task needs a geometry record")
    factor = run.geometry.factor1
    if not isinstance(factor, CircleFactor):
        raise ValidationError("torsion task runs on a circle factor")
    radii = run.radius_grid or [factor.radius]
    vals = _map_grid(
        lambda r: log_torsion(CircleFactor(r, factor.alpha).graded_spectrum(), run.tolerance),
        radii, threads)
    values = [_value(f"log_torsion[r={r:g}]", v, run.tolerance) for r, v in zip(radii, vals)]
    checks = []
    if len(radii) > 1:
        spread = max(vals) - min(vals)
        checks.append({"name": "metric-independence", "passed": spread < 3.0 * max(run.tolerance, 1e-12),
                       "spread": spread})
    tables = {"torsion": (("radius", "log_torsion"), list(zip(radii, vals)))}
    figs = {}
    if figures and len(radii) > 1:
        figs["torsion_scan"] = lambda p: figure_parameter_scan(
            p, radii, vals, "radius", "log T", "torsion across radii")
    return values, checks, tables, figs


def task_eta(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    rec = run.raw.get("eta", {})
    if "a" not in rec:
        raise ValidationError("eta task needs an 'eta' record with the offset 'a'")
    a = float(rec["a"])
    value = circle_eta(a, run.tolerance)
    return [_value("eta", value, run.tolerance, a=a)], [], {}, {}


def task_multitorsion(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    if run.geometry is None:
        raise ValidationError("multitorsion task needs a geometry record")
    geom = run.geometry
    report = validate_geometry(geom)
    if not report.passed:
        raise ValidationError("invalid geometry: " + "; ".join(report.messages))
    radii = run.radius_grid or [geom.factor1.radius]

    def mt_at(r1: float) -> float:
        g = dataclasses.replace(geom, factor1=dataclasses.replace(geom.factor1, radius=r1))
        data = quotient_weighted_trace(g, WEIGHTS["torsion"], WEIGHTS["torsion"])
        return multi_torsion(data, run.tolerance)

    vals = _map_grid(mt_at, radii, threads)
    values = [_value(f"multi_torsion[r1={r:g}]", v, 2.0 * run.tolerance) for r, v in zip(radii, vals)]
    checks = []
    if len(radii) > 1:
        spread = max(vals) - min(vals)
        checks.append({"name": "metric-independence", "passed": spread < 3.0 * max(run.tolerance, 1e-9),
                       "spread": spread})
    tables = {"multitorsion": (("radius1", "multi_torsion"), list(zip(radii, vals)))}
    figs = {}
    if figures and len(radii) > 1:
        figs["multitorsion_scan"] = lambda p: figure_parameter_scan(
            p, radii, vals, "factor-1 radius", "MT", "multi-torsion across radii")
    return values, checks, tables, figs


def task_trace(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    if not run.t_grid:
        raise ValidationError("trace task needs a nonempty t grid")
    if run.geometry is not None:
        geom = run.geometry
        data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
        vals = [data.evaluator(t, t, run.tolerance) for t in run.t_grid]
        label = "quotient diagonal t1 = t2"
    else:
        model = _model_from_config(run.raw.get("model", {}))
        vals = [model.evaluator(t, run.tolerance) for t in run.t_grid]
        label = model.label
    rows = [(t, float(np.real(v)), float(np.imag(v)), run.tolerance)
            for t, v in zip(run.t_grid, vals)]
    values = [_value("trace_points", float(len(rows)), 0.0)]
    tables = {"trace": (("t", "value_re", "value_im", "error_bound"), rows)}
    figs = {}
    if figures:
        figs["trace"] = lambda p: figure_trace(p, run.t_grid, [abs(v) for v in vals], label)
    return values, [], tables, figs


def task_verify(run: RunConfig, out: Path, fmt: str, figures: bool, threads: int):
    suite = run.raw.get("suite", "all")
    checks = run_suite(suite, tol=run.tolerance, seed=run.seed)
    values = [_value("checks_total", float(len(checks)), 0.0),
              _value("checks_passed", float(sum(1 for c in checks if c["passed"])), 0.0)]
    rows = [(c["name"], c["passed"]) for c in checks]
    tables = {"verify": (("check", "passed"), rows)}
    figs = {}
    if figures:
        steps = [4e-3, 2e-3, 1e-3, 5e-4]
        import heatzeta.matrixmodel as mm
        cx = mm.random_acyclic_complex([2, 2], seed=run.seed + 12)
        fam = mm.exp_metric_family(cx, 2, seed=run.seed + 13, scale=0.9)
        form_t = lambda u, i: mm.omega_torsion(fam, u, i)
        resid = [abs(mm.exterior_derivative_1(form_t, [0.35, -0.3], 0, 1, s)) for s in steps]
        figs["closedness_convergence"] = lambda p: figure_convergence(
            p, steps, resid, "torsion form closedness residual vs step")
    return values, checks, tables, figs


TASK_RUNNERS = {
    "zeta": task_zeta,
    "det": task_det,
    "torsion": task_torsion,
    "eta": task_eta,
    "multitorsion": task_multitorsion,
    "trace": task_trace,
    "verify": task_verify,
}


# ---------------------------------------------------------------------------
# Diagnostic least-squares expansion fit
# ---------------------------------------------------------------------------

def fit_expansion(samples: list[tuple[float, float]], candidate_powers: list[float]) -> dict:
    """Least-squares power-law coefficients from (t, value) samples.

    Diagnostic only: never used in certified evaluation paths.  Requires at
    least twice as many samples as candidate powers and a t range spanning
    two decades; refuses ill-conditioned design matrices.
    """
    if len(samples) < 2 * len(candidate_powers):
        raise ValidationError("need at least 2x as many samples as candidate powers")
    ts = np.array([t for t, _ in samples], dtype=float)
    ys = np.array([v for _, v in samples], dtype=float)
    if ts.min() <= 0:
        raise DomainError("sample times must be positive")
    if ts.max() / ts.min() < 100.0:
        raise ValidationError("sample t range must span at least two decades")
    design = np.column_stack([ts ** p for p in candidate_powers])
    # scale columns so conditioning reflects the basis, not raw magnitudes
    scales = np.linalg.norm(design, axis=0)
    cond = np.linalg.cond(design / scales)
    if cond > 1e12:
        raise ConditioningError(f"design matrix condition number {cond:.2e} too large")
    coeffs, *_ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coeffs
    return {
        "diagnostic": True,
        "powers": list(map(float, candidate_powers)),
        "coefficients": list(map(float, coeffs)),
        "residual_rms": float(np.sqrt(np.mean(resid ** 2))),
        "condition_number": float(cond),
    }


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def run(config_path: str, out_dir: str, tol: float | None = None,
        fmt: str = "both", seed: int | None = None, threads: int = 1,
        figures: bool = False) -> int:
    """Execute a config file; returns the process exit code."""
    t_start = time.perf_counter()
    try:
        cfg = load_config(config_path)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if tol is not None:
        cfg = {**cfg, "tolerance": tol}
    if seed is not None:
        cfg = {**cfg, "seed": seed}

    try:
        run_cfg = parse_run_config(cfg)
        values, checks, tables, figs = TASK_RUNNERS[run_cfg.task](
            run_cfg, Path(out_dir), fmt, figures, threads)
    except (ValidationError, DomainError, CapabilityError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AccuracyError, ConditioningError) as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wall = time.perf_counter() - t_start
    manifest = build_manifest(run_cfg, values, checks, wall, __version__)

    if fmt in ("json", "both"):
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if fmt in ("csv", "both"):
        for name, (header, rows) in tables.items():
            write_csv(out / f"{name}.csv", header, rows)
        summary = [(v["name"], v["value"], v["error_bound"]) for v in values]
        write_csv(out / "values.csv", ("name", "value", "error_bound"), summary)
    if figures:
        for name, render in figs.items():
            render(out / "figures" / f"{name}.png")

    for v in values:
        print(f"{v['name']} = {format_cell(v['value'])} (± {format_cell(v['error_bound'])})")
    for c in checks:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}")
    if not manifest["all_passed"]:
        print("some checks failed", file=sys.stderr)
        return EXIT_ACCURACY
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="heatzeta",
        description="zeta-regularized spectral invariants from explicit model spectra",
    )
    parser.add_argument("--config", required=True, help="path to a JSON (or TOML) run config")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--tol", type=float, default=None, help="override config tolerance")
    parser.add_argument("--format", choices=("json", "csv", "both"), default="both",
                        help="which artifacts to write")
    parser.add_argument("--seed", type=int, default=None, help="seed for matrix-model tasks")
    parser.add_argument("--threads", type=int, default=1, help="parallel workers for grids")
    parser.add_argument("--figures", action="store_true",
                        help="also render PNG figures next to the tables")
    args = parser.parse_args(argv)
    return run(args.config, args.out, tol=args.tol, fmt=args.format,
               seed=args.seed, threads=args.threads, figures=args.figures)


if __name__ == "__main__":
    sys.exit(main())
