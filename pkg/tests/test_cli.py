"""CLI contract tests: exit codes, manifests, determinism, tables, figures."""

import json
import math
import sys

import numpy as np
import pytest

from heatzeta.cli import fit_expansion, run
from heatzeta.config import config_hash
from heatzeta.errors import ConditioningError, ValidationError


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


TORSION_CFG = {
    "schema_version": 1,
    "task": "torsion",
    "tolerance": 1e-10,
    "geometry": {"factors": [{"radius": 1.0, "alpha": 0.5}]},
}


class TestRun:
    def test_torsion_manifest(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", TORSION_CFG)
        out = tmp_path / "out"
        assert run(cfg, str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        value = manifest["values"][0]
        assert abs(value["value"] - math.log(2.0)) < 1e-8
        assert value["error_bound"] <= 1e-9
        assert manifest["config_sha256"] == config_hash(manifest["config"])

    def test_manifest_roundtrip(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", TORSION_CFG)
        out = tmp_path / "out"
        run(cfg, str(out))
        text = (out / "manifest.json").read_text()
        manifest = json.loads(text)
        assert json.loads(json.dumps(manifest)) == manifest

    def test_determinism(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            **TORSION_CFG, "grids": {"radius1": [0.7, 1.0, 1.3]}})
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(cfg, str(out1)) == 0
        assert run(cfg, str(out2)) == 0
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        assert m1["values"] == m2["values"]
        assert m1["checks"] == m2["checks"]
        assert (out1 / "torsion.csv").read_text() == (out2 / "torsion.csv").read_text()

    def test_csv_has_17_significant_digits(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", TORSION_CFG)
        out = tmp_path / "out"
        run(cfg, str(out))
        lines = (out / "torsion.csv").read_text().strip().splitlines()
        assert lines[0] == "radius,log_torsion"
        val = lines[1].split(",")[1]
        assert float(val) == float(f"{float(val):.17g}")
        assert len(val.replace(".", "").replace("-", "").lstrip("0")) >= 16

    def test_parse_error_exit_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ this is not json")
        assert run(str(path), str(tmp_path / "out")) == 2

    def test_validation_error_exit_3(self, tmp_path):
        bad = {**TORSION_CFG, "geometry": {"factors": [{"radius": -1.0, "alpha": 0.5}]}}
        cfg = write_config(tmp_path, "bad.json", bad)
        assert run(cfg, str(tmp_path / "out")) == 3

    def test_unknown_task_exit_3(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {**TORSION_CFG, "task": "nonsense"})
        assert run(cfg, str(tmp_path / "out")) == 3

    def test_tolerance_range_enforced(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {**TORSION_CFG, "tolerance": 1.0})
        assert run(cfg, str(tmp_path / "out")) == 3

    def test_eta_task(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "eta", "tolerance": 1e-10, "eta": {"a": 0.9}})
        out = tmp_path / "out"
        assert run(cfg, str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert abs(manifest["values"][0]["value"] + 0.8) < 1e-8

    def test_trace_task_with_figures(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "trace", "tolerance": 1e-12,
            "model": {"circle": {"radius": 1.0, "alpha": 0.5}},
            "grids": {"t": [0.01, 0.1, 1.0, 10.0]},
        })
        out = tmp_path / "out"
        assert run(cfg, str(out), figures=True) == 0
        assert (out / "trace.csv").exists()
        assert (out / "figures" / "trace.png").exists()
        rows = (out / "trace.csv").read_text().strip().splitlines()[1:]
        t1_value = float(rows[2].split(",")[1])
        assert abs(t1_value - 1.7722704969843800) < 1e-11

    def test_verify_task(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "verify", "suite": "adjoint",
            "tolerance": 1e-8, "seed": 0})
        out = tmp_path / "out"
        assert run(cfg, str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["all_passed"]
        assert manifest["checks"]

    def test_zeta_task(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "zeta", "tolerance": 1e-10,
            "model": {"spectrum": {"entries": [[1.0, 1]]}}})
        out = tmp_path / "out"
        assert run(cfg, str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        by_name = {v["name"]: v for v in manifest["values"]}
        assert by_name["zeta_value_at_0"]["value"] == 1.0
        assert abs(by_name["zeta_derivative_at_0"]["value"]) < 1e-11

    def test_unsorted_grid_rejected(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {
            **TORSION_CFG, "grids": {"radius1": [1.3, 0.7]}})
        assert run(cfg, str(tmp_path / "out")) == 3

    @pytest.mark.skipif(sys.version_info >= (3, 11), reason="tomllib present on 3.11+")
    def test_toml_needs_modern_python(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('task = "eta"\n')
        assert run(str(path), str(tmp_path / "out")) == 2

    def test_threads_do_not_change_values(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            **TORSION_CFG, "grids": {"radius1": [0.7, 1.0, 1.3]}})
        out1, out2 = tmp_path / "seq", tmp_path / "par"
        assert run(cfg, str(out1), threads=1) == 0
        assert run(cfg, str(out2), threads=3) == 0
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        assert m1["values"] == m2["values"]

    def test_accuracy_error_exit_4(self, tmp_path, monkeypatch):
        from heatzeta.errors import AccuracyError
        import heatzeta.cli as cli_mod

        def boom(*args, **kwargs):
            raise AccuracyError("quadrature budget missed")

        monkeypatch.setattr(cli_mod, "log_torsion", boom)
        cfg = write_config(tmp_path, "run.json", TORSION_CFG)
        assert run(cfg, str(tmp_path / "out")) == 4

    def test_failed_check_exit_4(self, tmp_path, monkeypatch):
        import heatzeta.cli as cli_mod

        monkeypatch.setattr(cli_mod, "run_suite",
                            lambda *a, **k: [{"name": "synthetic", "passed": False}])
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "verify", "suite": "adjoint", "tolerance": 1e-8})
        assert run(cfg, str(tmp_path / "out")) == 4

    def test_quotient_trace_task(self, tmp_path):
        cfg = write_config(tmp_path, "run.json", {
            "schema_version": 1, "task": "trace", "tolerance": 1e-10,
            "geometry": {"factors": [{"radius": 1.0, "alpha": 0.5},
                                     {"radius": 1.0, "alpha": 0.5}]},
            "grids": {"t": [0.5, 1.0, 2.0]},
        })
        out = tmp_path / "out"
        assert run(cfg, str(out)) == 0
        rows = (out / "trace.csv").read_text().strip().splitlines()[1:]
        # diagonal of the product trace: (-theta(t))^2 at t = 1
        expected = 1.7722704969843800 ** 2
        assert abs(float(rows[1].split(",")[1]) - expected) < 1e-9


class TestFitExpansion:
    def test_recovers_exact_power(self):
        ts = np.logspace(-3, 0, 24)
        samples = [(float(t), math.sqrt(math.pi) * t ** -0.5) for t in ts]
        rep = fit_expansion(samples, [-0.5])
        assert abs(rep["coefficients"][0] - math.sqrt(math.pi)) < 1e-8
        assert rep["diagnostic"] is True

    def test_circle_trace_expansion(self):
        from heatzeta.spectral import circle_spectrum, spectrum_trace_model
        model = spectrum_trace_model(circle_spectrum(1.0, 0.5))
        ts = np.logspace(-3, -0.5, 30)
        samples = [(float(t), float(np.real(model.evaluator(float(t), 1e-13)))) for t in ts]
        rep = fit_expansion(samples, [-0.5, 0.0, 0.5])
        assert abs(rep["coefficients"][0] - math.sqrt(math.pi)) < 1e-8
        assert abs(rep["coefficients"][1]) < 1e-8
        assert abs(rep["coefficients"][2]) < 1e-7

    def test_noise_floor_reported(self):
        rng = np.random.default_rng(0)
        ts = np.logspace(-3, 0, 40)
        sigma = 1e-3
        samples = [(float(t), float(t ** -0.5 + sigma * rng.normal())) for t in ts]
        rep = fit_expansion(samples, [-0.5])
        assert rep["residual_rms"] >= 0.3 * sigma

    def test_needs_enough_samples(self):
        with pytest.raises(ValidationError):
            fit_expansion([(0.001, 1.0), (1.0, 2.0)], [-0.5, 0.0])

    def test_needs_two_decades(self):
        samples = [(0.1 * (1 + i / 10.0), 1.0) for i in range(8)]
        with pytest.raises(ValidationError):
            fit_expansion(samples, [0.0])

    def test_ill_conditioned_rejected(self):
        ts = np.logspace(-3, 0, 40)
        samples = [(float(t), float(t)) for t in ts]
        with pytest.raises(ConditioningError):
            fit_expansion(samples, [0.0, 1e-9, 2e-9])
