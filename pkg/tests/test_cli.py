from __future__ import annotations

import json
from pathlib import Path

import pytest

from lie_spray import cli
from lie_spray.records import dumps_record, render_table
from lie_spray.settings import get_settings, reset_settings
from lie_spray.utils import parallel_map

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def run_cli(command: str, fixture: str, out: Path, *extra: str) -> int:
    return cli.main([command, "--config", str(FIXTURES_DIR / fixture), "--out", str(out), *extra])


def read_records(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def write_config(directory: Path, data: dict) -> Path:
    path = directory / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def read_manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture
def fresh_settings():
    reset_settings()
    yield
    reset_settings()


def test_curvature_of_bi_invariant_su2(tmp_path: Path):
    assert run_cli("curvature", "su2_zero.json", tmp_path) == cli.EXIT_OK
    records = read_records(tmp_path / "curvature.jsonl")
    samples = [r for r in records if r["kind"] == "curvature"]
    assert len(samples) == 20
    summary = records[-1]
    assert summary["kind"] == "summary"
    assert summary["max_bi_invariant_delta"] < 1e-12
    manifest = read_manifest(tmp_path)
    assert manifest["status"] == "ok"
    assert manifest["seed"] == 7
    assert manifest["checks"]["bi_invariant_closed_form"] is True
    assert all(r["schema_version"] == 1 for r in records)


def test_reruns_are_byte_identical(tmp_path: Path):
    run_cli("curvature", "su2_zero.json", tmp_path / "a", "--samples", "5")
    run_cli("curvature", "su2_zero.json", tmp_path / "b", "--samples", "5")
    first = (tmp_path / "a" / "curvature.jsonl").read_bytes()
    assert first == (tmp_path / "b" / "curvature.jsonl").read_bytes()
    assert len(first.splitlines()) == 6


def test_seed_override_changes_the_sample(tmp_path: Path):
    run_cli("curvature", "su2_zero.json", tmp_path / "a", "--samples", "2")
    run_cli("curvature", "su2_zero.json", tmp_path / "b", "--samples", "2", "--seed", "8")
    assert read_records(tmp_path / "a" / "curvature.jsonl")[0]["y"] != read_records(tmp_path / "b" / "curvature.jsonl")[0]["y"]
    assert read_manifest(tmp_path / "b")["seed"] == 8


def test_flow_detects_blowup(tmp_path: Path):
    assert run_cli("flow", "blowup_plane.json", tmp_path) == cli.EXIT_OK
    records = read_records(tmp_path / "flow.jsonl")
    summary = records[-1]
    assert summary["kind"] == "completeness"
    assert summary["complete"] is False
    assert summary["min_forward_blowup_time"] == pytest.approx(1.0, rel=1e-2)
    assert summary["backward_blowups"] == 0


def test_geodesic_command(tmp_path: Path):
    assert run_cli("geodesic", "aff1_euclidean.json", tmp_path) == cli.EXIT_OK
    records = read_records(tmp_path / "geodesic.jsonl")
    residuals = records[-1]
    assert residuals["kind"] == "residuals"
    assert residuals["differencing_dominated"] is False
    assert residuals["eta_residual"] < 1e-6
    samples = [r for r in records if r["kind"] == "sample"]
    assert samples[0]["t"] == 0.0 and samples[-1]["t"] == 5.0
    assert len(samples[0]["c"]) == 4


def test_coarse_geodesic_fails_the_differencing_check(tmp_path: Path):
    code = run_cli("geodesic", "aff1_euclidean.json", tmp_path, "--output-step", "0.5")
    assert code == cli.EXIT_CHECKS_FAILED
    manifest = read_manifest(tmp_path)
    assert manifest["status"] == "checks_failed"
    assert manifest["checks"]["differencing_resolved"] is False


def test_surface_command(tmp_path: Path):
    assert run_cli("surface", "aff1_randers.json", tmp_path) == cli.EXIT_OK
    records = read_records(tmp_path / "surface.jsonl")
    landsberg = records[-1]
    assert landsberg["kind"] == "landsberg"
    assert landsberg["landsberg_consistent"] is False
    assert landsberg["branch"] == "not_landsberg"
    assert len([r for r in records if r["kind"] == "eta_zero"]) == 2


def test_surface_scan_only_writes_a_table(tmp_path: Path):
    assert run_cli("surface", "aff1_randers.json", tmp_path, "--scan-only", "--format", "table") == cli.EXIT_OK
    text = (tmp_path / "surface.tsv").read_text(encoding="utf-8")
    assert text.splitlines()[0] == "# schema_version=1"
    assert "# kind=scan" in text
    assert "# kind=landsberg" not in text


def test_validate_heisenberg_definition_file(tmp_path: Path):
    assert run_cli("validate", "heisenberg_file.json", tmp_path) == cli.EXIT_OK
    algebra = read_records(tmp_path / "validate.jsonl")[0]
    assert algebra["kind"] == "algebra"
    assert algebra["center_dimension"] == 1


def test_config_error_still_writes_a_manifest(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    assert run_cli("validate", "unknown_key.json", tmp_path) == cli.EXIT_CONFIG_ERROR
    assert "unknown key 'sprey'" in capsys.readouterr().err
    manifest = read_manifest(tmp_path)
    assert manifest["status"] == "config_error"
    assert manifest["exit_code"] == 2
    assert manifest["error"]["key_path"] == "sprey"


def test_computation_error_exit_code(tmp_path: Path):
    config = tmp_path / "su2_surface.json"
    config.write_text('{"algebra": {"builtin": "su2"}, "norm": {"kind": "quadratic"}}', encoding="utf-8")
    out = tmp_path / "out"
    assert cli.main(["surface", "--config", str(config), "--out", str(out)]) == cli.EXIT_ERROR
    records = read_records(out / "surface.jsonl")
    assert records[-1]["kind"] == "error"
    assert records[-1]["error"] == "DimensionMismatchError"
    assert read_manifest(out)["status"] == "error"


def test_scan_resolution_below_four_is_a_config_error(tmp_path: Path):
    config = write_config(tmp_path, {"algebra": {"builtin": "aff1"}, "norm": {"kind": "quadratic"}, "resolution": 3})
    out = tmp_path / "out"
    assert cli.main(["surface", "--config", str(config), "--out", str(out)]) == cli.EXIT_CONFIG_ERROR
    manifest = read_manifest(out)
    assert manifest["status"] == "config_error"
    assert manifest["error"]["key_path"] == "resolution"


def test_malformed_inline_constant_is_a_config_error(tmp_path: Path):
    inline = {"dim": 2, "constants": [[1, 2, "x", 1.0]]}
    config = write_config(tmp_path, {"algebra": {"inline": inline}, "spray": {"source": "zero"}})
    out = tmp_path / "out"
    assert cli.main(["validate", "--config", str(config), "--out", str(out)]) == cli.EXIT_CONFIG_ERROR
    assert read_manifest(out)["error"]["key_path"] == "algebra.inline.constants[0][2]"


def test_unexpected_failure_still_writes_a_manifest(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    def broken(self, command: str):
        raise RuntimeError("lost the scan")

    monkeypatch.setattr(cli.GeometryService, "run", broken)
    assert run_cli("validate", "su2_zero.json", tmp_path) == cli.EXIT_ERROR
    manifest = read_manifest(tmp_path)
    assert manifest["status"] == "error"
    assert manifest["error"]["error"] == "RuntimeError"
    assert manifest["error"]["message"] == "lost the scan"
    assert read_records(tmp_path / "validate.jsonl")[-1]["kind"] == "error"


def test_geodesic_without_start_vector_is_a_config_error(tmp_path: Path):
    assert run_cli("geodesic", "su2_zero.json", tmp_path) == cli.EXIT_CONFIG_ERROR
    assert read_manifest(tmp_path)["error"]["key_path"] == "y0"


def test_record_serialisation():
    assert dumps_record({"x": 0.1}) == '{"x": 0.10000000000000001}'
    assert dumps_record({"b": float("nan"), "a": [1, None, True]}) == '{"a": [1, null, true], "b": "NaN"}'
    table = render_table([{"kind": "flow", "y0": [1.0, 0.5], "t": 1.0 / 3.0}])
    assert table.splitlines()[1:] == ["# kind=flow", "kind\ty0[0]\ty0[1]\tt", "flow\t1\t0.5\t0.333333"]


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch, fresh_settings):
    monkeypatch.setenv("LIE_SPRAY_MAX_WORKERS", "3")
    reset_settings()
    assert get_settings().max_workers == 3
    assert parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
