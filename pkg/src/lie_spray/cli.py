"""Command-line front end: ``lie-spray <command> --config run.json --out results``.

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
3 a computation error. A manifest is written on every run.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Literal, Sequence

from .errors import ConfigError, ExpressionError, SprayGeometryError, UnknownAlgebraError
from .models import RunConfig, apply_overrides, load_config
from .records import OutputFormat, RunManifest, write_manifest, write_records
from .service import GeometryService
from .settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_ERROR = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, type=Path, help="Run configuration (JSON)")
    parser.add_argument("--out", default=Path("results"), type=Path, help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--format", choices=["records", "table"], default="records", help="Output format")
    parser.add_argument("--workers", type=int, default=None, help="Worker cap for batch evaluation")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lie-spray", description="Left-invariant spray geometry on Lie groups")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="Check the algebra, the norm and the spray")
    _common(validate)
    validate.add_argument("--samples", type=int, help="Random samples for spray checks")

    curvature = commands.add_parser("curvature", help="S-curvature and Riemann curvature at random directions")
    _common(curvature)
    curvature.add_argument("--samples", type=int, help="Number of random directions")

    geodesic = commands.add_parser("geodesic", help="Integrate a geodesic and reconstruct it in the group")
    _common(geodesic)
    geodesic.add_argument("--y0", type=float, nargs="+", help="Initial velocity in algebra coordinates")
    geodesic.add_argument("--t-span", type=float, nargs=2, metavar=("A", "B"), help="Time interval, A <= 0 <= B")
    geodesic.add_argument("--method", choices=["rk4", "rk45_adaptive"], help="Integrator")
    geodesic.add_argument("--atol", type=float, help="Absolute tolerance")
    geodesic.add_argument("--rtol", type=float, help="Relative tolerance")
    geodesic.add_argument("--output-step", type=float, help="Spacing of recorded samples")

    flow = commands.add_parser("flow", help="Probe completeness of the geodesic flow")
    _common(flow)
    flow.add_argument("--y0", type=float, nargs="+", help="Probe a single direction")
    flow.add_argument("--horizon", type=float, help="Integration horizon T")
    flow.add_argument("--directions", type=int, help="Number of probe directions")

    surface = commands.add_parser("surface", help="Indicatrix scan and Landsberg diagnostic (dimension 2)")
    _common(surface)
    surface.add_argument("--resolution", type=int, help="Scan points on the indicatrix")
    surface.add_argument("--flow-time", type=float, help="Flow time along each arc")
    surface.add_argument("--scan-only", action="store_true", default=None, help="Skip the flow diagnostic")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    names = {
        "seed": "seed",
        "samples": "samples",
        "y0": "y0",
        "t_span": "integrator.t_span",
        "method": "integrator.method",
        "atol": "integrator.atol",
        "rtol": "integrator.rtol",
        "output_step": "integrator.output_step",
        "horizon": "horizon",
        "directions": "directions",
        "resolution": "resolution",
        "flow_time": "flow_time",
        "scan_only": "scan_only",
    }
    return {key: getattr(args, attr) for attr, key in names.items() if getattr(args, attr, None) is not None}


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def run(
    command: str,
    config: RunConfig,
    out_dir: Path,
    output_format: OutputFormat = "records",
    max_workers: int | None = None,
) -> tuple[int, RunManifest]:
    """Run one command and write its records and manifest."""
    started = time.perf_counter()
    suffix = "tsv" if output_format == "table" else "jsonl"
    records_path = out_dir / f"{command}.{suffix}"
    checks: dict[str, bool] = {}
    error: dict[str, Any] | None = None
    records: list[dict[str, Any]] = []
    status: Literal["ok", "checks_failed", "config_error", "error"]
    try:
        service = GeometryService(config, max_workers or get_settings().max_workers)
        result = service.run(command)
        records, checks = result.records, result.checks
        code = EXIT_OK if result.passed else EXIT_CHECKS_FAILED
        status = "ok" if result.passed else "checks_failed"
    except (ConfigError, UnknownAlgebraError, ExpressionError) as exc:
        code, status = EXIT_CONFIG_ERROR, "config_error"
        error = _error_record(exc)
    except SprayGeometryError as exc:
        logger.error("%s failed: %s", command, exc)
        code, status = EXIT_ERROR, "error"
        error = _error_record(exc)
    except Exception as exc:
        logger.exception("%s failed with an unexpected error", command)
        code, status = EXIT_ERROR, "error"
        error = _error_record(exc)
    if error is not None:
        records.append(error)
    write_records(records, records_path, output_format)
    manifest = RunManifest(
        command=command,
        config=config.model_dump(by_alias=True),
        seed=config.seed,
        status=status,
        exit_code=code,
        checks=checks,
        error=error,
        outputs=[records_path.name],
        wall_time_s=time.perf_counter() - started,
    )
    write_manifest(manifest, out_dir)
    return code, manifest


def _error_record(exc: Exception) -> dict[str, Any]:
    details = exc.details() if isinstance(exc, SprayGeometryError) else {}
    return {"kind": "error", "error": type(exc).__name__, "message": str(exc), **details}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = apply_overrides(load_config(args.config), _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        write_manifest(
            RunManifest(
                command=args.command,
                status="config_error",
                exit_code=EXIT_CONFIG_ERROR,
                error=_error_record(exc),
            ),
            args.out,
        )
        return EXIT_CONFIG_ERROR
    code, manifest = run(args.command, config, args.out, args.format, args.workers)
    failed = [name for name, ok in manifest.checks.items() if not ok]
    print(f"Saved {manifest.outputs[0]} and manifest.json to {args.out} ({manifest.status})")
    if failed:
        print(f"failed checks: {', '.join(failed)}")
    if manifest.error is not None:
        print(f"{manifest.error['error']}: {manifest.error['message']}", file=sys.stderr)
    return code


def cli() -> None:
    sys.exit(main())

