"""GeometryService: builds the algebra, norm and spray of a run config and runs one command."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import curvature, surface
from .algebra import LieAlgebra, algebra_from_definition, builtin, read_algebra, validate
from .errors import ConfigError
from .geodesic import completeness_probe, geodesic, verify_geodesic_ode
from .minkowski import ExpressionNorm, MinkowskiNorm, QuadraticNorm, RandersNorm, check_convexity
from .models import NormConfig, RunConfig
from .spray import SprayVectorField, check_spray
from .utils import random_directions

logger = logging.getLogger(__name__)

COMMANDS = ("validate", "curvature", "geodesic", "flow", "surface")

ORACLE_S_TOLERANCE = 1e-6
ORACLE_R_TOLERANCE = 1e-5
BI_INVARIANT_TOLERANCE = 1e-12
SPEED_DRIFT_TOLERANCE = 1e-7
RESIDUAL_TOLERANCE = 1e-5


@dataclass
class RunResult:
    records: list[dict[str, Any]] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def build_algebra(config: RunConfig) -> LieAlgebra:
    section = config.algebra
    if section.builtin is not None:
        return builtin(section.builtin)
    if section.file is not None:
        try:
            return read_algebra(Path(section.file))
        except FileNotFoundError as exc:
            raise ConfigError(str(exc), key_path="algebra.file") from exc
    if section.inline is not None:
        return algebra_from_definition(section.inline, "<inline>", key_prefix="algebra.inline.")
    raise ConfigError("give exactly one of builtin, file or inline", key_path="algebra")


def build_norm(section: NormConfig, dim: int) -> MinkowskiNorm:
    Q = np.eye(dim) if section.q is None else np.array(section.q, dtype=float)
    if Q.shape != (dim, dim):
        raise ConfigError(f"norm.Q must be {dim}x{dim} for this algebra", key_path="norm.Q")
    if section.kind == "quadratic":
        return QuadraticNorm.from_matrix(Q, section.derivatives)
    if section.kind == "randers":
        if section.b is None or len(section.b) != dim:
            raise ConfigError(f"norm.b must have {dim} entries", key_path="norm.b")
        return RandersNorm.from_data(Q, section.b, section.derivatives)
    return ExpressionNorm.from_text(section.expr or "", dim)


class GeometryService:
    """Holds the objects a run config describes; one method per CLI command."""

    def __init__(self, config: RunConfig, max_workers: int | None = None) -> None:
        self.config = config
        self.max_workers = max_workers
        self.algebra = build_algebra(config)
        self.norm = build_norm(config.norm, self.algebra.dim) if config.norm is not None else None
        self.spray = self._build_spray()

    def _build_spray(self) -> SprayVectorField:
        section = self.config.spray
        if section.source == "zero":
            return SprayVectorField.zero(self.algebra.dim)
        if section.source == "closed_form":
            return SprayVectorField.closed_form(section.expressions or [], self.algebra.dim)
        assert self.norm is not None
        return SprayVectorField.from_metric(self.algebra, self.norm)

    def run(self, command: str) -> RunResult:
        handlers: dict[str, Callable[[], RunResult]] = {
            "validate": self.validate,
            "curvature": self.curvature,
            "geodesic": self.geodesic,
            "flow": self.flow,
            "surface": self.surface,
        }
        if command not in handlers:
            raise ConfigError(f"unknown command {command!r}; choose one of {', '.join(COMMANDS)}")
        return handlers[command]()

    def validate(self) -> RunResult:
        result = RunResult()
        report = validate(self.algebra)
        result.records.append({"kind": "algebra", **asdict(report), "ok": report.ok})
        result.checks["algebra_structure"] = report.ok
        if self.norm is not None:
            convexity = check_convexity(self.norm, seed=self.config.seed)
            result.records.append(
                {"kind": "norm", **asdict(convexity), "strongly_convex": convexity.strongly_convex}
            )
            result.checks["norm_strongly_convex"] = convexity.strongly_convex
            result.checks["norm_homogeneous"] = convexity.homogeneous
        sprays = check_spray(self.spray, self.algebra, count=self.config.samples, seed=self.config.seed)
        result.records.append({"kind": "spray", "source": self.spray.source, **asdict(sprays)})
        result.checks["spray_homogeneous"] = max(sprays.homogeneity_error, sprays.connection_homogeneity_error) < 1e-6
        if sprays.tangency_residual is not None:
            result.checks["spray_tangent_to_indicatrix"] = sprays.tangency_residual < 1e-8
        return result

    def curvature(self) -> RunResult:
        result = RunResult()
        reports = curvature.sample_curvature(
            self.spray, self.algebra, self.config.samples, self.config.seed, self.max_workers
        )
        result.records.extend({"kind": "curvature", **r.as_record()} for r in reports)
        worst_s = max(r.oracle_deltas["S"] for r in reports)
        worst_r = max(r.oracle_deltas["R"] for r in reports)
        summary: dict[str, Any] = {
            "kind": "summary",
            "samples": len(reports),
            "max_oracle_delta_S": worst_s,
            "max_oracle_delta_R": worst_r,
        }
        result.checks["oracle_S"] = worst_s < ORACLE_S_TOLERANCE
        result.checks["oracle_R"] = worst_r < ORACLE_R_TOLERANCE
        if self.spray.source == "zero":
            worst = 0.0
            for report in reports:
                s_expected, r_expected = curvature.bi_invariant_oracle(self.algebra, report.y)
                worst = max(worst, abs(report.s_value - s_expected), float(np.max(np.abs(report.r_matrix - r_expected))))
            summary["max_bi_invariant_delta"] = worst
            result.checks["bi_invariant_closed_form"] = worst < BI_INVARIANT_TOLERANCE
        result.records.append(summary)
        return result

    def _start_vector(self) -> np.ndarray:
        if self.config.y0 is None:
            raise ConfigError("y0 is required for this command", key_path="y0")
        return np.array(self.config.y0, dtype=float)

    def geodesic(self) -> RunResult:
        result = RunResult()
        g0 = None if self.config.g0 == "identity" else np.array(self.config.g0, dtype=float)
        reconstruct = self.algebra.rep is not None
        if not reconstruct:
            logger.warning("algebra %r has no matrix representation; only the algebra curve is integrated", self.algebra.name)
        trace = geodesic(self.spray, self.algebra, self._start_vector(), g0, self.config.integrator, reconstruct)
        residuals = verify_geodesic_ode(trace, self.spray, self.algebra)
        result.records.extend(trace.as_records())
        result.records.append(residuals.as_record())
        if trace.speed_drift is not None:
            result.checks["speed_conserved"] = trace.speed_drift < SPEED_DRIFT_TOLERANCE
        result.checks["differencing_resolved"] = not residuals.differencing_dominated
        if not residuals.differencing_dominated:
            result.checks["eta_residual"] = residuals.eta_residual < RESIDUAL_TOLERANCE
            if residuals.pullback_residual is not None:
                result.checks["pullback_residual"] = residuals.pullback_residual < RESIDUAL_TOLERANCE
        return result

    def _probe_directions(self) -> list[np.ndarray]:
        count = self.config.directions
        if self.algebra.dim == 2:
            angles = 2.0 * math.pi * np.arange(count) / count
            return [np.array([math.cos(a), math.sin(a)]) for a in angles]
        return list(random_directions(self.algebra.dim, count, self.config.seed))

    def flow(self) -> RunResult:
        result = RunResult()
        directions = [self._start_vector()] if self.config.y0 is not None else self._probe_directions()
        report = completeness_probe(
            self.spray, self.algebra, directions, self.config.horizon, self.config.integrator, self.max_workers
        )
        result.records.extend(r.as_record() for r in report.results)
        result.records.append(report.as_record())
        if self.norm is not None and self.spray.source == "metric":
            result.checks["metric_flow_complete"] = report.complete
        return result

    def surface(self) -> RunResult:
        if self.norm is None:
            raise ConfigError("surface diagnostics need a norm", key_path="norm")
        result = RunResult()
        scan = surface.scan_indicatrix(self.algebra, self.norm, self.config.resolution, self.max_workers)
        zeros = surface.eta_zeros(scan)
        result.records.extend(scan.as_records())
        result.records.extend(zeros.as_records())
        identity_gap = float(np.max(np.abs(scan.cartan_scalar - scan.mean_cartan)))
        result.records.append(
            {
                "kind": "scan_summary",
                "points": int(scan.angles.shape[0]),
                "zeros": len(zeros.zeros),
                "indicatrix_error": scan.indicatrix_error,
                "normalization_error": scan.normalization_error,
                "orthogonality_error": scan.orthogonality_error,
                "mean_cartan_gap": identity_gap,
            }
        )
        result.checks["on_indicatrix"] = scan.indicatrix_error < 1e-10
        result.checks["w_normalized"] = max(scan.normalization_error, scan.orthogonality_error) < 1e-8
        result.checks["mean_cartan_identity"] = identity_gap < 1e-5
        result.checks["zeros_even"] = len(zeros.zeros) % 2 == 0
        if zeros.characterization_holds is not None:
            result.checks["zeros_in_derived_direction"] = zeros.characterization_holds
        if not self.config.scan_only:
            report = surface.landsberg_diagnostic(
                self.algebra,
                self.norm,
                self.config.integrator,
                flow_time=self.config.flow_time,
                tolerance=self.config.landsberg_tolerance,
                scan=scan,
            )
            result.records.append(report.as_record())
        return result
