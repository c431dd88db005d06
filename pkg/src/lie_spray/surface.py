"""Two-dimensional diagnostics: η on the indicatrix, its zeros, and the Cartan
scalar transported along the indicatrix flow.

On a non-abelian two-dimensional algebra η vanishes at exactly two indicatrix
points, and the flow of −η runs along the two open arcs between them. A
Landsberg surface keeps C_y(w, w, w) constant along each arc; comparing the
arc constants with the maximum of |C| separates the Riemannian branch from
the rest.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid
from scipy.optimize import bisect

from .algebra import LieAlgebra
from .errors import DegenerateScanError, DimensionMismatchError, FlowAtZeroError
from .geodesic import integrate_eta
from .minkowski import MinkowskiNorm, cartan, fundamental_tensor, indicatrix_point, mean_cartan
from .models import IntegratorConfig
from .spray import SprayVectorField, eta_eval
from .utils import Vector, as_nonzero_vector, parallel_map

logger = logging.getLogger(__name__)

ROOT_TOLERANCE = 1e-10
CHARACTERIZATION_TOLERANCE = 1e-7
ZERO_TOLERANCE = 1e-13
LANDSBERG_TOLERANCE = 1e-4

Branch = Literal["riemannian", "locally_minkowskian", "not_landsberg", "inconclusive"]


def _require_surface(algebra: LieAlgebra, norm: MinkowskiNorm) -> None:
    if algebra.dim != 2:
        raise DimensionMismatchError(2, algebra.dim, "algebra (surface diagnostics)")
    if norm.dim != 2:
        raise DimensionMismatchError(2, norm.dim, "norm")


@dataclass(frozen=True)
class FramePoint:
    """Indicatrix point y with its tangent data and the g_y-unit normal w."""

    y: Vector
    eta: Vector
    eta_tangential: float
    w: Vector
    indicatrix_error: float
    normalization_error: float
    orthogonality_error: float


def frame_point(spray: SprayVectorField, norm: MinkowskiNorm, y: Vector) -> FramePoint:
    g = fundamental_tensor(norm, y)
    gradient = g @ y
    # counter-clockwise tangent to the level set through y
    tangent = np.array([-gradient[1], gradient[0]])
    eta = eta_eval(spray, y)
    w = tangent / math.sqrt(float(tangent @ g @ tangent))
    return FramePoint(
        y=y,
        eta=eta,
        eta_tangential=float(eta @ tangent) / float(np.linalg.norm(tangent)),
        w=w,
        indicatrix_error=abs(norm(y) - 1.0),
        normalization_error=abs(float(w @ g @ w) - 1.0),
        orthogonality_error=abs(float(y @ g @ w)),
    )


@dataclass(frozen=True, eq=False)
class IndicatrixScan:
    algebra: LieAlgebra
    norm: MinkowskiNorm
    angles: NDArray[np.float64]
    points: NDArray[np.float64]
    eta_tangential: NDArray[np.float64]
    w_values: NDArray[np.float64]
    cartan_scalar: NDArray[np.float64]
    mean_cartan: NDArray[np.float64]
    brackets: tuple[tuple[float, float], ...]
    identically_zero: bool
    indicatrix_error: float
    normalization_error: float
    orthogonality_error: float

    def as_records(self) -> list[dict[str, Any]]:
        return [
            {
                "kind": "scan",
                "theta": float(theta),
                "y": self.points[k].tolist(),
                "F": float(self.norm(self.points[k])),
                "eta_tangential": float(self.eta_tangential[k]),
                "cartan_scalar": float(self.cartan_scalar[k]),
                "mean_cartan": float(self.mean_cartan[k]),
            }
            for k, theta in enumerate(self.angles)
        ]


def _angle_point(norm: MinkowskiNorm, theta: float) -> Vector:
    return indicatrix_point(norm, np.array([math.cos(theta), math.sin(theta)]))


def scan_indicatrix(
    algebra: LieAlgebra, norm: MinkowskiNorm, resolution: int = 720, max_workers: int | None = None
) -> IndicatrixScan:
    """Sample η, w and the Cartan scalar at ``resolution`` equally spaced Euclidean angles."""
    _require_surface(algebra, norm)
    if resolution < 4:
        raise DegenerateScanError(f"resolution must be at least 4, got {resolution}")
    spray = SprayVectorField.from_metric(algebra, norm)
    angles = 2.0 * np.pi * np.arange(resolution) / resolution

    def sample(theta: float) -> tuple[FramePoint, float, float]:
        point = frame_point(spray, norm, _angle_point(norm, theta))
        w = point.w
        return point, cartan(norm, point.y, w, w, w), mean_cartan(norm, point.y, w)

    samples = parallel_map(sample, list(angles), max_workers)
    frames = [s[0] for s in samples]
    tangential = np.array([f.eta_tangential for f in frames])
    scale = max(1.0, float(np.max(np.abs(tangential))))
    identically_zero = bool(np.all(np.abs(tangential) <= ZERO_TOLERANCE * scale))
    brackets: list[tuple[float, float]] = []
    if not identically_zero:
        step = 2.0 * np.pi / resolution
        for k in range(resolution):
            a = tangential[k]
            b = tangential[(k + 1) % resolution]
            if abs(a) <= ZERO_TOLERANCE * scale:
                brackets.append((float(angles[k]), float(angles[k])))
            elif abs(b) > ZERO_TOLERANCE * scale and a * b < 0.0:
                brackets.append((float(angles[k]), float(angles[k]) + step))
    return IndicatrixScan(
        algebra=algebra,
        norm=norm,
        angles=angles,
        points=np.array([f.y for f in frames]),
        eta_tangential=tangential,
        w_values=np.array([f.w for f in frames]),
        cartan_scalar=np.array([s[1] for s in samples]),
        mean_cartan=np.array([s[2] for s in samples]),
        brackets=tuple(brackets),
        identically_zero=identically_zero,
        indicatrix_error=max(f.indicatrix_error for f in frames),
        normalization_error=max(f.normalization_error for f in frames),
        orthogonality_error=max(f.orthogonality_error for f in frames),
    )


@dataclass(frozen=True)
class EtaZero:
    angle: float
    y: Vector
    derived_residual: float | None  # |g_y(y, d)| for the unit spanning vector d of [g, g]


@dataclass(frozen=True)
class ZeroReport:
    identically_zero: bool
    zeros: tuple[EtaZero, ...]

    @property
    def characterization_holds(self) -> bool | None:
        residuals = [z.derived_residual for z in self.zeros if z.derived_residual is not None]
        if not residuals:
            return None
        return max(residuals) < CHARACTERIZATION_TOLERANCE

    def as_records(self) -> list[dict[str, Any]]:
        if self.identically_zero:
            return [{"kind": "eta_zeros", "message": "η identically zero on indicatrix", "count": 0}]
        return [
            {"kind": "eta_zero", "theta": z.angle, "y": z.y.tolist(), "derived_residual": z.derived_residual}
            for z in self.zeros
        ]


def eta_zeros(scan: IndicatrixScan) -> ZeroReport:
    """Refine every bracket of the scan by bisection in the angle."""
    if scan.identically_zero:
        return ZeroReport(identically_zero=True, zeros=())
    if not scan.brackets:
        raise DegenerateScanError(
            f"no sign change of η along the indicatrix at resolution {scan.angles.shape[0]}; increase the resolution"
        )
    spray = SprayVectorField.from_metric(scan.algebra, scan.norm)
    direction = scan.algebra.derived_direction()

    def tangential(theta: float) -> float:
        return frame_point(spray, scan.norm, _angle_point(scan.norm, theta)).eta_tangential

    zeros: list[EtaZero] = []
    for low, high in scan.brackets:
        root = low if low == high else float(bisect(tangential, low, high, xtol=ROOT_TOLERANCE))
        root = math.fmod(root, 2.0 * math.pi)
        y = _angle_point(scan.norm, root)
        residual = None
        if direction is not None:
            residual = abs(float(y @ fundamental_tensor(scan.norm, y) @ direction))
            if residual >= CHARACTERIZATION_TOLERANCE:
                logger.warning("η zero at θ = %.10f has |g_y(y, [g, g])| = %.3e", root, residual)
        zeros.append(EtaZero(angle=root, y=y, derived_residual=residual))
    if len(zeros) % 2:
        logger.warning("odd number of η zeros (%d); the scan resolution is too coarse", len(zeros))
    return ZeroReport(identically_zero=False, zeros=tuple(zeros))


@dataclass(frozen=True)
class CartanSeries:
    times: NDArray[np.float64]
    points: NDArray[np.float64]
    values: NDArray[np.float64]
    time_average: float
    deviation: float
    indicatrix_drift: float
    normalization_error: float
    orthogonality_error: float
    final_eta_norm: float

    def as_record(self) -> dict[str, Any]:
        return {
            "kind": "cartan_series",
            "y_start": self.points[int(np.argmin(np.abs(self.times)))].tolist(),
            "t_first": float(self.times[0]),
            "t_last": float(self.times[-1]),
            "time_average": self.time_average,
            "deviation": self.deviation,
            "indicatrix_drift": self.indicatrix_drift,
            "normalization_error": self.normalization_error,
            "orthogonality_error": self.orthogonality_error,
            "final_eta_norm": self.final_eta_norm,
        }


def cartan_along_flow(
    algebra: LieAlgebra,
    norm: MinkowskiNorm,
    y_start: ArrayLike,
    T: float,
    config: IntegratorConfig | None = None,
) -> CartanSeries:
    """Record C_y(w, w, w) along ẏ = −η(y) for t ∈ [0, T], or [−T, T] if the config span starts below 0."""
    _require_surface(algebra, norm)
    spray = SprayVectorField.from_metric(algebra, norm)
    start = as_nonzero_vector(y_start, 2, "y_start")
    if abs(norm(start) - 1.0) > 1e-10:
        logger.info("projecting y_start = %s onto the indicatrix", start)
        start = indicatrix_point(norm, start)
    if float(np.linalg.norm(eta_eval(spray, start))) <= ZERO_TOLERANCE:
        raise FlowAtZeroError(f"y_start = {start} is a zero of η; the flow is stationary there")
    base = config or IntegratorConfig()
    span = (-T if base.t_span[0] < 0 else 0.0, T)
    curve = integrate_eta(spray, start, base.model_copy(update={"t_span": span}))
    frames = [frame_point(spray, norm, y) for y in curve.values]
    values = np.array([cartan(norm, f.y, f.w, f.w, f.w) for f in frames])
    duration = float(curve.times[-1] - curve.times[0])
    average = float(trapezoid(values, curve.times) / duration) if duration > 0 else float(values[0])
    return CartanSeries(
        times=curve.times,
        points=curve.values,
        values=values,
        time_average=average,
        deviation=float(np.max(np.abs(values - average))),
        indicatrix_drift=max(f.indicatrix_error for f in frames),
        normalization_error=max(f.normalization_error for f in frames),
        orthogonality_error=max(f.orthogonality_error for f in frames),
        final_eta_norm=float(np.linalg.norm(frames[-1].eta)),
    )


@dataclass(frozen=True)
class LandsbergReport:
    zeros: int
    arc_constants: tuple[float, ...]
    deviations: tuple[float, ...]
    max_abs_cartan: float
    landsberg_consistent: bool
    riemannian: bool
    branch: Branch

    def as_record(self) -> dict[str, Any]:
        return {
            "kind": "landsberg",
            "zeros": self.zeros,
            "arc_constants": list(self.arc_constants),
            "deviations": list(self.deviations),
            "max_abs_cartan": self.max_abs_cartan,
            "landsberg_consistent": self.landsberg_consistent,
            "riemannian": self.riemannian,
            "branch": self.branch,
        }


def landsberg_diagnostic(
    algebra: LieAlgebra,
    norm: MinkowskiNorm,
    config: IntegratorConfig | None = None,
    resolution: int = 720,
    flow_time: float = 20.0,
    tolerance: float = LANDSBERG_TOLERANCE,
    scan: IndicatrixScan | None = None,
) -> LandsbergReport:
    """Classify a homogeneous surface as Riemannian, locally Minkowskian or not Landsberg."""
    scan = scan or scan_indicatrix(algebra, norm, resolution)
    max_abs = float(np.max(np.abs(scan.cartan_scalar)))
    riemannian = max_abs < tolerance
    if scan.identically_zero:
        # η ≡ 0 keeps every point fixed, so each series is trivially constant
        return LandsbergReport(
            zeros=0,
            arc_constants=(),
            deviations=(),
            max_abs_cartan=max_abs,
            landsberg_consistent=True,
            riemannian=riemannian,
            branch="locally_minkowskian",
        )
    zeros = eta_zeros(scan).zeros
    if len(zeros) != 2:
        logger.warning("expected two η zeros on the indicatrix, found %d", len(zeros))
        return LandsbergReport(len(zeros), (), (), max_abs, False, riemannian, "inconclusive")
    first, second = sorted(z.angle % (2.0 * math.pi) for z in zeros)
    midpoints = (0.5 * (first + second), 0.5 * (second + first + 2.0 * math.pi))
    base = config or IntegratorConfig()
    flow_config = base.model_copy(update={"t_span": (-flow_time, flow_time)})
    series = [cartan_along_flow(algebra, norm, _angle_point(norm, theta), flow_time, flow_config) for theta in midpoints]
    constants = tuple(s.time_average for s in series)
    deviations = tuple(s.deviation for s in series)
    consistent = max(deviations) < tolerance
    if not consistent:
        branch: Branch = "not_landsberg"
    elif abs(constants[0] - constants[1]) < tolerance and riemannian:
        branch = "riemannian"
    else:
        branch = "inconclusive"
    return LandsbergReport(
        zeros=2,
        arc_constants=constants,
        deviations=deviations,
        max_abs_cartan=max_abs,
        landsberg_consistent=consistent,
        riemannian=consistent and riemannian,
        branch=branch,
    )
