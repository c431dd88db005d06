"""Geodesics as integral curves of −η, lifted to the group through a matrix representation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import polar

from ..algebra import LieAlgebra
from ..errors import DimensionMismatchError, MissingRepresentationError
from ..models import IntegratorConfig
from ..spray import SprayVectorField, check_dimensions, eta_eval
from ..utils import Matrix, Vector, as_nonzero_vector
from .integrators import BlowUp, Solution, integrate

logger = logging.getLogger(__name__)

DIFFERENCING_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AlgebraCurve:
    times: NDArray[np.float64]
    values: NDArray[np.float64]
    derivatives: NDArray[np.float64] | None = None
    blowups: tuple[BlowUp, ...] = ()

    @property
    def blowup(self) -> BlowUp | None:
        return self.blowups[0] if self.blowups else None

    def interpolator(self) -> Callable[[float], Vector]:
        """Cubic Hermite interpolation when derivatives are known, linear otherwise."""
        if self.times.shape[0] < 2:
            value = self.values[0]
            return lambda t: value
        if self.derivatives is not None:
            spline = CubicHermiteSpline(self.times, self.values, self.derivatives, axis=0)
            return lambda t: np.asarray(spline(t))
        columns = range(self.values.shape[1])
        return lambda t: np.array([np.interp(t, self.times, self.values[:, j]) for j in columns])


@dataclass(frozen=True)
class GroupCurve:
    times: NDArray[np.float64]
    matrices: NDArray[np.float64]


def _join(backward: Solution | None, forward: Solution | None) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    parts_t: list[NDArray[np.float64]] = []
    parts_y: list[NDArray[np.float64]] = []
    if backward is not None:
        parts_t.append(backward.times[::-1][:-1])
        parts_y.append(backward.states[::-1][:-1])
    if forward is not None:
        parts_t.append(forward.times)
        parts_y.append(forward.states)
    elif backward is not None:
        parts_t.append(backward.times[:1])
        parts_y.append(backward.states[:1])
    return np.concatenate(parts_t), np.concatenate(parts_y)


def integrate_eta(
    spray: SprayVectorField,
    y0: ArrayLike,
    config: IntegratorConfig | None = None,
    sign: float = -1.0,
) -> AlgebraCurve:
    """Solve ẏ = sign·η(y), y(0) = y0 over ``config.t_span`` (a ≤ 0 ≤ b)."""
    config = config or IntegratorConfig()
    start = as_nonzero_vector(y0, spray.dim, "y0")

    def field(_t: float, y: Vector) -> Vector:
        return sign * eta_eval(spray, y)

    a, b = config.t_span
    forward = integrate(field, start, b, config) if b > 0 else None
    backward = integrate(field, start, a, config) if a < 0 else None
    times, values = _join(backward, forward)
    derivatives = np.array([field(t, y) for t, y in zip(times, values)])
    blowups = tuple(s.blowup for s in (forward, backward) if s is not None and s.blowup is not None)
    return AlgebraCurve(times=times, values=values, derivatives=derivatives, blowups=blowups)


def reconstruct_group_curve(
    algebra: LieAlgebra, curve: AlgebraCurve, config: IntegratorConfig | None = None
) -> GroupCurve:
    """Solve Ċ = C·ρ(y(t)), C(0) = I on the curve's sample times."""
    config = config or IntegratorConfig()
    rep = algebra.rep
    if rep is None:
        raise MissingRepresentationError(
            f"algebra {algebra.name!r} has no matrix representation; use a builtin algebra "
            "or add a 'rep' block to its definition file"
        )
    y_of_t = curve.interpolator()

    def field(t: float, c: Matrix) -> Matrix:
        return c @ rep.image(y_of_t(t))

    post_step = (lambda c: polar(c)[0]) if config.orthonormalize else None
    identity = np.eye(rep.size)
    times = curve.times
    forward = (
        integrate(field, identity, float(times[-1]), config, list(times[times > 0]), post_step, watch_blowup=False)
        if times[-1] > 0
        else None
    )
    backward = (
        integrate(field, identity, float(times[0]), config, list(times[times < 0][::-1]), post_step, watch_blowup=False)
        if times[0] < 0
        else None
    )
    joined_times, matrices = _join(backward, forward)
    return GroupCurve(times=joined_times, matrices=matrices)


@dataclass(frozen=True)
class GeodesicTrace:
    times: NDArray[np.float64]
    y_values: NDArray[np.float64]
    c_values: NDArray[np.float64] | None
    speed_drift: float | None
    pullback_residual: float | None
    blowup: BlowUp | None

    def as_records(self) -> list[dict[str, Any]]:
        records: list[dict[str, Any]] = []
        for index, t in enumerate(self.times):
            record: dict[str, Any] = {"kind": "sample", "t": float(t), "y": self.y_values[index].tolist()}
            if self.c_values is not None:
                record["c"] = self.c_values[index].reshape(-1).tolist()
            records.append(record)
        records.append(
            {
                "kind": "summary",
                "samples": int(self.times.shape[0]),
                "t_first": float(self.times[0]),
                "t_last": float(self.times[-1]),
                "speed_drift": self.speed_drift,
                "pullback_residual": self.pullback_residual,
                "blowup_time": None if self.blowup is None else self.blowup.time_estimate,
                "blowup_direction": None if self.blowup is None else self.blowup.direction,
            }
        )
        return records


def geodesic(
    spray: SprayVectorField,
    algebra: LieAlgebra,
    y0: ArrayLike,
    g0: ArrayLike | None = None,
    config: IntegratorConfig | None = None,
    reconstruct: bool = True,
) -> GeodesicTrace:
    """Integrate −η from y0 and, with ``reconstruct``, the group geodesic c(t) = g0·C(t)."""
    check_dimensions(spray, algebra)
    curve = integrate_eta(spray, y0, config)
    c_values = None
    pullback = None
    if reconstruct:
        c_values = reconstruct_group_curve(algebra, curve, config).matrices
        if g0 is not None:
            start = np.asarray(g0, dtype=float)
            if start.shape != c_values.shape[1:]:
                raise DimensionMismatchError(c_values.shape[1], start.shape[0], "g0")
            c_values = np.einsum("ab,kbc->kac", start, c_values)
        pullback = _pullback(curve.times, curve.values, c_values, algebra)
    speed_drift = None
    if spray.norm is not None:
        speeds = np.array([spray.norm(y) for y in curve.values])
        speed_drift = float(np.max(np.abs(speeds - spray.norm(curve.values[np.argmin(np.abs(curve.times))]))))
    return GeodesicTrace(
        times=curve.times,
        y_values=curve.values,
        c_values=c_values,
        speed_drift=speed_drift,
        pullback_residual=None if pullback is None else pullback[0],
        blowup=curve.blowup,
    )


@dataclass(frozen=True)
class Differenced:
    """Fourth-order central derivatives at the centres of uniform nine-point windows."""

    indices: NDArray[np.int64]
    derivatives: NDArray[np.float64]
    error_estimate: float


def uniform_derivative(times: NDArray[np.float64], values: NDArray[np.float64]) -> Differenced:
    """The error estimate compares spacing h against 2h: |D(h) − D(2h)| / 15."""
    indices: list[int] = []
    derivatives: list[NDArray[np.float64]] = []
    estimate = 0.0
    for i in range(4, times.shape[0] - 4):
        spacing = np.diff(times[i - 4 : i + 5])
        h = float(spacing[0])
        if np.max(np.abs(spacing - h)) > 1e-9 * abs(h):
            continue
        v = values
        fine = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
        coarse = (v[i - 4] - 8.0 * v[i - 2] + 8.0 * v[i + 2] - v[i + 4]) / (24.0 * h)
        estimate = max(estimate, float(np.max(np.abs(fine - coarse))) / 15.0)
        indices.append(i)
        derivatives.append(fine)
    shape = (0, *values.shape[1:])
    return Differenced(
        indices=np.asarray(indices, dtype=np.int64),
        derivatives=np.asarray(derivatives) if derivatives else np.zeros(shape),
        error_estimate=estimate if indices else float("nan"),
    )


def _pullback(
    times: NDArray[np.float64], y_values: NDArray[np.float64], c_values: NDArray[np.float64], algebra: LieAlgebra
) -> tuple[float, float] | None:
    """max |ρ(y) − c⁻¹ċ| over differencing windows, with the differencing error estimate."""
    rep = algebra.rep
    differenced = uniform_derivative(times, c_values)
    if rep is None or differenced.indices.shape[0] == 0:
        return None
    residual = 0.0
    for index, c_dot in zip(differenced.indices, differenced.derivatives):
        pulled = np.linalg.solve(c_values[index], c_dot)
        residual = max(residual, float(np.max(np.abs(pulled - rep.image(y_values[index])))))
    return residual, differenced.error_estimate


@dataclass(frozen=True)
class ResidualReport:
    eta_residual: float
    pullback_residual: float | None
    eta_error_estimate: float
    pullback_error_estimate: float | None
    windows: int
    differencing_dominated: bool

    def as_record(self) -> dict[str, Any]:
        return {
            "kind": "residuals",
            "eta_residual": self.eta_residual,
            "pullback_residual": self.pullback_residual,
            "eta_error_estimate": self.eta_error_estimate,
            "pullback_error_estimate": self.pullback_error_estimate,
            "windows": self.windows,
            "differencing_dominated": self.differencing_dominated,
        }


def verify_geodesic_ode(trace: GeodesicTrace, spray: SprayVectorField, algebra: LieAlgebra) -> ResidualReport:
    """Check u̇ + η(y) ≈ 0 and c⁻¹ċ ≈ ρ(y) by differencing the recorded samples."""
    check_dimensions(spray, algebra)
    differenced = uniform_derivative(trace.times, trace.y_values)
    eta_residual = float("nan")
    if differenced.indices.shape[0]:
        eta_residual = max(
            float(np.max(np.abs(y_dot + eta_eval(spray, trace.y_values[index]))))
            for index, y_dot in zip(differenced.indices, differenced.derivatives)
        )
    pullback = None if trace.c_values is None else _pullback(trace.times, trace.y_values, trace.c_values, algebra)
    estimates = [differenced.error_estimate] + ([pullback[1]] if pullback is not None else [])
    dominated = differenced.indices.shape[0] == 0 or any(
        not np.isfinite(e) or e > DIFFERENCING_THRESHOLD for e in estimates
    )
    if dominated:
        logger.warning(
            "geodesic residuals are dominated by differencing error (estimates %s); refine output_step",
            ", ".join(f"{e:.3e}" for e in estimates),
        )
    return ResidualReport(
        eta_residual=eta_residual,
        pullback_residual=None if pullback is None else pullback[0],
        eta_error_estimate=differenced.error_estimate,
        pullback_error_estimate=None if pullback is None else pullback[1],
        windows=int(differenced.indices.shape[0]),
        differencing_dominated=dominated,
    )
