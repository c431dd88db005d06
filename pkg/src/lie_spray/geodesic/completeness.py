from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..algebra import LieAlgebra
from ..errors import ConfigError
from ..minkowski import indicatrix_point
from ..models import IntegratorConfig
from ..spray import SprayVectorField, check_dimensions, eta_eval
from ..utils import Vector, as_nonzero_vector, parallel_map
from .integrators import integrate

logger = logging.getLogger(__name__)

Direction = Literal["forward", "backward"]


@dataclass(frozen=True)
class ProbeResult:
    start: Vector
    direction: Direction
    reached_horizon: bool
    blowup_time: float | None
    final_time: float
    final_norm: float

    def as_record(self) -> dict[str, Any]:
        return {
            "kind": "probe",
            "y0": self.start.tolist(),
            "direction": self.direction,
            "reached_horizon": self.reached_horizon,
            "blowup_time": self.blowup_time,
            "final_time": self.final_time,
            "final_norm": self.final_norm,
        }


@dataclass(frozen=True)
class CompletenessReport:
    horizon: float
    results: tuple[ProbeResult, ...]

    @property
    def complete(self) -> bool:
        return all(result.reached_horizon for result in self.results)

    def blowup_times(self, direction: Direction = "forward") -> list[float]:
        return [r.blowup_time for r in self.results if r.direction == direction and r.blowup_time is not None]

    def as_record(self) -> dict[str, Any]:
        forward = self.blowup_times("forward")
        backward = self.blowup_times("backward")
        return {
            "kind": "completeness",
            "horizon": self.horizon,
            "probes": len(self.results),
            "complete": self.complete,
            "forward_blowups": len(forward),
            "backward_blowups": len(backward),
            "min_forward_blowup_time": min(forward) if forward else None,
            "max_forward_blowup_time": max(forward) if forward else None,
            "min_backward_blowup_time": min(backward) if backward else None,
        }


def _probe(spray: SprayVectorField, start: Vector, direction: Direction, horizon: float, config: IntegratorConfig) -> ProbeResult:
    def field(_t: float, y: Vector) -> Vector:
        return -eta_eval(spray, y)

    t_end = horizon if direction == "forward" else -horizon
    solution = integrate(field, start, t_end, config)
    final = solution.states[-1]
    blowup = solution.blowup
    return ProbeResult(
        start=start,
        direction=direction,
        reached_horizon=blowup is None,
        blowup_time=None if blowup is None else blowup.time_estimate,
        final_time=float(solution.times[-1]),
        final_norm=float(np.linalg.norm(final)),
    )


def completeness_probe(
    spray: SprayVectorField,
    algebra: LieAlgebra,
    directions: Sequence[ArrayLike],
    horizon: float,
    config: IntegratorConfig | None = None,
    max_workers: int | None = None,
) -> CompletenessReport:
    """Integrate the geodesic field forwards and backwards from each direction up to ``horizon``.

    With a norm attached the directions are moved onto its indicatrix first.
    """
    check_dimensions(spray, algebra)
    if not directions:
        raise ConfigError("completeness probe needs at least one direction", key_path="directions")
    base = config or IntegratorConfig()
    probe_config = base.model_copy(update={"output_step": None})
    starts = [as_nonzero_vector(d, algebra.dim, "direction") for d in directions]
    if spray.norm is not None:
        starts = [indicatrix_point(spray.norm, d) for d in starts]
    jobs = [(start, direction) for start in starts for direction in ("forward", "backward")]
    results = parallel_map(lambda job: _probe(spray, job[0], job[1], horizon, probe_config), jobs, max_workers)  # type: ignore[arg-type]
    report = CompletenessReport(horizon=horizon, results=tuple(results))
    if not report.complete:
        logger.info("%d of %d probes blew up before t = %g", sum(not r.reached_horizon for r in results), len(results), horizon)
    return report
