"""
Geodesics of left-invariant sprays.

The algebra curve solves ẏ = −η(y); the group geodesic solves ċ = c·ρ(y) in a
matrix representation. `integrators` holds the Runge-Kutta driver, `trace`
the geodesic and its residual checks, `completeness` the blow-up probe.
"""

from .completeness import CompletenessReport, ProbeResult, completeness_probe
from .integrators import BlowUp, Solution, fit_blowup_time, integrate, rk4_step, rkf45_step
from .trace import (
    AlgebraCurve,
    GeodesicTrace,
    GroupCurve,
    ResidualReport,
    geodesic,
    integrate_eta,
    reconstruct_group_curve,
    uniform_derivative,
    verify_geodesic_ode,
)

__all__ = [
    "AlgebraCurve",
    "BlowUp",
    "CompletenessReport",
    "GeodesicTrace",
    "GroupCurve",
    "ProbeResult",
    "ResidualReport",
    "Solution",
    "completeness_probe",
    "fit_blowup_time",
    "geodesic",
    "integrate",
    "integrate_eta",
    "reconstruct_group_curve",
    "rk4_step",
    "rkf45_step",
    "uniform_derivative",
    "verify_geodesic_ode",
]
