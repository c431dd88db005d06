from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from lie_spray.algebra import LieAlgebra, builtin
from lie_spray.errors import (
    ConfigError,
    DimensionMismatchError,
    MissingRepresentationError,
    StepSizeUnderflowError,
    ZeroVectorError,
)
from lie_spray.geodesic import (
    completeness_probe,
    fit_blowup_time,
    geodesic,
    integrate,
    integrate_eta,
    reconstruct_group_curve,
    verify_geodesic_ode,
)
from lie_spray.geodesic.integrators import output_grid
from lie_spray.minkowski import QuadraticNorm, RandersNorm
from lie_spray.models import IntegratorConfig
from lie_spray.spray import SprayVectorField

AFF1 = builtin("aff1")
TIGHT = IntegratorConfig(atol=1e-13, rtol=1e-11, t_span=(0.0, 1.0), output_step=0.1)


def _radial_blowup() -> SprayVectorField:
    # ẏ = |y| y, so |y(t)| = r0 / (1 - r0 t)
    return SprayVectorField.closed_form(["-sqrt(u1^2 + u2^2)*u1", "-sqrt(u1^2 + u2^2)*u2"], 2)


@pytest.mark.parametrize(
    ("name", "y0"),
    [
        ("su2", [0.3, -0.7, 1.1]),
        ("heisenberg3", [1.0, 0.5, -0.2]),
        ("aff1", [0.8, -1.5]),
        ("abelian(3)", [1.0, 2.0, 3.0]),
    ],
)
def test_bi_invariant_geodesics_are_one_parameter_subgroups(name: str, y0: list[float]):
    algebra = builtin(name)
    assert algebra.rep is not None
    trace = geodesic(SprayVectorField.zero(algebra.dim), algebra, y0, config=TIGHT)
    assert trace.c_values is not None
    np.testing.assert_array_equal(trace.y_values, np.tile(y0, (trace.times.shape[0], 1)))
    for t, c in zip(trace.times, trace.c_values):
        np.testing.assert_allclose(c, expm(t * algebra.rep.image(y0)), atol=1e-8)


def test_heisenberg_exponential_is_a_quadratic_polynomial():
    heisenberg = builtin("heisenberg3")
    assert heisenberg.rep is not None
    y0 = np.array([1.0, -2.0, 0.5])
    x = heisenberg.rep.image(y0)
    trace = geodesic(SprayVectorField.zero(3), heisenberg, y0, config=TIGHT)
    assert trace.c_values is not None
    for t, c in zip(trace.times, trace.c_values):
        np.testing.assert_allclose(c, np.eye(3) + t * x + 0.5 * t**2 * x @ x, atol=1e-10)


def test_left_translation_by_g0():
    spray = SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))
    g0 = np.array([[2.0, 1.0], [0.0, 1.0]])
    plain = geodesic(spray, AFF1, [1.0, 1.0], config=TIGHT)
    moved = geodesic(spray, AFF1, [1.0, 1.0], g0=g0, config=TIGHT)
    assert plain.c_values is not None and moved.c_values is not None
    np.testing.assert_allclose(moved.c_values, np.einsum("ab,kbc->kac", g0, plain.c_values), atol=1e-14)
    with pytest.raises(DimensionMismatchError):
        geodesic(spray, AFF1, [1.0, 1.0], g0=np.eye(3), config=TIGHT)


@pytest.mark.parametrize("r0", [0.5, 1.0, 2.0])
def test_radial_blowup_time(r0: float):
    report = completeness_probe(_radial_blowup(), builtin("abelian(2)"), [[r0, 0.0]], horizon=50.0)
    forward = [r for r in report.results if r.direction == "forward"]
    backward = [r for r in report.results if r.direction == "backward"]
    assert not report.complete
    assert forward[0].blowup_time == pytest.approx(1.0 / r0, rel=1e-2)
    assert backward[0].reached_horizon
    assert backward[0].final_time == pytest.approx(-50.0)
    assert backward[0].final_norm == pytest.approx(r0 / (1.0 + 50.0 * r0), rel=1e-6)
    assert report.as_record()["min_forward_blowup_time"] == forward[0].blowup_time


def test_metric_geodesic_flow_is_complete():
    spray = SprayVectorField.from_metric(AFF1, RandersNorm.from_data(np.eye(2), [0.3, 0.0]))
    directions = [[np.cos(a), np.sin(a)] for a in np.linspace(0.0, 2.0 * np.pi, 6, endpoint=False)]
    report = completeness_probe(spray, AFF1, directions, horizon=20.0)
    assert report.complete
    assert len(report.results) == 12
    with pytest.raises(ConfigError, match="at least one direction"):
        completeness_probe(spray, AFF1, [], horizon=1.0)


@pytest.mark.parametrize(
    "norm",
    [QuadraticNorm.euclidean(2), RandersNorm.from_data(np.eye(2), [0.3, 0.0])],
    ids=["euclidean", "randers"],
)
def test_speed_is_conserved(norm: QuadraticNorm | RandersNorm):
    spray = SprayVectorField.from_metric(AFF1, norm)
    config = IntegratorConfig(atol=1e-12, rtol=1e-10, t_span=(-2.0, 10.0))
    trace = geodesic(spray, AFF1, [1.0, 1.0], config=config)
    assert trace.speed_drift is not None and trace.speed_drift < 1e-7
    assert trace.times[0] == -2.0 and trace.times[-1] == 10.0
    assert np.all(np.diff(trace.times) > 0.0)


def test_time_reversal():
    # η is even for a reversible norm, so y(-t) from y0 is -y(t) from -y0
    spray = SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))
    config = IntegratorConfig(atol=1e-12, rtol=1e-10, t_span=(-2.0, 2.0), output_step=0.1)
    y0 = np.array([0.6, -0.9])
    ahead = integrate_eta(spray, y0, config)
    behind = integrate_eta(spray, -y0, config)
    np.testing.assert_allclose(ahead.values[::-1], -behind.values, atol=1e-8)


def test_reversed_flow_returns_to_the_start():
    spray = SprayVectorField.from_metric(AFF1, RandersNorm.from_data(np.eye(2), [0.3, 0.0]))
    config = IntegratorConfig(atol=1e-12, rtol=1e-10, t_span=(0.0, 2.0), output_step=0.1)
    y0 = np.array([1.0, 0.5])
    ahead = integrate_eta(spray, y0, config)
    back = integrate_eta(spray, ahead.values[-1], config, sign=1.0)
    np.testing.assert_allclose(back.values[-1], y0, atol=1e-6)


def test_residuals_vanish_on_a_fine_grid():
    spray = SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))
    config = IntegratorConfig(atol=1e-12, rtol=1e-10, t_span=(0.0, 5.0), output_step=0.01)
    trace = geodesic(spray, AFF1, [1.0, 1.0], config=config)
    report = verify_geodesic_ode(trace, spray, AFF1)
    assert not report.differencing_dominated
    assert report.eta_residual < 1e-6
    assert report.pullback_residual is not None and report.pullback_residual < 1e-6
    assert report.windows == trace.times.shape[0] - 8


def test_coarse_grid_is_flagged():
    spray = SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))
    coarse = geodesic(spray, AFF1, [1.0, 1.0], config=IntegratorConfig(t_span=(0.0, 5.0), output_step=0.5))
    assert verify_geodesic_ode(coarse, spray, AFF1).differencing_dominated
    sparse = geodesic(spray, AFF1, [1.0, 1.0], config=IntegratorConfig(t_span=(0.0, 1.0), output_step=0.25))
    report = verify_geodesic_ode(sparse, spray, AFF1)
    assert report.windows == 0
    assert report.differencing_dominated


def test_rk4_is_fourth_order():
    spray = SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))
    y0 = np.array([1.0, 1.0])
    reference = integrate_eta(spray, y0, IntegratorConfig(atol=1e-14, rtol=1e-13, output_step=None)).values[-1]
    errors = []
    for step in (0.1, 0.05):
        config = IntegratorConfig(method="rk4", initial_step=step, output_step=None)
        errors.append(float(np.linalg.norm(integrate_eta(spray, y0, config).values[-1] - reference)))
    assert np.log2(errors[0] / errors[1]) >= 3.5


def test_reconstruction_needs_a_representation():
    bare = LieAlgebra.from_brackets(2, {(0, 1): {1: 1.0}}, "aff1-without-rep")
    curve = integrate_eta(SprayVectorField.zero(2), [1.0, 0.0], TIGHT)
    with pytest.raises(MissingRepresentationError, match="no matrix representation"):
        reconstruct_group_curve(bare, curve, TIGHT)
    assert geodesic(SprayVectorField.zero(2), bare, [1.0, 0.0], config=TIGHT, reconstruct=False).c_values is None


def test_orthonormalized_reconstruction_stays_orthogonal():
    su2 = builtin("su2")
    spray = SprayVectorField.from_metric(su2, RandersNorm.from_data(np.eye(3), [0.2, 0.1, -0.1]))
    config = IntegratorConfig(t_span=(0.0, 3.0), orthonormalize=True)
    trace = geodesic(spray, su2, [0.4, -0.2, 0.9], config=config)
    assert trace.c_values is not None
    for c in trace.c_values:
        np.testing.assert_allclose(c.T @ c, np.eye(4), atol=1e-12)


def test_zero_start_is_rejected():
    with pytest.raises(ZeroVectorError):
        integrate_eta(SprayVectorField.zero(2), [0.0, 0.0])


def test_fit_blowup_time():
    times = np.linspace(1.0, 1.9, 10)
    assert fit_blowup_time(times, 3.0 / (2.0 - times)) == pytest.approx(2.0, rel=1e-12)


def test_output_grid():
    assert output_grid(1.0, 0.25) == [0.25, 0.5, 0.75, 1.0]
    backward = output_grid(-0.3, 0.1)
    assert backward is not None
    assert backward[-1] == -0.3
    np.testing.assert_allclose(backward, [-0.1, -0.2, -0.3])
    assert output_grid(1.0, None) is None


def test_step_size_underflow_without_growth():
    def field(t: float, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(y) if t <= 0.5 else np.full_like(y, np.nan)

    with pytest.raises(StepSizeUnderflowError) as excinfo:
        integrate(field, np.array([1.0]), 1.0, IntegratorConfig(output_step=None))
    assert excinfo.value.last_time == pytest.approx(0.5)
