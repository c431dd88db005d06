from __future__ import annotations

import numpy as np
import pytest

from lie_spray.algebra import LieAlgebra, ad_matrix, builtin
from lie_spray.curvature import (
    bi_invariant_oracle,
    curvature_report,
    riemann,
    riemann_matrix,
    s_curvature,
    s_curvature_frame_oracle,
    sample_curvature,
)
from lie_spray.minkowski import QuadraticNorm, RandersNorm
from lie_spray.spray import SprayVectorField, connection_N
from lie_spray.utils import random_directions

AFF1 = builtin("aff1")
SU2 = builtin("su2")


def _aff1_euclidean() -> SprayVectorField:
    return SprayVectorField.from_metric(AFF1, QuadraticNorm.euclidean(2))


@pytest.mark.parametrize("name", ["su2", "sl2", "heisenberg3", "aff1"])
def test_bi_invariant_spray_matches_closed_forms(name: str):
    algebra = builtin(name)
    spray = SprayVectorField.zero(algebra.dim)
    for y in random_directions(algebra.dim, 100, seed=5):
        s_expected, r_expected = bi_invariant_oracle(algebra, y)
        assert s_curvature(spray, algebra, y) == s_expected
        np.testing.assert_allclose(riemann_matrix(spray, algebra, y), r_expected, atol=1e-12)


def test_su2_bi_invariant_riemann():
    spray = SprayVectorField.zero(3)
    e1, e2, _ = np.eye(3)
    np.testing.assert_allclose(riemann(spray, SU2, e1, e2), 0.25 * e2, atol=1e-15)
    assert s_curvature(spray, SU2, [0.3, 0.4, -1.0]) == 0.0


def test_heisenberg_bi_invariant_spray_is_flat():
    heisenberg = builtin("heisenberg3")
    spray = SprayVectorField.zero(3)
    y = np.array([0.7, -1.3, 2.0])
    assert not np.any(riemann_matrix(spray, heisenberg, y))
    # ad(y)² = 0 while ad(y) ≠ 0
    assert np.any(ad_matrix(heisenberg, y))


def test_aff1_bi_invariant_s_curvature():
    spray = SprayVectorField.zero(2)
    assert s_curvature(spray, AFF1, [0.8, -3.0]) == pytest.approx(0.4)
    assert s_curvature_frame_oracle(spray, AFF1, [0.8, -3.0]) == pytest.approx(0.4)


def test_aff1_euclidean_has_constant_curvature_minus_one():
    spray = _aff1_euclidean()
    e1, e2 = np.eye(2)
    np.testing.assert_allclose(riemann(spray, AFF1, e1, e2), -e2, atol=1e-5)
    rng = np.random.default_rng(1)
    for y, v in zip(rng.standard_normal((50, 2)), rng.standard_normal((50, 2))):
        expected = -((y @ y) * v - (y @ v) * y)
        np.testing.assert_allclose(riemann(spray, AFF1, y, v), expected, atol=1e-5)
        assert s_curvature(spray, AFF1, y) == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize(
    ("algebra", "b"),
    [(AFF1, [0.3, 0.0]), (SU2, [0.2, 0.1, -0.1])],
    ids=["aff1-randers", "su2-randers"],
)
def test_primary_and_frame_routes_agree(algebra: LieAlgebra, b: list[float]):
    norm = RandersNorm.from_data(np.eye(algebra.dim), b)
    spray = SprayVectorField.from_metric(algebra, norm)
    for report in sample_curvature(spray, algebra, count=50, seed=4):
        assert report.oracle_deltas["S"] < 1e-6
        assert report.oracle_deltas["R"] < 1e-5
        assert report.lowered_asymmetry is not None and report.lowered_asymmetry < 1e-6


def test_closed_form_spray_routes_agree():
    spray = SprayVectorField.closed_form(["u1*u2 + u2^2", "-u1^2 + 0.5*u1*u2"], 2)
    report = curvature_report(spray, AFF1, [0.6, -0.9])
    assert report.oracle_deltas["S"] < 1e-6
    assert report.oracle_deltas["R"] < 1e-5
    assert report.lowered_asymmetry is None


@pytest.mark.parametrize(
    ("algebra", "b"),
    [(AFF1, [0.3, 0.0]), (SU2, [0.2, 0.1, -0.1])],
    ids=["aff1-randers", "su2-randers"],
)
def test_homogeneity(algebra: LieAlgebra, b: list[float]):
    spray = SprayVectorField.from_metric(algebra, RandersNorm.from_data(np.eye(algebra.dim), b))
    v = np.linspace(-1.0, 1.0, algebra.dim)
    for y in random_directions(algebra.dim, 5, seed=6):
        s_value = s_curvature(spray, algebra, y)
        r_value = riemann_matrix(spray, algebra, y)
        for scale in (0.5, 2.0):
            np.testing.assert_allclose(spray(scale * y), scale**2 * spray(y), rtol=1e-12, atol=1e-14)
            np.testing.assert_allclose(
                connection_N(spray, algebra, scale * y, v), scale * connection_N(spray, algebra, y, v), atol=1e-7
            )
            assert s_curvature(spray, algebra, scale * y) == pytest.approx(scale * s_value, abs=1e-6)
            np.testing.assert_allclose(riemann_matrix(spray, algebra, scale * y), scale**2 * r_value, atol=1e-5)


def test_report_contents_and_determinism():
    spray = _aff1_euclidean()
    first = sample_curvature(spray, AFF1, count=5, seed=9)
    second = sample_curvature(spray, AFF1, count=5, seed=9, max_workers=4)
    for a, b in zip(first, second):
        assert a.as_record() == b.as_record()
    record = first[0].as_record()
    assert len(record["R"]) == 4
    assert record["ricci"] == pytest.approx(-1.0, abs=1e-5)
    np.testing.assert_allclose(record["R_y_of_y"], [0.0, 0.0], atol=1e-5)
