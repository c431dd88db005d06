"""S-curvature and Riemann curvature of a left-invariant spray.

The primary route works on the algebra with N and DN:

    S(y)   = tr(N(y, ·) + ad y)
    R_y(v) = DN(y, v, η(y)) − N(y, N(y, v)) + N(y, [y, v]) − [y, N(y, v)]

The frame oracles evaluate the coefficient formulas of the horizontal frame at
the identity, with partial derivatives of η taken by a fourth-order stencil, so
the two routes share no finite-difference evaluation points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import differences
from .algebra import LieAlgebra, ad_matrix, bracket
from .minkowski import fundamental_tensor
from .spray import (
    SprayVectorField,
    check_dimensions,
    connection_matrix,
    connection_N,
    d_connection_N,
    eta_eval,
)
from .utils import Matrix, Vector, as_nonzero_vector, parallel_map, random_directions

logger = logging.getLogger(__name__)


def s_curvature(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike) -> float:
    point = as_nonzero_vector(y, algebra.dim)
    if spray.source == "zero":
        return 0.5 * float(np.trace(ad_matrix(algebra, point)))
    return float(np.trace(connection_matrix(spray, algebra, point) + ad_matrix(algebra, point)))


def s_curvature_frame_oracle(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike) -> float:
    """½ Σ_i ∂η^i/∂u^i + ½ c_{lj}^j u^l, divergence from five-point differences."""
    check_dimensions(spray, algebra)
    point = as_nonzero_vector(y, algebra.dim)
    bi_invariant = 0.5 * float(point @ algebra.trace_ad())
    if spray.source == "zero":
        return bi_invariant
    divergence = 0.0
    for i, axis in enumerate(np.eye(algebra.dim)):
        divergence += float(differences.five_point_difference(lambda x: eta_eval(spray, x), point, axis)[i])
    return 0.5 * divergence + bi_invariant


def riemann(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike, v: ArrayLike) -> Vector:
    point = as_nonzero_vector(y, algebra.dim)
    direction = algebra.vector(v, "v")
    eta = eta_eval(spray, point)
    n_v = connection_N(spray, algebra, point, direction)
    return (
        d_connection_N(spray, algebra, point, direction, eta)
        - connection_N(spray, algebra, point, n_v)
        + connection_N(spray, algebra, point, bracket(algebra, point, direction))
        - bracket(algebra, point, n_v)
    )


def riemann_matrix(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike) -> Matrix:
    """Column j holds R_y(e_j)."""
    point = as_nonzero_vector(y, algebra.dim)
    eta = eta_eval(spray, point)
    n = connection_matrix(spray, algebra, point)
    ad = ad_matrix(algebra, point)
    second = np.column_stack([d_connection_N(spray, algebra, point, e, eta) for e in np.eye(algebra.dim)])
    return second - n @ n + n @ ad - ad @ n


def lowered_asymmetry(spray: SprayVectorField, r_matrix: Matrix, y: ArrayLike) -> float | None:
    """max |A − Aᵀ| for A = g_y R_y; None without a norm."""
    if spray.norm is None:
        return None
    lowered = fundamental_tensor(spray.norm, y) @ r_matrix
    return float(np.max(np.abs(lowered - lowered.T)))


def riemann_frame_oracle(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike, q_index: int) -> Vector:
    """∂_{u^i} coefficients of R applied to the q-th horizontal frame vector at the identity."""
    check_dimensions(spray, algebra)
    u = as_nonzero_vector(y, algebra.dim)
    c = algebra.c
    e_q = np.eye(algebra.dim)[q_index]
    last = -0.25 * np.einsum("jp,pri,j,r->i", c[q_index], c, u, u)
    if spray.source == "zero":
        return last

    def column(x: Vector) -> Vector:
        return differences.five_point_difference(lambda z: eta_eval(spray, z), x, e_q)

    h = eta_eval(spray, u)
    jac = differences.jacobian(lambda z: eta_eval(spray, z), u, fourth_order=True)
    jac_q = jac[:, q_index]
    second = differences.five_point_difference(column, u, h) if np.any(h) else np.zeros(algebra.dim)
    return (
        0.75 * jac @ (u @ c[:, q_index, :])
        + 0.5 * (h @ c[q_index])
        + 0.5 * second
        - 0.25 * jac @ jac_q
        + 0.25 * np.einsum("pri,r,p->i", c, u, jac_q)
        + last
    )


def bi_invariant_oracle(algebra: LieAlgebra, y: ArrayLike) -> tuple[float, Matrix]:
    """Closed forms for η ≡ 0: S = ½ tr ad(y) and R_y = −¼ ad(y)²."""
    ad = ad_matrix(algebra, y)
    return 0.5 * float(np.trace(ad)), -0.25 * ad @ ad


@dataclass(frozen=True)
class CurvatureReport:
    y: Vector
    s_value: float
    r_matrix: Matrix
    oracle_deltas: dict[str, float]
    eigenvalues: NDArray[np.complex128]
    ricci: float
    r_of_y: Vector
    lowered_asymmetry: float | None

    def as_record(self) -> dict[str, Any]:
        return {
            "y": self.y.tolist(),
            "S": self.s_value,
            "R": self.r_matrix.reshape(-1).tolist(),
            "oracle_delta_S": self.oracle_deltas["S"],
            "oracle_delta_R": self.oracle_deltas["R"],
            "eigenvalues_real": self.eigenvalues.real.tolist(),
            "eigenvalues_imag": self.eigenvalues.imag.tolist(),
            "ricci": self.ricci,
            "R_y_of_y": self.r_of_y.tolist(),
            "lowered_asymmetry": self.lowered_asymmetry,
        }


def curvature_report(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike) -> CurvatureReport:
    point = as_nonzero_vector(y, algebra.dim)
    s_value = s_curvature(spray, algebra, point)
    r = riemann_matrix(spray, algebra, point)
    oracle = np.column_stack([riemann_frame_oracle(spray, algebra, point, q) for q in range(algebra.dim)])
    deltas = {
        "S": abs(s_value - s_curvature_frame_oracle(spray, algebra, point)),
        "R": float(np.max(np.abs(r - oracle))),
    }
    if deltas["R"] > 1e-5:
        logger.warning("curvature routes disagree at y = %s: max |ΔR| = %.3e", point, deltas["R"])
    return CurvatureReport(
        y=point,
        s_value=s_value,
        r_matrix=r,
        oracle_deltas=deltas,
        eigenvalues=np.linalg.eigvals(r),
        ricci=float(np.trace(r)),
        r_of_y=r @ point,
        lowered_asymmetry=lowered_asymmetry(spray, r, point),
    )


def sample_curvature(
    spray: SprayVectorField,
    algebra: LieAlgebra,
    count: int = 50,
    seed: int = 0,
    max_workers: int | None = None,
) -> list[CurvatureReport]:
    """Curvature reports at seeded random unit directions, in sample order."""
    directions = list(random_directions(algebra.dim, count, seed))
    return parallel_map(lambda y: curvature_report(spray, algebra, y), directions, max_workers)
