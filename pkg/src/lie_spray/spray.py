"""The spray vector field η: g∖{0} → g and the connection operator N.

A left-invariant spray is G = G₀ − H, where G₀ is the canonical bi-invariant
spray; η(y) = H(e, y) carries all of H. It comes from a Minkowski norm through
g_y(η(y), u) = g_y(y, [u, y]), from closed-form component expressions, or is
identically zero (G₀ itself).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import differences
from .algebra import LieAlgebra, ad_matrix, bracket
from .errors import ConfigError, DimensionMismatchError, NonFiniteError, StrongConvexityError
from .expressions import CompiledVectorField
from .minkowski import MinkowskiNorm, fundamental_tensor
from .utils import Matrix, Vector, as_nonzero_vector, as_vector, random_directions

logger = logging.getLogger(__name__)

SpraySource = Literal["metric", "closed_form", "zero"]


@dataclass(frozen=True, eq=False)
class SprayVectorField:
    source: SpraySource
    dim: int
    algebra: LieAlgebra | None = None
    norm: MinkowskiNorm | None = None
    expressions: CompiledVectorField | None = None

    @classmethod
    def zero(cls, dim: int) -> SprayVectorField:
        return cls(source="zero", dim=dim)

    @classmethod
    def from_metric(cls, algebra: LieAlgebra, norm: MinkowskiNorm) -> SprayVectorField:
        if norm.dim != algebra.dim:
            raise DimensionMismatchError(algebra.dim, norm.dim, "norm")
        return cls(source="metric", dim=algebra.dim, algebra=algebra, norm=norm)

    @classmethod
    def closed_form(cls, texts: Sequence[str], dim: int) -> SprayVectorField:
        return cls(source="closed_form", dim=dim, expressions=CompiledVectorField.compile(texts, dim))

    @property
    def has_analytic_derivatives(self) -> bool:
        return self.source in ("zero", "closed_form")

    def __call__(self, y: ArrayLike) -> Vector:
        return eta_eval(self, y)


def eta_from_metric(algebra: LieAlgebra, norm: MinkowskiNorm, y: ArrayLike) -> Vector:
    """Solve g_y(η, e_i) = g_y(y, [e_i, y]) for η with a Cholesky factorisation of g_y."""
    point = as_nonzero_vector(y, algebra.dim)
    g = fundamental_tensor(norm, point)
    rhs = -ad_matrix(algebra, point).T @ (g @ point)
    try:
        factor = cho_factor(g)
    except LinAlgError as exc:
        raise StrongConvexityError(
            f"fundamental tensor is not positive definite at y = {point}", witness=point
        ) from exc
    return cho_solve(factor, rhs)


def eta_eval(spray: SprayVectorField, y: ArrayLike) -> Vector:
    point = as_nonzero_vector(y, spray.dim)
    if spray.source == "zero":
        return np.zeros(spray.dim)
    if spray.source == "metric":
        if spray.algebra is None or spray.norm is None:
            raise ConfigError("metric spray needs an algebra and a norm", key_path="spray.source")
        return eta_from_metric(spray.algebra, spray.norm, point)
    if spray.expressions is None:
        raise ConfigError("closed-form spray has no expressions", key_path="spray.expressions")
    value = spray.expressions.value(point)
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"closed-form spray is not finite at y = {point}")
    return value


def _evaluator(spray: SprayVectorField):  # type: ignore[no-untyped-def]
    return lambda x: eta_eval(spray, x)


def d_eta(spray: SprayVectorField, y: ArrayLike, v: ArrayLike) -> Vector:
    """Dη(y, v), the derivative of η at y in direction v."""
    point = as_nonzero_vector(y, spray.dim)
    direction = as_vector(v, spray.dim, "v")
    if spray.source == "zero":
        return np.zeros(spray.dim)
    if spray.source == "closed_form" and spray.expressions is not None:
        return spray.expressions.jacobian(point) @ direction
    if not np.any(direction):
        return np.zeros(spray.dim)
    return differences.central_difference(_evaluator(spray), point, direction)


def eta_jacobian(spray: SprayVectorField, y: ArrayLike) -> Matrix:
    """Matrix of Dη(y, ·); J[i, r] = ∂η^i/∂u^r."""
    point = as_nonzero_vector(y, spray.dim)
    if spray.source == "closed_form" and spray.expressions is not None:
        return spray.expressions.jacobian(point)
    return np.column_stack([d_eta(spray, point, e) for e in np.eye(spray.dim)])


def d2_eta(spray: SprayVectorField, y: ArrayLike, v: ArrayLike, u: ArrayLike) -> Vector:
    """D²η(y)[v, u]."""
    point = as_nonzero_vector(y, spray.dim)
    v_vec = as_vector(v, spray.dim, "v")
    u_vec = as_vector(u, spray.dim, "u")
    if spray.source == "zero":
        return np.zeros(spray.dim)
    if spray.source == "closed_form" and spray.expressions is not None:
        return np.einsum("ipq,p,q->i", spray.expressions.second_derivatives(point), v_vec, u_vec)
    if not (np.any(v_vec) and np.any(u_vec)):
        return np.zeros(spray.dim)
    return differences.mixed_second_difference(_evaluator(spray), point, v_vec, u_vec)


def check_dimensions(spray: SprayVectorField, algebra: LieAlgebra) -> None:
    if algebra.dim != spray.dim:
        raise DimensionMismatchError(spray.dim, algebra.dim, "algebra")


def connection_N(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike, v: ArrayLike) -> Vector:
    """N(y, v) = ½Dη(y, v) − ½[y, v]."""
    check_dimensions(spray, algebra)
    return 0.5 * d_eta(spray, y, v) - 0.5 * bracket(algebra, y, v)


def connection_matrix(spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike) -> Matrix:
    """Matrix of N(y, ·)."""
    check_dimensions(spray, algebra)
    return 0.5 * eta_jacobian(spray, y) - 0.5 * ad_matrix(algebra, y)


def d_connection_N(
    spray: SprayVectorField, algebra: LieAlgebra, y: ArrayLike, v: ArrayLike, u: ArrayLike
) -> Vector:
    """DN(y, v, u), the derivative of N(·, v) at y along u: ½D²η(y)[v, u] − ½[u, v]."""
    check_dimensions(spray, algebra)
    return 0.5 * d2_eta(spray, y, v, u) - 0.5 * bracket(algebra, u, v)


@dataclass(frozen=True)
class SprayCheck:
    samples: int
    homogeneity_error: float
    connection_homogeneity_error: float
    tangency_residual: float | None


def check_spray(spray: SprayVectorField, algebra: LieAlgebra, count: int = 100, seed: int = 0) -> SprayCheck:
    """Relative 2-homogeneity of η, 1-homogeneity of N and, for metric sprays, g_y(η(y), y)."""
    homogeneity = 0.0
    connection = 0.0
    tangency = 0.0
    rng = np.random.default_rng(seed + 1)
    for y in random_directions(spray.dim, count, seed):
        y = y * rng.uniform(0.5, 2.0)
        eta = eta_eval(spray, y)
        v = rng.standard_normal(spray.dim)
        n_y = connection_N(spray, algebra, y, v)
        for scale in (0.5, 2.0):
            homogeneity = max(homogeneity, _relative(eta_eval(spray, scale * y), scale**2 * eta))
            connection = max(connection, _relative(connection_N(spray, algebra, scale * y, v), scale * n_y))
        if spray.source == "metric" and spray.norm is not None:
            g = fundamental_tensor(spray.norm, y)
            tangency = max(tangency, abs(float(eta @ g @ y)))
    return SprayCheck(
        samples=count,
        homogeneity_error=homogeneity,
        connection_homogeneity_error=connection,
        tangency_residual=tangency if spray.source == "metric" else None,
    )


def _relative(actual: Vector, expected: Vector) -> float:
    return float(np.max(np.abs(actual - expected)) / max(1.0, float(np.max(np.abs(expected)))))
