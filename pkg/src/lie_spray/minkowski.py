"""Minkowski norms on the algebra and their derivative tensors.

The fundamental tensor is g_y = Hess(½F²)(y) and the Cartan tensor is
C_y = ¼ D³(F²)(y) = ½ Dg(y). Quadratic and randers norms have closed forms;
any norm can be switched to finite differences with ``derivative_mode``.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import differences
from .errors import ExpressionError, NonFiniteError, StrongConvexityError, ZeroVectorError
from .expressions import CompiledExpression
from .utils import Matrix, Vector, as_nonzero_vector, as_vector, sample_directions

logger = logging.getLogger(__name__)

DerivativeMode = Literal["analytic", "finite_difference"]

HOMOGENEITY_TOLERANCE = 1e-8
# noise floor of a finite-difference fundamental tensor is about sqrt(eps)
NOISY_TENSOR_STEP = differences.EPS ** (1 / 6)


@dataclass(frozen=True, eq=False)
class MinkowskiNorm(ABC):
    dim: int
    derivative_mode: DerivativeMode = "analytic"

    kind: str = field(default="user", init=False)

    @abstractmethod
    def value(self, y: Vector) -> float:
        """F(y) for a nonzero algebra vector."""

    def __call__(self, y: ArrayLike) -> float:
        return self.value(as_vector(y, self.dim, "y"))

    def analytic_fundamental(self, y: Vector) -> Matrix | None:
        return None

    def analytic_cartan(self, y: Vector) -> NDArray[np.float64] | None:
        return None

    @property
    def uses_analytic_derivatives(self) -> bool:
        return self.derivative_mode == "analytic" and self.analytic_fundamental(np.eye(self.dim)[0]) is not None

    def half_square(self, y: Vector) -> float:
        return 0.5 * self.value(y) ** 2

    def quarter_square(self, y: Vector) -> float:
        return 0.25 * self.value(y) ** 2


@dataclass(frozen=True, eq=False)
class QuadraticNorm(MinkowskiNorm):
    """F(y) = √(yᵀQy)."""

    Q: NDArray[np.float64] = field(default_factory=lambda: np.eye(1))

    kind: str = field(default="quadratic", init=False)

    @classmethod
    def from_matrix(cls, Q: ArrayLike, derivative_mode: DerivativeMode = "analytic") -> QuadraticNorm:
        matrix = np.array(Q, dtype=float)
        matrix = 0.5 * (matrix + matrix.T)
        matrix.setflags(write=False)
        return cls(dim=matrix.shape[0], derivative_mode=derivative_mode, Q=matrix)

    @classmethod
    def euclidean(cls, dim: int) -> QuadraticNorm:
        return cls.from_matrix(np.eye(dim))

    def value(self, y: Vector) -> float:
        return float(np.sqrt(y @ self.Q @ y))

    def analytic_fundamental(self, y: Vector) -> Matrix:
        return np.array(self.Q)

    def analytic_cartan(self, y: Vector) -> NDArray[np.float64]:
        return np.zeros((self.dim, self.dim, self.dim))


@dataclass(frozen=True, eq=False)
class RandersNorm(MinkowskiNorm):
    """F(y) = √(yᵀQy) + b·y, a Minkowski norm iff |b|_Q = √(bᵀQ⁻¹b) < 1."""

    Q: NDArray[np.float64] = field(default_factory=lambda: np.eye(1))
    b: NDArray[np.float64] = field(default_factory=lambda: np.zeros(1))

    kind: str = field(default="randers", init=False)

    @classmethod
    def from_data(cls, Q: ArrayLike, b: ArrayLike, derivative_mode: DerivativeMode = "analytic") -> RandersNorm:
        matrix = np.array(Q, dtype=float)
        matrix = 0.5 * (matrix + matrix.T)
        vector = as_vector(b, matrix.shape[0], "b").copy()
        matrix.setflags(write=False)
        vector.setflags(write=False)
        return cls(dim=matrix.shape[0], derivative_mode=derivative_mode, Q=matrix, b=vector)

    @property
    def b_norm(self) -> float:
        return float(np.sqrt(self.b @ np.linalg.solve(self.Q, self.b)))

    def value(self, y: Vector) -> float:
        return float(np.sqrt(y @ self.Q @ y) + self.b @ y)

    def _pieces(self, y: Vector) -> tuple[float, float, Vector, Matrix, Vector]:
        alpha = float(np.sqrt(y @ self.Q @ y))
        beta = float(self.b @ y)
        ell = self.Q @ y / alpha
        h = self.Q - np.outer(ell, ell)
        m = self.b - (beta / alpha) * ell
        return alpha, beta, ell, h, m

    def analytic_fundamental(self, y: Vector) -> Matrix:
        alpha, beta, ell, h, _ = self._pieces(y)
        dF = ell + self.b
        return ((alpha + beta) / alpha) * h + np.outer(dF, dF)

    def analytic_cartan(self, y: Vector) -> NDArray[np.float64]:
        alpha, _, _, h, m = self._pieces(y)
        hm = np.einsum("ij,k->ijk", h, m)
        return (hm + np.transpose(hm, (1, 2, 0)) + np.transpose(hm, (2, 0, 1))) / (2.0 * alpha)


@dataclass(frozen=True, eq=False)
class ExpressionNorm(MinkowskiNorm):
    """A user formula in ``u1..un``; derivatives always come from finite differences."""

    expression: CompiledExpression | None = None

    kind: str = field(default="user", init=False)

    @classmethod
    def from_text(cls, text: str, dim: int) -> ExpressionNorm:
        return cls(dim=dim, derivative_mode="finite_difference", expression=CompiledExpression.compile(text, dim))

    def value(self, y: Vector) -> float:
        if self.expression is None:
            raise ExpressionError("expression norm has no expression")
        return self.expression.value(y)


def _checked(matrix: NDArray[np.float64], what: str, y: Vector) -> NDArray[np.float64]:
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError(f"{what} is not finite at y = {y}; the norm is not smooth there")
    return matrix


def fundamental_tensor(norm: MinkowskiNorm, y: ArrayLike) -> Matrix:
    """g_y(e_i, e_j) = ½ ∂²/∂s∂t F²(y + s e_i + t e_j) at s = t = 0."""
    point = as_nonzero_vector(y, norm.dim)
    analytic = norm.analytic_fundamental(point) if norm.derivative_mode == "analytic" else None
    g = analytic if analytic is not None else differences.hessian(norm.half_square, point)
    g = _checked(np.asarray(g, dtype=float), "fundamental tensor", point)
    return 0.5 * (g + g.T)


def cartan_tensor(norm: MinkowskiNorm, y: ArrayLike) -> NDArray[np.float64]:
    """All components C_y(e_i, e_j, e_k)."""
    point = as_nonzero_vector(y, norm.dim)
    analytic = norm.analytic_cartan(point) if norm.derivative_mode == "analytic" else None
    if analytic is not None:
        return _checked(np.asarray(analytic, dtype=float), "Cartan tensor", point)
    n = norm.dim
    eye = np.eye(n)
    tensor = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                value = differences.mixed_third_difference(norm.quarter_square, point, eye[i], eye[j], eye[k])
                for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                    tensor[a, b, c] = value
    return _checked(tensor, "Cartan tensor", point)


def cartan(norm: MinkowskiNorm, y: ArrayLike, u: ArrayLike, v: ArrayLike, w: ArrayLike) -> float:
    """C_y(u, v, w) = ¼ ∂³/∂r∂s∂t F²(y + ru + sv + tw) at 0."""
    point = as_nonzero_vector(y, norm.dim)
    u_vec, v_vec, w_vec = (as_vector(x, norm.dim) for x in (u, v, w))
    analytic = norm.analytic_cartan(point) if norm.derivative_mode == "analytic" else None
    if analytic is not None:
        return float(np.einsum("ijk,i,j,k->", analytic, u_vec, v_vec, w_vec))
    if not (np.any(u_vec) and np.any(v_vec) and np.any(w_vec)):
        return 0.0
    value = differences.mixed_third_difference(norm.quarter_square, point, u_vec, v_vec, w_vec)
    if not np.isfinite(value):
        raise NonFiniteError(f"Cartan tensor is not finite at y = {point}")
    return value


def log_volume(norm: MinkowskiNorm, y: Vector) -> float:
    """f(y) = ½ ln det g_y; a non-positive determinant means convexity fails at y."""
    det = float(np.linalg.det(fundamental_tensor(norm, y)))
    if not det > 0.0:
        raise StrongConvexityError(f"fundamental tensor is singular or indefinite at y = {y} (det = {det:.3e})", witness=y)
    return 0.5 * float(np.log(det))


def mean_cartan(norm: MinkowskiNorm, y: ArrayLike, w: ArrayLike) -> float:
    """I(w): derivative of ½ ln det g along w, by central differences."""
    point = as_nonzero_vector(y, norm.dim)
    direction = as_vector(w, norm.dim, "w")
    if not np.any(direction):
        return 0.0
    base = differences.FIRST_ORDER_STEP if norm.uses_analytic_derivatives else NOISY_TENSOR_STEP
    step = differences.scaled_step(base, point, direction)

    def volume(x: Vector) -> Vector:
        return np.array([log_volume(norm, x)])

    return float(differences.central_difference(volume, point, direction, step=step)[0])


def indicatrix_point(norm: MinkowskiNorm, direction: ArrayLike) -> Vector:
    """Radial projection of ``direction`` onto {F = 1}."""
    d = as_vector(direction, norm.dim, "direction")
    if not np.any(d):
        raise ZeroVectorError("direction must be nonzero")
    value = norm.value(d)
    if not value > 0.0:
        raise StrongConvexityError(f"F is not positive along {d} (F = {value:.3e})", witness=d)
    return d / value


@dataclass(frozen=True)
class ConvexityReport:
    kind: str
    samples: int
    min_value: float
    min_eigenvalue: float
    witness: tuple[float, ...] | None
    homogeneity_error: float
    randers_b_norm: float | None = None

    @property
    def strongly_convex(self) -> bool:
        if self.randers_b_norm is not None and self.randers_b_norm >= 1.0:
            return False
        return self.min_value > 0.0 and self.min_eigenvalue > 0.0

    @property
    def homogeneous(self) -> bool:
        return self.homogeneity_error < HOMOGENEITY_TOLERANCE


def check_convexity(norm: MinkowskiNorm, count: int = 64, seed: int = 0) -> ConvexityReport:
    """Sample 2n axis directions plus ``count`` seeded unit directions.

    Reports the smallest eigenvalue of g_y and of F, with the first direction that
    fails as the witness. Never raises for a failing norm.
    """
    min_value = np.inf
    min_eigenvalue = np.inf
    witness: Vector | None = None
    homogeneity = 0.0
    for y in sample_directions(norm.dim, count, seed):
        value = norm.value(y)
        for scale in (0.5, 2.0, 10.0):
            homogeneity = max(homogeneity, abs(norm.value(scale * y) - scale * value) / max(abs(scale * value), 1e-300))
        try:
            eigenvalue = float(np.min(np.linalg.eigvalsh(fundamental_tensor(norm, y))))
        except NonFiniteError:
            eigenvalue = -np.inf
        if (value <= 0.0 or eigenvalue <= 0.0) and witness is None:
            witness = y
        min_value = min(min_value, value)
        min_eigenvalue = min(min_eigenvalue, eigenvalue)
    report = ConvexityReport(
        kind=norm.kind,
        samples=2 * norm.dim + count,
        min_value=float(min_value),
        min_eigenvalue=float(min_eigenvalue),
        witness=None if witness is None else tuple(float(x) for x in witness),
        homogeneity_error=float(homogeneity),
        randers_b_norm=norm.b_norm if isinstance(norm, RandersNorm) else None,
    )
    if not report.strongly_convex:
        logger.warning("%s norm is not strongly convex: min eigenvalue %.3e, witness %s", norm.kind, min_eigenvalue, report.witness)
    return report


def ensure_strongly_convex(norm: MinkowskiNorm, count: int = 64, seed: int = 0) -> ConvexityReport:
    report = check_convexity(norm, count, seed)
    if not report.strongly_convex:
        if report.randers_b_norm is not None and report.randers_b_norm >= 1.0:
            detail = f"|b|_Q = {report.randers_b_norm:.6g} >= 1"
        else:
            detail = f"min eigenvalue {report.min_eigenvalue:.3e}"
        raise StrongConvexityError(f"norm not strongly convex: {detail}", report.witness, report.min_eigenvalue)
    return report
