from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DimensionMismatchError
from ..utils import Matrix, Vector, as_vector

logger = logging.getLogger(__name__)

STRUCTURE_TOLERANCE = 1e-12


def _frozen(array: NDArray[np.float64]) -> NDArray[np.float64]:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """Matrix images ρ(e_i) of the basis, all of shape (size, size)."""

    basis_images: NDArray[np.float64]
    faithful: bool = True

    @classmethod
    def from_matrices(cls, matrices: Sequence[ArrayLike], faithful: bool = True) -> MatrixRep:
        arrays = [np.asarray(m, dtype=float) for m in matrices]
        size = arrays[0].shape[0] if arrays and arrays[0].ndim else 0
        for index, array in enumerate(arrays):
            if array.shape != (size, size):
                raise DimensionMismatchError(size * size, int(array.size), f"representation image e{index + 1}")
        images = np.array(arrays).reshape(len(arrays), size, size)
        return cls(_frozen(images), faithful)

    @property
    def size(self) -> int:
        return int(self.basis_images.shape[1])

    @property
    def dim(self) -> int:
        return int(self.basis_images.shape[0])

    def image(self, y: ArrayLike) -> Matrix:
        """ρ(y) = y^i ρ(e_i)."""
        return np.einsum("i,ijk->jk", as_vector(y, self.dim), self.basis_images)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Real Lie algebra given by structure constants c[i, j, k] = c_{ij}^k, i.e. [e_i, e_j] = c_{ij}^k e_k."""

    c: NDArray[np.float64]
    name: str = "custom"
    rep: MatrixRep | None = None

    @classmethod
    def from_constants(cls, constants: ArrayLike, name: str = "custom", rep: MatrixRep | None = None) -> LieAlgebra:
        c = np.array(constants, dtype=float)
        n = c.shape[0] if c.ndim else 0
        if c.shape != (n, n, n):
            raise DimensionMismatchError(n**3, int(c.size), "structure constant array")
        if rep is not None and rep.dim != c.shape[0]:
            raise DimensionMismatchError(c.shape[0], rep.dim, "representation")
        return cls(_frozen(c), name, rep)

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        brackets: dict[tuple[int, int], dict[int, float]],
        name: str = "custom",
        rep: MatrixRep | None = None,
    ) -> LieAlgebra:
        """Build from 0-based ``{(i, j): {k: value}}`` entries with i < j; the antisymmetric half is filled in."""
        c = np.zeros((dim, dim, dim))
        for (i, j), image in brackets.items():
            for k, value in image.items():
                c[i, j, k] = value
                c[j, i, k] = -value
        return cls.from_constants(c, name, rep)

    @property
    def dim(self) -> int:
        return int(self.c.shape[0])

    def vector(self, value: ArrayLike, what: str = "vector") -> Vector:
        return as_vector(value, self.dim, what)

    def bracket(self, a: ArrayLike, b: ArrayLike) -> Vector:
        return bracket(self, a, b)

    def ad(self, y: ArrayLike) -> Matrix:
        return ad_matrix(self, y)

    def killing_form(self) -> Matrix:
        """B(e_i, e_j) = tr(ad e_i ad e_j)."""
        return np.einsum("iml,jlm->ij", self.c, self.c)

    def trace_ad(self) -> Vector:
        """tr ad(e_l) = c_{lj}^j for each l."""
        return np.einsum("ljj->l", self.c)

    def center_dimension(self) -> int:
        # z is central iff z^i c_{ij}^k = 0 for all j, k
        stacked = self.c.reshape(self.dim, self.dim * self.dim).T
        return self.dim - int(np.linalg.matrix_rank(stacked, tol=STRUCTURE_TOLERANCE))

    def derived_span(self) -> Matrix:
        """Orthonormal basis (columns) of [g, g]."""
        images = self.c.reshape(self.dim * self.dim, self.dim).T
        u, s, _ = np.linalg.svd(images)
        rank = int(np.sum(s > STRUCTURE_TOLERANCE))
        return u[:, :rank]

    def derived_dimension(self) -> int:
        return int(self.derived_span().shape[1])

    def derived_direction(self) -> Vector | None:
        """Unit spanning vector of [g, g] when it is one-dimensional, as for aff(1)."""
        span = self.derived_span()
        if span.shape[1] != 1:
            return None
        direction = span[:, 0]
        # sign fixed so the largest entry is positive
        return direction if direction[np.argmax(np.abs(direction))] > 0 else -direction


def bracket(algebra: LieAlgebra, a: ArrayLike, b: ArrayLike) -> Vector:
    """[a, b]^k = a^i b^j c_{ij}^k."""
    a_vec = as_vector(a, algebra.dim, "a")
    b_vec = as_vector(b, algebra.dim, "b")
    return np.einsum("i,j,ijk->k", a_vec, b_vec, algebra.c)


def ad_matrix(algebra: LieAlgebra, y: ArrayLike) -> Matrix:
    """Matrix of v ↦ [y, v]; column j holds the coordinates of [y, e_j]."""
    y_vec = as_vector(y, algebra.dim, "y")
    return np.einsum("i,ijk->kj", y_vec, algebra.c)


@dataclass(frozen=True)
class ValidationReport:
    algebra: str
    dim: int
    antisymmetry_residual: float
    jacobi_residual: float
    unimodular: bool
    trace_ad: tuple[float, ...]
    center_dimension: int
    rep_residual: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        residuals = [self.antisymmetry_residual, self.jacobi_residual]
        if self.rep_residual is not None:
            residuals.append(self.rep_residual)
        return max(residuals) < STRUCTURE_TOLERANCE


def jacobi_tensor(c: NDArray[np.float64]) -> NDArray[np.float64]:
    """J[i, j, k, l] = Σ_m c_ij^m c_mk^l + c_jk^m c_mi^l + c_ki^m c_mj^l."""
    t = np.einsum("ijm,mkl->ijkl", c, c)
    return t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))


def representation_residual(algebra: LieAlgebra) -> float | None:
    if algebra.rep is None:
        return None
    images = algebra.rep.basis_images
    commutators = np.einsum("iab,jbc->ijac", images, images)
    commutators = commutators - np.transpose(commutators, (1, 0, 2, 3))
    expected = np.einsum("ijk,kac->ijac", algebra.c, images)
    return float(np.max(np.abs(commutators - expected)))


def validate(algebra: LieAlgebra) -> ValidationReport:
    """Report-only structural checks; never raises on bad constants."""
    c = algebra.c
    antisymmetry = float(np.max(np.abs(c + np.transpose(c, (1, 0, 2)))))
    jacobi = float(np.max(np.abs(jacobi_tensor(c))))
    trace = algebra.trace_ad()
    center = algebra.center_dimension()
    warnings: list[str] = []
    if center > 0 and algebra.rep is None:
        message = (
            f"algebra {algebra.name!r} has a {center}-dimensional centre and no matrix representation; "
            "the adjoint representation is not faithful, supply a rep for group reconstruction"
        )
        logger.warning(message)
        warnings.append(message)
    if algebra.rep is not None and not algebra.rep.faithful:
        warnings.append(f"representation of {algebra.name!r} is marked as not faithful")
    return ValidationReport(
        algebra=algebra.name,
        dim=algebra.dim,
        antisymmetry_residual=antisymmetry,
        jacobi_residual=jacobi,
        unimodular=bool(np.all(np.abs(trace) < STRUCTURE_TOLERANCE)),
        trace_ad=tuple(float(x) for x in trace),
        center_dimension=center,
        rep_residual=representation_residual(algebra),
        warnings=tuple(warnings),
    )
