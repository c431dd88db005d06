"""Built-in algebras, each shipped with a faithful matrix representation."""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from ..errors import UnknownAlgebraError
from ..utils import Matrix
from .structure import LieAlgebra, MatrixRep

_ABELIAN_PATTERN = re.compile(r"^abelian\(?(\d+)\)?$")


def _unit(size: int, row: int, col: int) -> Matrix:
    matrix = np.zeros((size, size))
    matrix[row, col] = 1.0
    return matrix


def complex_to_real(matrix: np.ndarray) -> Matrix:
    """Realify A + iB as [[A, -B], [B, A]]; products and commutators are preserved."""
    a, b = matrix.real, matrix.imag
    return np.block([[a, -b], [b, a]])


def abelian(dim: int) -> LieAlgebra:
    """ℝⁿ acting by translations: ρ(e_i) puts a 1 in the last column of row i."""
    if dim < 1:
        raise UnknownAlgebraError(f"abelian algebra needs a positive dimension, got {dim}")
    size = dim + 1
    rep = MatrixRep.from_matrices([_unit(size, i, dim) for i in range(dim)])
    return LieAlgebra.from_constants(np.zeros((dim, dim, dim)), f"abelian({dim})", rep)


def heisenberg3() -> LieAlgebra:
    """[e1, e2] = e3 realised by strictly upper-triangular 3×3 matrices."""
    rep = MatrixRep.from_matrices([_unit(3, 0, 1), _unit(3, 1, 2), _unit(3, 0, 2)])
    return LieAlgebra.from_brackets(3, {(0, 1): {2: 1.0}}, "heisenberg3", rep)


def aff1() -> LieAlgebra:
    """[e1, e2] = e2, the affine group of the line as upper-triangular 2×2 matrices."""
    rep = MatrixRep.from_matrices([_unit(2, 0, 0), _unit(2, 0, 1)])
    return LieAlgebra.from_brackets(2, {(0, 1): {1: 1.0}}, "aff1", rep)


def su2() -> LieAlgebra:
    """[e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2 with e_k = -(i/2)σ_k realised as real 4×4 matrices."""
    sigma = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    rep = MatrixRep.from_matrices([complex_to_real(-0.5j * s) for s in sigma])
    brackets = {(0, 1): {2: 1.0}, (1, 2): {0: 1.0}, (0, 2): {1: -1.0}}
    return LieAlgebra.from_brackets(3, brackets, "su2", rep)


def sl2() -> LieAlgebra:
    """Basis h, e, f with [h, e] = 2e, [h, f] = -2f, [e, f] = h."""
    h = np.diag([1.0, -1.0])
    rep = MatrixRep.from_matrices([h, _unit(2, 0, 1), _unit(2, 1, 0)])
    brackets = {(0, 1): {1: 2.0}, (0, 2): {2: -2.0}, (1, 2): {0: 1.0}}
    return LieAlgebra.from_brackets(3, brackets, "sl2", rep)


CATALOG: dict[str, Callable[[], LieAlgebra]] = {
    "heisenberg3": heisenberg3,
    "aff1": aff1,
    "su2": su2,
    "sl2": sl2,
}


def builtin(name: str) -> LieAlgebra:
    """Look up a catalog algebra: ``abelian(n)``, ``heisenberg3``, ``aff1``, ``su2`` or ``sl2``."""
    key = name.strip().lower().replace(" ", "")
    match = _ABELIAN_PATTERN.match(key)
    if match:
        return abelian(int(match.group(1)))
    try:
        factory = CATALOG[key]
    except KeyError:
        known = ", ".join(["abelian(n)", *CATALOG])
        raise UnknownAlgebraError(f"unknown algebra {name!r}; known: {known}") from None
    return factory()


def catalog_names() -> list[str]:
    return ["abelian(2)", "abelian(3)", *CATALOG]
