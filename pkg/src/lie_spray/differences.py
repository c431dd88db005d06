"""Finite-difference kernels for maps on the slit algebra.

Steps scale with ``max(1, |y|)`` and shrink with ``max(1, |direction|)`` so a
stencil never reaches further than a fixed fraction of ``|y|`` from the base
point. The exponent of machine epsilon is picked per derivative order to
balance truncation against round-off.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import StencilError
from .utils import Matrix, Vector

EPS = float(np.finfo(float).eps)
FIRST_ORDER_STEP = EPS ** (1 / 3)
FOURTH_ORDER_STEP = EPS ** (1 / 5)
SECOND_ORDER_STEP = EPS ** (1 / 4)
THIRD_ORDER_STEP = EPS ** (1 / 5)

VectorMap = Callable[[Vector], Vector]
ScalarMap = Callable[[Vector], float]


def scaled_step(base: float, y: Vector, *directions: Vector) -> float:
    scale = max(1.0, float(np.linalg.norm(y)))
    longest = max([1.0, *(float(np.linalg.norm(d)) for d in directions)])
    return base * scale / longest


def _guard(y: Vector, reach: float) -> None:
    # y stays away from 0 along the whole stencil segment
    if reach >= float(np.linalg.norm(y)):
        raise StencilError(f"stencil of reach {reach:.3e} crosses the origin at |y| = {np.linalg.norm(y):.3e}")


def central_difference(fn: VectorMap, y: Vector, v: Vector, step: float | None = None) -> Vector:
    """(fn(y + hv) - fn(y - hv)) / 2h."""
    h = step if step is not None else scaled_step(FIRST_ORDER_STEP, y, v)
    _guard(y, h * float(np.linalg.norm(v)))
    return (np.asarray(fn(y + h * v)) - np.asarray(fn(y - h * v))) / (2.0 * h)


def five_point_difference(fn: VectorMap, y: Vector, v: Vector, step: float | None = None) -> Vector:
    """Fourth-order central first derivative along ``v``."""
    h = step if step is not None else scaled_step(FOURTH_ORDER_STEP, y, v)
    _guard(y, 2.0 * h * float(np.linalg.norm(v)))
    f = [np.asarray(fn(y + k * h * v)) for k in (-2, -1, 1, 2)]
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)


def mixed_second_difference(fn: VectorMap, y: Vector, v: Vector, u: Vector, step: float | None = None) -> Vector:
    """Second derivative D²fn(y)[v, u] from the four-point mixed stencil."""
    h = step if step is not None else scaled_step(SECOND_ORDER_STEP, y, v, u)
    _guard(y, h * (float(np.linalg.norm(v)) + float(np.linalg.norm(u))))
    pp = np.asarray(fn(y + h * v + h * u))
    pm = np.asarray(fn(y + h * v - h * u))
    mp = np.asarray(fn(y - h * v + h * u))
    mm = np.asarray(fn(y - h * v - h * u))
    return (pp - pm - mp + mm) / (4.0 * h * h)


def mixed_third_difference(fn: ScalarMap, y: Vector, u: Vector, v: Vector, w: Vector, step: float | None = None) -> float:
    """Third derivative D³fn(y)[u, v, w] from the eight-point mixed stencil."""
    h = step if step is not None else scaled_step(THIRD_ORDER_STEP, y, u, v, w)
    reach = h * (float(np.linalg.norm(u)) + float(np.linalg.norm(v)) + float(np.linalg.norm(w)))
    _guard(y, reach)
    total = 0.0
    for su in (1.0, -1.0):
        for sv in (1.0, -1.0):
            for sw in (1.0, -1.0):
                total += su * sv * sw * float(fn(y + h * (su * u + sv * v + sw * w)))
    return total / (8.0 * h**3)


def hessian(fn: ScalarMap, y: Vector, step: float | None = None) -> Matrix:
    """Symmetric Hessian of a scalar map, diagonal from the three-point rule."""
    n = y.shape[0]
    h = step if step is not None else scaled_step(SECOND_ORDER_STEP, y)
    _guard(y, 2.0 * h)
    eye = np.eye(n)
    f0 = float(fn(y))
    out = np.zeros((n, n))
    for i in range(n):
        out[i, i] = (float(fn(y + h * eye[i])) - 2.0 * f0 + float(fn(y - h * eye[i]))) / (h * h)
        for j in range(i + 1, n):
            value = float(
                mixed_second_difference(lambda x: np.asarray(fn(x)), y, eye[i], eye[j], step=h)
            )
            out[i, j] = value
            out[j, i] = value
    return out


def jacobian(fn: VectorMap, y: Vector, *, fourth_order: bool = False) -> Matrix:
    """Columns are directional derivatives along the coordinate axes."""
    n = y.shape[0]
    rule = five_point_difference if fourth_order else central_difference
    return np.column_stack([rule(fn, y, np.eye(n)[j]) for j in range(n)])
