"""Small arithmetic expression grammar over algebra coordinates ``u1..un``.

Accepted: numbers, ``u<i>``, ``+ - * / ^``, parentheses, ``sqrt`` and ``abs``.
The text is checked token by token before sympy sees it, so nothing outside the
grammar is ever evaluated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import sympy
from numpy.typing import NDArray
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import ExpressionError
from .utils import Matrix, Vector

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<coord>u(?P<index>\d+))"
    r"|(?P<func>sqrt|abs)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)
_TRANSFORMATIONS = (*standard_transformations, convert_xor)


def coordinate_symbols(dim: int) -> tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"u{i + 1}", real=True) for i in range(dim))


def check_tokens(text: str, dim: int) -> None:
    position = 0
    stripped = text.rstrip()
    if not stripped.strip():
        raise ExpressionError("empty expression")
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        if match is None or match.end() == position:
            bad = stripped[position:].split()[0]
            raise ExpressionError(f"unexpected token {bad!r} in expression {text!r}", token=bad)
        if match.group("coord"):
            index = int(match.group("index"))
            if not 1 <= index <= dim:
                raise ExpressionError(
                    f"coordinate {match.group('coord')} out of range for dimension {dim}", token=match.group("coord")
                )
        position = match.end()


def parse_expression(text: str, dim: int) -> sympy.Expr:
    check_tokens(text, dim)
    symbols = coordinate_symbols(dim)
    local_dict: dict[str, Any] = {str(s): s for s in symbols}
    local_dict.update({"sqrt": sympy.sqrt, "abs": sympy.Abs})
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, ValueError) as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr):
        raise ExpressionError(f"expression {text!r} does not evaluate to a number")
    unknown = {str(s) for s in expr.free_symbols} - {str(s) for s in symbols}
    if unknown:
        name = sorted(unknown)[0]
        raise ExpressionError(f"unknown name {name!r} in expression {text!r}", token=name)
    return expr


def _lambdify(symbols: Sequence[sympy.Symbol], expr: Any) -> Callable[..., Any]:
    return sympy.lambdify(symbols, expr, modules="numpy")


@dataclass(frozen=True)
class CompiledExpression:
    """A scalar expression with numeric value, gradient and Hessian."""

    text: str
    dim: int
    expr: sympy.Expr = field(repr=False)
    _value: Callable[..., Any] = field(repr=False)
    _gradient: Callable[..., Any] = field(repr=False)
    _hessian: Callable[..., Any] = field(repr=False)

    @classmethod
    def compile(cls, text: str, dim: int) -> CompiledExpression:
        expr = parse_expression(text, dim)
        symbols = coordinate_symbols(dim)
        gradient = [sympy.diff(expr, s) for s in symbols]
        hessian = sympy.hessian(expr, symbols)
        return cls(
            text=text,
            dim=dim,
            expr=expr,
            _value=_lambdify(symbols, expr),
            _gradient=_lambdify(symbols, gradient),
            _hessian=_lambdify(symbols, hessian),
        )

    def value(self, y: Vector) -> float:
        return float(self._value(*y))

    def gradient(self, y: Vector) -> Vector:
        return np.asarray(self._gradient(*y), dtype=float).reshape(self.dim)

    def hessian(self, y: Vector) -> Matrix:
        return np.asarray(self._hessian(*y), dtype=float).reshape(self.dim, self.dim)


@dataclass(frozen=True)
class CompiledVectorField:
    """One expression per coordinate, with exact Jacobian and second derivatives."""

    components: tuple[CompiledExpression, ...]

    @classmethod
    def compile(cls, texts: Sequence[str], dim: int) -> CompiledVectorField:
        if len(texts) != dim:
            raise ExpressionError(f"expected {dim} component expressions, got {len(texts)}")
        return cls(tuple(CompiledExpression.compile(text, dim) for text in texts))

    @property
    def dim(self) -> int:
        return len(self.components)

    def value(self, y: Vector) -> Vector:
        return np.array([component.value(y) for component in self.components])

    def jacobian(self, y: Vector) -> Matrix:
        """J[i, r] = ∂η^i/∂u^r."""
        return np.vstack([component.gradient(y) for component in self.components])

    def second_derivatives(self, y: Vector) -> NDArray[np.float64]:
        """T[i, p, q] = ∂²η^i/∂u^p∂u^q."""
        return np.stack([component.hessian(y) for component in self.components])

