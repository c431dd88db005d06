from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, model_validator

from .algebra.definition_file import AlgebraDefinition
from .errors import ConfigError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class AlgebraConfig(_Strict):
    builtin: str | None = None  # aff1, su2, heisenberg3, sl2, abelian(3)
    file: str | None = None  # path to an algebra definition file, relative to the config
    inline: AlgebraDefinition | None = None  # same layout as the definition file

    @model_validator(mode="after")
    def _exactly_one(self) -> AlgebraConfig:
        given = [name for name in ("builtin", "file", "inline") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one of builtin, file or inline (got {given or 'none'})")
        return self


class NormConfig(_Strict):
    kind: Literal["quadratic", "randers", "user"] = "quadratic"
    q: list[list[float]] | None = Field(default=None, alias="Q")  # identity when omitted
    b: list[float] | None = None
    expr: str | None = None  # "sqrt(u1^2 + u2^2) + 0.3*u1"
    derivatives: Literal["analytic", "finite_difference"] = "analytic"

    @model_validator(mode="after")
    def _check_kind(self) -> NormConfig:
        if self.q is not None:
            matrix = np.array(self.q, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError("Q must be a square matrix")
            if np.any(np.abs(matrix - matrix.T) > 1e-12 * max(1.0, float(np.max(np.abs(matrix))))):
                raise ValueError("Q must be symmetric")
            if float(np.min(np.linalg.eigvalsh(matrix))) <= 0.0:
                raise ValueError("norm not strongly convex: Q is not positive definite")
        if self.kind == "randers":
            if self.b is None:
                raise ValueError("randers norm needs b")
            b = np.array(self.b, dtype=float)
            matrix = np.eye(b.shape[0]) if self.q is None else np.array(self.q, dtype=float)
            if matrix.shape[0] != b.shape[0]:
                raise ValueError(f"b has {b.shape[0]} entries but Q is {matrix.shape[0]}x{matrix.shape[0]}")
            b_norm = float(np.sqrt(b @ np.linalg.solve(matrix, b)))
            if b_norm >= 1.0:
                raise ValueError(f"norm not strongly convex: |b|_Q = {b_norm:.6g} >= 1")
        if self.kind == "user" and not self.expr:
            raise ValueError("user norm needs expr")
        return self


class SprayConfig(_Strict):
    source: Literal["metric", "closed_form", "zero"] = "metric"
    expressions: list[str] | None = None  # one per coordinate, "-sqrt(u1^2+u2^2)*u1"

    @model_validator(mode="after")
    def _check_source(self) -> SprayConfig:
        if self.source == "closed_form" and not self.expressions:
            raise ValueError("closed_form spray needs expressions")
        return self


class IntegratorConfig(_Strict):
    method: Literal["rk4", "rk45_adaptive"] = "rk45_adaptive"
    initial_step: PositiveFloat = 1e-2  # fixed step for rk4
    atol: PositiveFloat = 1e-10
    rtol: PositiveFloat = 1e-8
    t_span: tuple[float, float] = (0.0, 1.0)
    blowup_norm_cap: PositiveFloat = 1e8
    output_step: PositiveFloat | None = 1e-2  # None records every accepted step
    orthonormalize: bool = False
    max_steps: PositiveInt = 2_000_000

    @model_validator(mode="after")
    def _check_span(self) -> IntegratorConfig:
        start, end = self.t_span
        if not start <= 0.0 <= end or start == end:
            raise ValueError(f"t_span must satisfy a <= 0 <= b with a < b, got {self.t_span}")
        return self


class RunConfig(_Strict):
    algebra: AlgebraConfig
    norm: NormConfig | None = None
    spray: SprayConfig = Field(default_factory=SprayConfig)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    seed: int = 0
    samples: PositiveInt = 50
    y0: list[float] | None = None
    g0: Literal["identity"] | list[list[float]] = "identity"
    resolution: int = Field(default=720, ge=4)  # scan points on the indicatrix
    horizon: PositiveFloat = 50.0
    directions: PositiveInt = 16
    flow_time: PositiveFloat = 20.0
    landsberg_tolerance: PositiveFloat = 1e-4
    scan_only: bool = False

    @model_validator(mode="after")
    def _check_spray_needs(self) -> RunConfig:
        if self.spray.source == "metric" and self.norm is None:
            raise ValueError("spray source 'metric' needs a norm")
        return self


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Syntax errors carry the line and column, semantic errors the key path of the
    first offending entry; unknown keys are errors.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError.from_validation(exc) from exc
    if config.algebra.file is not None:
        path = Path(config.algebra.file)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"algebra file {str(path)!r} does not exist", key_path="algebra.file")
        config.algebra.file = str(path)
    return config


def load_config(path: Path) -> RunConfig:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from exc
    return parse_config(text, path.parent)


def apply_overrides(config: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    """Return a revalidated copy with dotted keys (``integrator.atol``) replaced; None values are skipped."""
    data = config.model_dump(by_alias=True)
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = dotted.split(".")
        node = data
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError.from_validation(exc, source="override") from exc
