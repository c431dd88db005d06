from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveInt,
    SerializerFunctionWrapHandler,
    ValidationError,
    model_serializer,
    model_validator,
)

from ..errors import ConfigError
from .structure import LieAlgebra, MatrixRep

IMAGE_KEY = re.compile(r"e([1-9][0-9]*)")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RepDefinition(_Strict):
    """Matrix representation block: ``size``, ``faithful`` and one row-major image ``e<i>`` per basis vector."""

    size: PositiveInt
    faithful: bool = True
    images: dict[str, list[float]] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _collect_images(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        if "images" in data:
            raise ValueError("unknown key 'images'; give the basis images as e1, e2, ...")
        rest = {key: value for key, value in data.items() if not IMAGE_KEY.fullmatch(key)}
        images = {key: value for key, value in data.items() if IMAGE_KEY.fullmatch(key)}
        return {**rest, "images": images}

    @model_serializer(mode="wrap")
    def _flatten_images(self, handler: SerializerFunctionWrapHandler) -> dict[str, Any]:
        data = handler(self)
        images = data.pop("images", {})
        return {**data, **images}


class AlgebraDefinition(_Strict):
    """Definition-file layout; ``constants`` holds 1-based ``[i, j, k, value]`` entries for i < j."""

    dim: PositiveInt
    name: str | None = None
    constants: list[tuple[int, int, int, float]] = Field(default_factory=list)
    rep: RepDefinition | None = None


def algebra_to_dict(algebra: LieAlgebra) -> dict[str, Any]:
    """Serialise to the definition-file layout: 1-based ``[i, j, k, value]`` entries for i < j."""
    constants: list[list[Any]] = []
    n = algebra.dim
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                value = float(algebra.c[i, j, k])
                if value != 0.0:
                    constants.append([i + 1, j + 1, k + 1, value])
    data: dict[str, Any] = {"dim": n, "name": algebra.name, "constants": constants}
    if algebra.rep is not None:
        rep: dict[str, Any] = {"size": algebra.rep.size, "faithful": algebra.rep.faithful}
        for index, image in enumerate(algebra.rep.basis_images):
            rep[f"e{index + 1}"] = [float(x) for x in image.reshape(-1)]
        data["rep"] = rep
    return data


def algebra_from_definition(definition: AlgebraDefinition, source: str = "<inline>", key_prefix: str = "") -> LieAlgebra:
    """Build the algebra from a validated definition; error key paths start with ``key_prefix``.

    An entry given for (i, j) also fixes (j, i) unless that pair is listed explicitly.
    """
    dim = definition.dim
    c = np.zeros((dim, dim, dim))
    explicit: set[tuple[int, int, int]] = set()
    for position, entry in enumerate(definition.constants):
        key_path = f"{key_prefix}constants[{position}]"
        i, j, k = (x - 1 for x in entry[:3])
        if not all(0 <= x < dim for x in (i, j, k)):
            raise ConfigError(f"{source}: {key_path} has an index outside 1..{dim}", key_path=key_path)
        c[i, j, k] = entry[3]
        explicit.add((i, j, k))
        if (j, i, k) not in explicit:
            c[j, i, k] = -entry[3]
    rep = _rep_from_definition(definition.rep, dim, source, f"{key_prefix}rep.") if definition.rep is not None else None
    return LieAlgebra.from_constants(c, definition.name or Path(source).stem, rep)


def _rep_from_definition(rep: RepDefinition, dim: int, source: str, key_prefix: str) -> MatrixRep:
    extra = sorted(set(rep.images) - {f"e{index}" for index in range(1, dim + 1)})
    if extra:
        raise ConfigError(
            f"{source}: rep has images beyond dimension {dim}: {', '.join(extra)}", key_path=f"{key_prefix}{extra[0]}"
        )
    matrices = []
    for index in range(1, dim + 1):
        key = f"e{index}"
        if key not in rep.images:
            raise ConfigError(f"{source}: rep is missing '{key}'", key_path=f"{key_prefix}{key}")
        flat = np.asarray(rep.images[key], dtype=float)
        if flat.size != rep.size * rep.size:
            raise ConfigError(
                f"{source}: rep.{key} needs {rep.size * rep.size} entries, got {flat.size}", key_path=f"{key_prefix}{key}"
            )
        matrices.append(flat.reshape(rep.size, rep.size))
    return MatrixRep.from_matrices(matrices, faithful=rep.faithful)


def algebra_from_dict(data: Any, source: str = "<inline>") -> LieAlgebra:
    """Validate the definition-file layout and build the algebra; unknown keys are errors."""
    try:
        definition = AlgebraDefinition.model_validate(data)
    except ValidationError as exc:
        raise ConfigError.from_validation(exc, source) from exc
    return algebra_from_definition(definition, source)


def read_algebra(path: Path) -> LieAlgebra:
    if not path.exists():
        raise FileNotFoundError(f"Algebra definition file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    return algebra_from_dict(data, str(path))


def write_algebra(algebra: LieAlgebra, path: Path) -> Path:
    # json writes floats with repr, the shortest text that reads back to the same double
    path.write_text(json.dumps(algebra_to_dict(algebra), indent=2) + "\n", encoding="utf-8")
    return path
