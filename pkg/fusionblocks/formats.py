"""
File and report schemas.

Fusion data::

    {"labels": ["1", "eps", "sigma"], "dual": [0, 1, 2], "tensor": [[[...]]]}

with ``tensor[i][j][k] = N_{i,j}^k`` and the vacuum at index 0. Dual graphs::

    {"vertices": [{"genus": 0}], "edges": [[0, 1]], "legs": [{"vertex": 0, "label": "sigma"}]}
"""
from __future__ import annotations

from pathlib import Path
from typing import (
    Annotated,
    Any,
    TypeVar,
    Union,
)

from loguru import logger
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
)

from fusionblocks.exceptions import FormatError

Multiplicity = Annotated[int, Field(ge=0)]

ModelT = TypeVar('ModelT', bound=BaseModel)


class FusionFile(BaseModel):
    model_config = ConfigDict(extra='forbid')

    labels: list[str] = Field(min_length=1)
    dual: list[int]
    tensor: list[list[list[Multiplicity]]]


class VertexRecord(BaseModel):
    model_config = ConfigDict(extra='forbid')

    genus: int = Field(ge=0)


class LegRecord(BaseModel):
    model_config = ConfigDict(extra='forbid')

    vertex: int = Field(ge=0)
    label: str


class GraphFile(BaseModel):
    model_config = ConfigDict(extra='forbid')

    vertices: list[VertexRecord] = Field(min_length=1)
    edges: list[tuple[int, int]] = Field(default_factory=list)
    legs: list[LegRecord] = Field(default_factory=list)


class Report(BaseModel):
    """The ``--json`` envelope shared by every subcommand; serialize with ``by_alias=True``."""

    model_config = ConfigDict(populate_by_name=True)

    command: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    result: Any = None
    residuals: list[dict[str, Any]] = Field(default_factory=list)
    runtime_ms: float = Field(default=0.0, alias='runtime-ms')


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = '.'.join(str(piece) for piece in item['loc']) or '<document>'
        parts.append(f'{location}: {item["msg"]}')
    return '; '.join(parts)


def read_model(path: Union[str, Path], model: type[ModelT]) -> ModelT:
    """
    Parse a JSON file into ``model``.

    Raises:
        FormatError: The file is missing, is not JSON (the message carries line and column) or a
            field fails validation (the message carries the field path).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f'{path}: cannot read file ({e})') from e
    try:
        parsed = model.model_validate_json(text)
    except ValidationError as e:
        raise FormatError(f'{path}: {_describe(e)}') from e
    logger.debug('Read {} from {}', model.__name__, path)
    return parsed


def write_model(path: Union[str, Path], document: BaseModel) -> None:
    Path(path).write_text(document.model_dump_json(indent=2) + '\n')
    logger.debug('Wrote {} to {}', type(document).__name__, path)
