"""JSON documents read and written by the CLI.

Complex numbers are two-element arrays [re, im]; matrices are row-major
nested arrays of such pairs.
"""
import json
from pathlib import Path
from typing import Any, Type, TypeVar

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from fidelium.core.channels import KrausChannel
from fidelium.core.designs import StateDesign
from fidelium.core.su_basis import GeneratorBasis
from fidelium.errors import FileFormatError, MissingFileError

ComplexPair = tuple[float, float]
Matrix = list[list[ComplexPair]]

M = TypeVar("M", bound=BaseModel)


def encode_vector(vector: np.ndarray) -> list[ComplexPair]:
    return [(float(z.real), float(z.imag)) for z in np.asarray(vector, dtype=np.complex128)]


def encode_matrix(matrix: np.ndarray) -> Matrix:
    return [encode_vector(row) for row in np.asarray(matrix, dtype=np.complex128)]


def decode(pairs: Any) -> np.ndarray:
    try:
        array = np.asarray(pairs, dtype=np.float64)
    except (ValueError, TypeError) as e:
        raise FileFormatError("ragged complex array") from e
    if array.ndim < 1 or array.shape[-1] != 2:
        raise FileFormatError("complex entries must be [re, im] pairs", shape=list(array.shape))
    return array[..., 0] + 1j * array[..., 1]


class ChannelFile(BaseModel):
    dim: int = Field(ge=1)
    kraus: list[Matrix] = Field(min_length=1)

    @classmethod
    def from_channel(cls, channel: KrausChannel) -> "ChannelFile":
        return cls(dim=channel.dim, kraus=[encode_matrix(k) for k in channel.kraus_ops])

    def to_channel(self, tp_tol: float | None = None) -> KrausChannel:
        ops = decode(self.kraus)
        if ops.shape[1:] != (self.dim, self.dim):
            raise FileFormatError("Kraus operator shape does not match dim", dim=self.dim, shape=list(ops.shape))
        return KrausChannel(ops, tp_tol=tp_tol)


class GateFile(BaseModel):
    dim: int = Field(ge=1)
    matrix: Matrix

    def to_matrix(self) -> np.ndarray:
        matrix = decode(self.matrix)
        if matrix.shape != (self.dim, self.dim):
            raise FileFormatError("gate matrix shape does not match dim", dim=self.dim, shape=list(matrix.shape))
        return matrix


class DesignFile(BaseModel):
    dim: int = Field(ge=1)
    weights: list[float] = Field(min_length=1)
    states: list[list[ComplexPair]] = Field(min_length=1)

    @classmethod
    def from_design(cls, design: StateDesign) -> "DesignFile":
        return cls(dim=design.dim, weights=[float(w) for w in design.weights], states=[encode_vector(s) for s in design.states])

    def to_design(self, source: str = "file") -> StateDesign:
        states = decode(self.states)
        if states.ndim != 2:
            raise FileFormatError("design states must all have length dim", dim=self.dim)
        return StateDesign(self.dim, np.array(self.weights), states, source=source)


class BasisDocument(BaseModel):
    dim: int
    k_d: float
    labels: list[str]
    generators: list[Matrix]

    @classmethod
    def from_basis(cls, basis: GeneratorBasis) -> "BasisDocument":
        return cls(
            dim=basis.dim,
            k_d=basis.k_d,
            labels=basis.labels(),
            generators=[encode_matrix(t) for t in basis.generators],
        )


def read_model(path: str | Path, model: Type[M]) -> M:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"file not found: {path}", path=str(path))
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        errors = e.errors(include_url=False, include_context=False, include_input=False)
        raise FileFormatError(f"cannot parse {path} as {model.__name__}", path=str(path), errors=errors) from e


def dumps(document: BaseModel | dict) -> str:
    """Serialize deterministically; floats use the shortest round-trip repr."""
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json")
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def write_model(path: str | Path, document: BaseModel | dict) -> Path:
    path = Path(path)
    path.write_text(dumps(document), encoding="utf-8")
    return path
