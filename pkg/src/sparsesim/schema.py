"""JSON circuit schema and its conversion to internal circuit objects.

The wire format mirrors the library's circuit model: `input` is a bit string
whose first character is qubit 0 (the least significant bit), `u1` selects a
preparation recipe by its `type` tag, `u2` fixes the measurement basis, and
`measure` lists the measured qubits in output-bit order.  Named single-qubit
unitaries ("H", "X", ...) and explicit 2x2 matrices of [re, im] pairs
(row-major) are interchangeable.
"""

from __future__ import annotations

import json
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .bits import MAX_BITS, BitString
from .circuits import (
    CircuitSpec,
    FunctionRecipe,
    IqpRecipe,
    ProductBlock,
    ProductRecipe,
    QftBlock,
    QftThenReversible,
)


class CircuitParseError(ValueError):
    """A circuit description failed to parse; `field` locates the problem."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


Unitary = Union[str, list]


class GateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    gate: Literal["not", "cnot", "toffoli"]
    target: int = Field(ge=0)
    control: int | None = Field(default=None, ge=0)
    controls: list[int] | None = None

    def to_tuple(self) -> tuple:
        if self.gate == "not":
            if self.control is not None or self.controls is not None:
                raise ValueError("'not' takes only a target")
            return ("not", self.target)
        if self.gate == "cnot":
            if self.control is None or self.controls is not None:
                raise ValueError("'cnot' takes control and target")
            return ("cnot", self.control, self.target)
        if self.controls is None or len(self.controls) != 2 or self.control is not None:
            raise ValueError("'toffoli' takes controls (two) and target")
        return ("toffoli", self.controls[0], self.controls[1], self.target)


class QftU1Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["qft-then-reversible"]
    qft_targets: list[int]
    gates: list[GateModel] = Field(default_factory=list)
    inverse: bool = False


class IqpGateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    theta: float
    qubits: list[int]


class IqpU1Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["iqp"]
    gates: list[IqpGateModel]


class FunctionU1Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["function"]
    name: str


class ProductU1Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["product"]
    unitaries: list[Unitary]


U1Model = Union[QftU1Model, IqpU1Model, FunctionU1Model, ProductU1Model]


class QftU2Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["qft"]
    targets: list[int]
    inverse: bool = False


class ProductU2Model(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["product"]
    unitaries: list[Unitary]


U2Model = Union[QftU2Model, ProductU2Model]


class CircuitModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int = Field(ge=1, le=MAX_BITS)
    input: str
    u1: U1Model = Field(discriminator="type")
    u2: U2Model = Field(discriminator="type")
    measure: list[int]

    @field_validator("input")
    @classmethod
    def _bits_only(cls, v: str) -> str:
        if not v or any(c not in "01" for c in v):
            raise ValueError("input must be a nonempty string over {0, 1}")
        return v


def _explicit_unitary(u: Unitary) -> "str | np.ndarray":
    if isinstance(u, str):
        return u
    mat = np.asarray(u, dtype=np.float64) if _is_real_nested(u) else None
    if mat is None or mat.shape != (2, 2, 2):
        raise ValueError("explicit unitary must be 2x2 entries of [re, im] pairs")
    return mat[..., 0] + 1j * mat[..., 1]


def _is_real_nested(u) -> bool:
    try:
        arr = np.asarray(u, dtype=np.float64)
    except (TypeError, ValueError):
        return False
    return arr.shape == (2, 2, 2)


def to_spec(model: CircuitModel) -> CircuitSpec:
    """Convert a validated wire model into an internal circuit description."""
    if len(model.input) != model.n:
        raise CircuitParseError(f"expected {model.n} bits, got {len(model.input)}", "input")
    input_value = BitString.from_str(model.input).value

    u1 = model.u1
    try:
        if isinstance(u1, QftU1Model):
            recipe = QftThenReversible(
                tuple(u1.qft_targets),
                tuple(g.to_tuple() for g in u1.gates),
                u1.inverse,
            )
        elif isinstance(u1, IqpU1Model):
            recipe = IqpRecipe(tuple((g.theta, tuple(g.qubits)) for g in u1.gates))
        elif isinstance(u1, FunctionU1Model):
            recipe = FunctionRecipe(u1.name)
        else:
            recipe = ProductRecipe([_explicit_unitary(u) for u in u1.unitaries])
    except ValueError as exc:
        raise CircuitParseError(str(exc), "u1") from exc

    u2_model = model.u2
    try:
        if isinstance(u2_model, QftU2Model):
            block = QftBlock(tuple(u2_model.targets), u2_model.inverse)
        else:
            block = ProductBlock([_explicit_unitary(u) for u in u2_model.unitaries])
    except ValueError as exc:
        raise CircuitParseError(str(exc), "u2") from exc

    try:
        return CircuitSpec(model.n, input_value, recipe, block, tuple(model.measure))
    except ValueError as exc:
        raise CircuitParseError(str(exc), "circuit") from exc


def _format_validation_error(exc: ValidationError) -> CircuitParseError:
    err = exc.errors()[0]
    field = ".".join(str(p) for p in err["loc"]) or "circuit"
    return CircuitParseError(err["msg"], field)


def parse_circuit(source: "str | bytes | dict") -> CircuitSpec:
    """Parse a JSON document (text or dict) into a circuit description."""
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise CircuitParseError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    else:
        data = source
    try:
        model = CircuitModel.model_validate(data)
    except ValidationError as exc:
        raise _format_validation_error(exc) from exc
    return to_spec(model)


def circuit_echo(model: CircuitModel) -> dict:
    """A JSON-safe echo of the circuit for inclusion in reports."""
    return model.model_dump(mode="json")
