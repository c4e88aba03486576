"""Wire documents: strict tree-structured JSON with rational-string leaves.

Every numeric leaf is an exact rational written "p" or "p/q" (lowest terms,
positive denominator on output); floating point never appears on the wire.
Documents carry a truncation order; shorter coefficient lists mean trailing
zeros.  Base points are carried as metadata and relabelled to 0 for the
engine, which computes in the shifted chart.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .jets import Jet, MatrixJet
from .operator import DiffOperator, LinearSystem

RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")

CoeffList = list[str]
MatrixOfCoeffs = list[list[CoeffList]]


class DocumentError(ValueError):
    """Malformed document content that pydantic's shape checks cannot express."""


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str) or not RATIONAL_PATTERN.match(text):
        raise DocumentError(
            f"not an exact rational string (expected 'p' or 'p/q'): {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    return str(value)


def _parse_coeffs(values: Sequence[str], truncation: int) -> Jet:
    if len(values) > truncation + 1:
        raise DocumentError(
            f"{len(values)} coefficients exceed truncation order {truncation}")
    coeffs = [parse_rational(v) for v in values]
    coeffs += [Fraction(0)] * (truncation + 1 - len(coeffs))
    return Jet(tuple(coeffs))


def _parse_matrix(entries: MatrixOfCoeffs, dim: int, truncation: int,
                  label: str) -> MatrixJet:
    if len(entries) != dim or any(len(row) != dim for row in entries):
        raise DocumentError(f"{label} must be a {dim}x{dim} matrix of coefficient lists")
    return MatrixJet.from_rows(
        [[_parse_coeffs(cell, truncation) for cell in row] for row in entries])


def _emit_matrix(M: MatrixJet, order: int | None = None) -> MatrixOfCoeffs:
    width = (M.order if order is None else order) + 1
    return [[[format_rational(c) for c in e.coeffs[:width]] for e in row]
            for row in M.entries]


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SystemDocument(_StrictModel):
    """Serialized monic system y^(n) + B_1 y^(n-1) + ... + B_n y = 0."""

    kind: Literal["system"] = "system"
    order: int = Field(ge=1)
    dim: int = Field(ge=1)
    truncation: int = Field(ge=0)
    base_point: str = "0"
    coefficients: list[MatrixOfCoeffs]

    @field_validator("base_point")
    @classmethod
    def _base_rational(cls, v: str) -> str:
        parse_rational(v)
        return v

    @model_validator(mode="after")
    def _shapes(self) -> "SystemDocument":
        if len(self.coefficients) != self.order:
            raise DocumentError(
                f"expected {self.order} coefficient matrices, got {len(self.coefficients)}")
        for k, mat in enumerate(self.coefficients, start=1):
            _parse_matrix(mat, self.dim, self.truncation, f"coefficients[{k}]")
        return self

    def to_system(self) -> LinearSystem:
        return LinearSystem(tuple(
            _parse_matrix(mat, self.dim, self.truncation, f"coefficients[{k}]")
            for k, mat in enumerate(self.coefficients, start=1)))

    @classmethod
    def from_system(cls, sys: LinearSystem, base_point: str = "0") -> "SystemDocument":
        truncation = sys.min_order()
        return cls(
            order=sys.order,
            dim=sys.dim,
            truncation=truncation,
            base_point=base_point,
            coefficients=[_emit_matrix(M, truncation) for M in sys.B],
        )

    def truncated(self, order: int) -> "SystemDocument":
        """Truncation override: clip coefficient lists to the new order."""
        return self.model_copy(update={
            "truncation": order,
            "coefficients": [
                [[cell[: order + 1] for cell in row] for row in mat]
                for mat in self.coefficients
            ],
        })


class OperatorDocument(_StrictModel):
    """Serialized first-order operator R d/dx + S."""

    kind: Literal["operator"] = "operator"
    dim: int = Field(ge=1)
    truncation: int = Field(ge=0)
    base_point: str = "0"
    r_matrix: MatrixOfCoeffs
    s_matrix: MatrixOfCoeffs

    @field_validator("base_point")
    @classmethod
    def _base_rational(cls, v: str) -> str:
        parse_rational(v)
        return v

    @model_validator(mode="after")
    def _shapes(self) -> "OperatorDocument":
        _parse_matrix(self.r_matrix, self.dim, self.truncation, "r_matrix")
        _parse_matrix(self.s_matrix, self.dim, self.truncation, "s_matrix")
        return self

    def to_operator(self) -> DiffOperator:
        return DiffOperator(
            _parse_matrix(self.r_matrix, self.dim, self.truncation, "r_matrix"),
            _parse_matrix(self.s_matrix, self.dim, self.truncation, "s_matrix"),
        )

    def truncated(self, order: int) -> "OperatorDocument":
        clip = lambda mat: [[cell[: order + 1] for cell in row] for row in mat]
        return self.model_copy(update={
            "truncation": order,
            "r_matrix": clip(self.r_matrix),
            "s_matrix": clip(self.s_matrix),
        })


class TransformDocument(_StrictModel):
    """Serialized point transformation x = f(z), y = T(z) w.

    Either the full mixing matrix T is given, or the normal-form shorthand:
    a constant mixing C together with the system order n, standing for
    T = f'(z)^((n-1)/2) C.
    """

    kind: Literal["transform"] = "transform"
    base_point: str = "0"
    truncation: int | None = Field(default=None, ge=0)
    variable_map: CoeffList
    mixing: MatrixOfCoeffs | None = None
    constant_mixing: list[list[str]] | None = None
    order: int | None = Field(default=None, ge=1)

    @field_validator("base_point")
    @classmethod
    def _base_rational(cls, v: str) -> str:
        parse_rational(v)
        return v

    @model_validator(mode="after")
    def _one_mixing(self) -> "TransformDocument":
        if (self.mixing is None) == (self.constant_mixing is None):
            raise DocumentError("give exactly one of mixing / constant_mixing")
        if self.constant_mixing is not None and self.order is None:
            raise DocumentError("constant_mixing needs the system order")
        for v in self.variable_map:
            parse_rational(v)
        if self.constant_mixing is not None:
            m = len(self.constant_mixing)
            if m == 0 or any(len(row) != m for row in self.constant_mixing):
                raise DocumentError("constant_mixing must be a square matrix")
            for row in self.constant_mixing:
                for v in row:
                    parse_rational(v)
        if self.mixing is not None:
            m = len(self.mixing)
            if m == 0 or any(len(row) != m for row in self.mixing):
                raise DocumentError("mixing must be a square matrix")
            for row in self.mixing:
                for cell in row:
                    for v in cell:
                        parse_rational(v)
        return self

    @property
    def dim(self) -> int:
        rows = self.mixing if self.mixing is not None else self.constant_mixing
        assert rows is not None
        return len(rows)

    def to_transformation(self, truncation: int):
        from .transform import PointTransformation

        N = self.truncation if self.truncation is not None else truncation
        f = _parse_coeffs(self.variable_map, N)
        if self.mixing is not None:
            T = _parse_matrix(self.mixing, self.dim, N, "mixing")
            return PointTransformation(f, T)
        assert self.constant_mixing is not None and self.order is not None
        C = [[parse_rational(v) for v in row] for row in self.constant_mixing]
        return PointTransformation.normal_form_shape(f, C, self.order)

    def truncated(self, order: int) -> "TransformDocument":
        update: dict = {
            "truncation": order,
            "variable_map": self.variable_map[: order + 1],
        }
        if self.mixing is not None:
            update["mixing"] = [[cell[: order + 1] for cell in row]
                                for row in self.mixing]
        return self.model_copy(update=update)


class GenerateRequest(_StrictModel):
    """Build the isotropic iterative system from source data q or r."""

    kind: Literal["generate"] = "generate"
    order: int = Field(ge=2)
    dim: int = Field(ge=1)
    truncation: int = Field(default=16, ge=2)
    base_point: str = "0"
    source_q: CoeffList | None = None
    source_r: CoeffList | None = None

    @field_validator("base_point")
    @classmethod
    def _base_rational(cls, v: str) -> str:
        parse_rational(v)
        return v

    @model_validator(mode="after")
    def _one_source(self) -> "GenerateRequest":
        if (self.source_q is None) == (self.source_r is None):
            raise DocumentError("give exactly one of source_q / source_r")
        for v in (self.source_q or self.source_r or []):
            parse_rational(v)
        return self

    def truncated(self, order: int) -> "GenerateRequest":
        update: dict = {"truncation": order}
        if self.source_q is not None:
            update["source_q"] = self.source_q[: order + 1]
        if self.source_r is not None:
            update["source_r"] = self.source_r[: order + 1]
        return self.model_copy(update=update)


class IterateRequest(_StrictModel):
    kind: Literal["iterate"] = "iterate"
    operator: OperatorDocument
    times: int = Field(ge=1)

    def truncated(self, order: int) -> "IterateRequest":
        return self.model_copy(update={"operator": self.operator.truncated(order)})


class TransformRequest(_StrictModel):
    kind: Literal["transform-request"] = "transform-request"
    system: SystemDocument
    transform: TransformDocument


class SolveRequest(_StrictModel):
    kind: Literal["solve"] = "solve"
    system: SystemDocument
    numeric_check: bool = False
    numeric_steps: int = Field(default=1000, ge=1)
    numeric_end: str = "1/2"

    @field_validator("numeric_end")
    @classmethod
    def _end_rational(cls, v: str) -> str:
        parse_rational(v)
        return v


class MatrixBlock(_StrictModel):
    """A matrix of jets with its effective truncation order."""

    effective_order: int
    entries: MatrixOfCoeffs

    @classmethod
    def from_matrix(cls, M: MatrixJet) -> "MatrixBlock":
        return cls(effective_order=M.order, entries=_emit_matrix(M))


class LinearFormReport(_StrictModel):
    """Iteration output: matrices[j] multiplies y^(n-j), j = 0..n."""

    order: int
    dim: int
    base_point: str
    matrices: list[MatrixBlock]


class NormalizeResponse(_StrictModel):
    gauge: MatrixBlock
    normal_form: SystemDocument


class WitnessReport(_StrictModel):
    coefficient_index: int
    row: int
    col: int
    witness_kind: str
    detail: str


class VerdictReport(_StrictModel):
    is_canonical_class: bool
    order_checked: int
    extracted_q: CoeffList | None = None
    gauge: MatrixBlock | None = None
    witness: WitnessReport | None = None


class SolveResponse(_StrictModel):
    order: int
    dim: int
    extracted_q: CoeffList
    gauge: MatrixBlock
    source_u: CoeffList
    source_v: CoeffList
    basis: list[CoeffList]
    residual_is_zero: bool
    residual_order: int
    transported_residual_is_zero: bool
    single_formula_spans_match: bool
    numeric_defect: float | None = None


def emit_jet(j: Jet) -> CoeffList:
    return [format_rational(c) for c in j.coeffs]


def canonical_json(model: BaseModel) -> str:
    """Deterministic JSON: sorted keys, fixed layout, trailing newline."""
    return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
