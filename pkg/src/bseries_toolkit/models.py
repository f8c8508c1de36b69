"""Wire formats: fraction strings, coefficient records, tableau files."""

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator

from .errors import FormatError

Coefficient = Fraction | float

ABSCISSA_TOL = 1e-12

_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def parse_fraction(text: str) -> Fraction:
    """Exact value of "p" or "p/q"."""
    match = _FRACTION_RE.match(text)
    if not match:
        raise FormatError(f"not a fraction string: {text!r}")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise FormatError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_fraction(value: Coefficient) -> str:
    """Reduced "p/q", or "p" for integers; floats print as repr."""
    if isinstance(value, float):
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_coefficient(value: Any) -> Coefficient:
    """Fraction for ints, Fractions and fraction strings; float for floats."""
    if isinstance(value, bool):
        raise FormatError(f"boolean is not a coefficient: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return parse_fraction(value)
    raise FormatError(f"cannot use {value!r} as a coefficient")


class CoefficientRecord(BaseModel):
    """One (tree, coefficient) pair; the empty tree encodes as ""."""

    tree: str = Field(description="Canonical bracket encoding, '' for the empty tree")
    coefficient: str | int | float = Field(description="Fraction string 'p/q' or 'p', or a float")

    def value(self) -> Coefficient:
        return to_coefficient(self.coefficient)


class TableauFile(BaseModel):
    """Runge-Kutta tableau file: stages, a (stages x stages), b (stages)."""

    stages: int = Field(ge=1, description="Number of stages")
    a: list[list[str | int | float]] = Field(description="Stage matrix, row by row")
    b: list[str | int | float] = Field(description="Weights")
    c: list[str | int | float] | None = Field(
        default=None, description="Abscissae; must match the row sums of a, which supply them when absent"
    )

    @model_validator(mode="after")
    def check_shapes(self) -> "TableauFile":
        if len(self.a) != self.stages or any(len(row) != self.stages for row in self.a):
            raise ValueError(f"a must be {self.stages}x{self.stages}")
        if len(self.b) != self.stages:
            raise ValueError(f"b must have {self.stages} entries")
        if self.c is not None:
            if len(self.c) != self.stages:
                raise ValueError(f"c must have {self.stages} entries")
            for i, (row, ci) in enumerate(zip(self.a, self.c)):
                row_sum = sum((to_coefficient(x) for x in row), Fraction(0))
                if abs(row_sum - to_coefficient(ci)) > ABSCISSA_TOL:
                    raise ValueError(f"c[{i}] = {ci} differs from the row sum {row_sum} of a")
        return self

    @property
    def is_exact(self) -> bool:
        entries = [x for row in self.a for x in row] + list(self.b)
        return not any(isinstance(x, float) for x in entries)


def load_document(path: Path | str) -> Any:
    """Parse a JSON or YAML file (by suffix)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise FormatError(f"cannot parse {path}: {e}") from e


def load_tableau_file(path: Path | str) -> TableauFile:
    try:
        return TableauFile.model_validate(load_document(path))
    except ValidationError as e:
        raise FormatError(f"invalid tableau file {path}: {e}") from e


def load_records(path: Path | str) -> list[CoefficientRecord]:
    data = load_document(path)
    if not isinstance(data, list):
        raise FormatError(f"{path}: expected a list of coefficient records")
    try:
        return [CoefficientRecord.model_validate(item) for item in data]
    except ValidationError as e:
        raise FormatError(f"invalid coefficient record in {path}: {e}") from e


def dump_document(data: Any, path: Path | str) -> None:
    """Write JSON or YAML (by suffix)."""
    path = Path(path)
    if path.suffix.lower() in (".yaml", ".yml"):
        text = yaml.safe_dump(data, sort_keys=False)
    else:
        text = json.dumps(data, indent=2) + "\n"
    try:
        path.write_text(text)
    except OSError as e:
        raise FormatError(f"cannot write {path}: {e}") from e
