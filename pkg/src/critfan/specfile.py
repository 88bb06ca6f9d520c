"""Analysis spec files (JSON or TOML) and their schema."""
from __future__ import annotations

import json
import re
import sys
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .exactgeom import linalg as la
from .repspec import Adjoint, DirectWeights, Dual, Mult, RepExpr, Std, Sum
from .rootdata import GroupSpec

Rational = Union[StrictInt, str]


class SpecError(ValueError):
    """Spec file could not be read or validated; message names the failing field."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FactorModel(_Strict):
    family: Literal["GL", "SO_odd", "SO_even", "Sp", "Torus"]
    rank: StrictInt


class WeightItem(_Strict):
    coeffs: list[Rational]
    mult: StrictInt = 1

    @field_validator("coeffs")
    @classmethod
    def _rational(cls, v):
        for x in v:
            _parse_rational(x)
        return v


class StdNode(_Strict):
    kind: Literal["std"]
    factor: StrictInt = 0


class AdjointNode(_Strict):
    kind: Literal["adjoint"]
    factor: StrictInt = 0


class DualNode(_Strict):
    kind: Literal["dual"]
    of: "RepNode"


class SumNode(_Strict):
    kind: Literal["sum"]
    of: list["RepNode"] = Field(min_length=1)


class MultNode(_Strict):
    kind: Literal["mult"]
    of: "RepNode"
    n: StrictInt = Field(ge=1)


class WeightsNode(_Strict):
    kind: Literal["weights"]
    weights: list[WeightItem] = Field(min_length=1)


RepNode = Annotated[
    Union[StdNode, AdjointNode, DualNode, SumNode, MultNode, WeightsNode],
    Field(discriminator="kind"),
]
for _m in (DualNode, SumNode, MultNode):
    _m.model_rebuild()


class GridModel(_Strict):
    t_min: float = Field(default=1e-3, gt=0)
    t_max: float = Field(default=1e-1, gt=0)
    points: StrictInt = Field(default=9, ge=2)


class OptionsModel(_Strict):
    refine: bool = False
    derivative_of: Optional[list[Rational]] = None
    simulate: bool = False
    grid: GridModel = GridModel()


class AnalysisSpecFile(_Strict):
    group: list[FactorModel] = Field(min_length=1)
    representation: Union[RepNode, str]
    shift: Union[Literal["none", "haar"], list[Rational]] = "none"
    options: OptionsModel = OptionsModel()

    @field_validator("shift", mode="before")
    @classmethod
    def _shift(cls, v):
        if isinstance(v, list):
            for x in v:
                _parse_rational(x)
        return v


def _parse_rational(x):
    if isinstance(x, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(x, int):
        return x
    if isinstance(x, str) and re.fullmatch(r"\s*[-+]?\d+(\s*/\s*\d+)?\s*", x):
        return la.as_fraction(x.replace(" ", ""))
    raise ValueError(f"{x!r} is not an integer or 'p/q' rational")


# compact string syntax:  mult(std, 7), sum(adjoint, std), dual(std:1), weights([1,0],[0,1]*2)
_TOKEN = re.compile(r"\s*(\w+(?::\d+)?|\(|\)|,|\[[^\]]*\](?:\*\d+)?)")


def parse_rep_string(text: str) -> RepExpr:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecError(f"representation: cannot parse near {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    expr, rest = _parse_expr(tokens)
    if rest:
        raise SpecError(f"representation: trailing input {''.join(rest)!r}")
    return expr


def _parse_expr(tokens):
    if not tokens:
        raise SpecError("representation: unexpected end of expression")
    head, rest = tokens[0], tokens[1:]
    name, _, idx = head.partition(":")
    factor = int(idx) if idx else 0
    if name in ("std", "adjoint") and not (rest and rest[0] == "("):
        return (Std(factor) if name == "std" else Adjoint(factor)), rest
    if not rest or rest[0] != "(":
        raise SpecError(f"representation: expected '(' after {head!r}")
    rest = rest[1:]
    args = []
    while True:
        if rest and rest[0] == ")":
            rest = rest[1:]
            break
        if name == "weights" or (name == "mult" and args):
            tok = rest[0] if rest else ""
            args.append(tok)
            rest = rest[1:]
        else:
            sub, rest = _parse_expr(rest)
            args.append(sub)
        if rest and rest[0] == ",":
            rest = rest[1:]
    if name == "dual" and len(args) == 1:
        return Dual(args[0]), rest
    if name == "sum" and args:
        return Sum(*args), rest
    if name == "mult" and len(args) == 2 and args[1].isdigit() and int(args[1]) >= 1:
        return Mult(args[0], int(args[1])), rest
    if name == "weights" and args:
        entries = []
        for a in args:
            vec, _, mult = a.partition("*")
            coeffs = [_parse_rational(x.strip()) for x in vec.strip("[]").split(",") if x.strip()]
            entries.append((coeffs, int(mult) if mult else 1))
        return DirectWeights(entries), rest
    raise SpecError(f"representation: bad arguments for {name!r}")


def to_rep_expr(node) -> RepExpr:
    if isinstance(node, str):
        return parse_rep_string(node)
    if isinstance(node, StdNode):
        return Std(node.factor)
    if isinstance(node, AdjointNode):
        return Adjoint(node.factor)
    if isinstance(node, DualNode):
        return Dual(to_rep_expr(node.of))
    if isinstance(node, SumNode):
        return Sum(*[to_rep_expr(c) for c in node.of])
    if isinstance(node, MultNode):
        return Mult(to_rep_expr(node.of), node.n)
    if isinstance(node, WeightsNode):
        return DirectWeights([([_parse_rational(x) for x in w.coeffs], w.mult) for w in node.weights])
    raise SpecError(f"representation: unknown node {node!r}")


def to_group(spec: AnalysisSpecFile) -> GroupSpec:
    return GroupSpec(tuple((f.family, f.rank) for f in spec.group))


def shift_mode(spec: AnalysisSpecFile):
    if isinstance(spec.shift, str):
        return spec.shift
    return [_parse_rational(x) for x in spec.shift]


def _fmt_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_spec(data: dict) -> AnalysisSpecFile:
    if isinstance(data, dict) and "rep" in data and "representation" not in data:
        data = {("representation" if k == "rep" else k): v for k, v in data.items()}
    try:
        return AnalysisSpecFile.model_validate(data)
    except ValidationError as err:
        raise SpecError(_fmt_error(err)) from None


def load_spec(path: str | Path) -> tuple[AnalysisSpecFile, bytes]:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise SpecError(f"cannot read {p}: {e.strerror}") from None
    try:
        if p.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as e:
        raise SpecError(f"{p}: not valid {'TOML' if p.suffix.lower() == '.toml' else 'JSON'}: {e}") from None
    return parse_spec(data), raw
