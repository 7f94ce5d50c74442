"""Tuple schemas: named attributes over Q (rationals) or C (uninterpreted constants).

Q values are exact ``fractions.Fraction``; C values are plain strings drawn
from an infinite domain (two C values are comparable only by equality).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Union

from ..errors import FormulaTypeError, ValidationError

Value = Union[Fraction, str]


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: str  # "Q" | "C"

    def __post_init__(self):
        if self.domain not in ("Q", "C"):
            raise ValidationError(f"attribute {self.name}: domain must be Q or C")


class Schema:
    """Ordered attribute list with name lookup."""

    def __init__(self, attributes):
        attrs = []
        seen = set()
        for a in attributes:
            if not isinstance(a, Attribute):
                a = Attribute(str(a[0]), str(a[1]))
            if a.name in seen:
                raise ValidationError(f"duplicate attribute {a.name}")
            seen.add(a.name)
            attrs.append(a)
        self.attributes = tuple(attrs)
        self._by_name = {a.name: a for a in attrs}

    def domain(self, name: str) -> str:
        try:
            return self._by_name[name].domain
        except KeyError:
            raise FormulaTypeError(f"unknown attribute {name!r}") from None

    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __eq__(self, other):
        if isinstance(other, Schema):
            return self.attributes == other.attributes
        return NotImplemented

    def __hash__(self):
        return hash(self.attributes)

    def __repr__(self):
        inner = ", ".join(f"{a.name}:{a.domain}" for a in self.attributes)
        return f"Schema({inner})"

    def to_json(self) -> dict:
        return {"attributes": [{"name": a.name, "domain": a.domain} for a in self.attributes]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Schema":
        if "attributes" not in doc:
            raise ValidationError("schema JSON needs an 'attributes' array")
        return cls(Attribute(str(a["name"]), str(a["domain"])) for a in doc["attributes"])

    @classmethod
    def load(cls, path: str | Path) -> "Schema":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def coerce(self, name: str, raw) -> Value:
        """Parse one attribute value from text or a number."""
        dom = self.domain(name)
        if dom == "Q":
            if isinstance(raw, Fraction):
                return raw
            if isinstance(raw, int):
                return Fraction(raw)
            if isinstance(raw, float):
                raise FormulaTypeError(f"{name}: floats are not exact; pass text or Fraction")
            try:
                return Fraction(str(raw))
            except (ValueError, ZeroDivisionError) as exc:
                raise FormulaTypeError(f"{name}: bad rational {raw!r}") from exc
        if not isinstance(raw, str):
            raise FormulaTypeError(f"{name}: C attribute needs a string, got {raw!r}")
        return raw

    def coerce_tuple(self, values: Mapping) -> dict:
        out = {}
        for a in self.attributes:
            if a.name not in values:
                raise ValidationError(f"missing attribute {a.name}")
            out[a.name] = self.coerce(a.name, values[a.name])
        extra = set(values) - set(self.names())
        if extra:
            raise ValidationError(f"unknown attributes {sorted(extra)}")
        return out


def value_to_text(v: Value) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return v
