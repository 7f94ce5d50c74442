"""Concrete syntax for preference formulas.

    L.price < R.price and L.make = "BMW" or not (L.year <= 2007)

Tuple variables are ``L`` and ``R``; an atom compares ``Var.attr`` against a
literal or another reference to the same attribute. ``and`` binds tighter
than ``or``; ``not`` is a prefix operator. Rational literals accept integer,
decimal and ``p/q`` forms with an optional sign; string literals use single
or double quotes with backslash escapes. ``true`` and ``false`` are
constants.

``to_source`` prints the canonical DNF deterministically; parsing the output
reproduces the formula exactly, though not necessarily the original text.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from ..errors import FormulaParseError, FormulaTypeError
from .core import (
    DnfFormula,
    atom_formula,
    conj,
    cterm,
    disj,
    false_formula,
    negate,
    true_formula,
    vterm,
    _atom_key,
)
from .schema import Schema


class _Token(NamedTuple):
    kind: str  # ident | number | string | op | eof
    value: object
    pos: int


_OPS = ("!=", "<=", ">=", "=", "<", ">", "(", ")", ".")


def _tokenize(text: str) -> list[_Token]:
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] in "./" and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            out.append(_Token("number", Fraction(text[i:j]), i))
            i = j
            continue
        if ch in ("'", '"'):
            j = i + 1
            buf = []
            while j < n and text[j] != ch:
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise FormulaParseError("unterminated string literal", i)
            out.append(_Token("string", "".join(buf), i))
            i = j + 1
            continue
        for op in _OPS:
            if text.startswith(op, i):
                out.append(_Token("op", op, i))
                i += len(op)
                break
        else:
            raise FormulaParseError(f"unexpected character {ch!r}", i)
    out.append(_Token("eof", None, n))
    return out


class _Parser:
    def __init__(self, schema: Schema, tokens: list[_Token]):
        self.schema = schema
        self.toks = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str) -> _Token:
        t = self.next()
        if t.kind != "op" or t.value != op:
            raise FormulaParseError(f"expected {op!r}", t.pos)
        return t

    def parse(self) -> DnfFormula:
        f = self.or_expr()
        t = self.peek()
        if t.kind != "eof":
            raise FormulaParseError("trailing input after formula", t.pos)
        return f

    def or_expr(self) -> DnfFormula:
        f = self.and_expr()
        while self.peek().kind == "ident" and self.peek().value == "or":
            self.next()
            f = disj(f, self.and_expr())
        return f

    def and_expr(self) -> DnfFormula:
        f = self.not_expr()
        while self.peek().kind == "ident" and self.peek().value == "and":
            self.next()
            f = conj(f, self.not_expr())
        return f

    def not_expr(self) -> DnfFormula:
        t = self.peek()
        if t.kind == "ident" and t.value == "not":
            self.next()
            return negate(self.not_expr())
        return self.primary()

    def primary(self) -> DnfFormula:
        t = self.peek()
        if t.kind == "op" and t.value == "(":
            self.next()
            f = self.or_expr()
            self.expect_op(")")
            return f
        if t.kind == "ident" and t.value == "true":
            self.next()
            return true_formula(self.schema)
        if t.kind == "ident" and t.value == "false":
            self.next()
            return false_formula(self.schema)
        return self.comparison()

    def comparison(self) -> DnfFormula:
        var, attr, pos = self.ref()
        t = self.next()
        if t.kind != "op" or t.value not in ("=", "!=", "<", ">", "<=", ">="):
            raise FormulaParseError("expected a comparison operator", t.pos)
        op = t.value
        rhs_tok = self.peek()
        if rhs_tok.kind == "number":
            self.next()
            rhs = cterm(rhs_tok.value)
        elif rhs_tok.kind == "string":
            self.next()
            rhs = cterm(rhs_tok.value)
        else:
            rvar, rattr, rpos = self.ref()
            if rattr != attr:
                raise FormulaParseError(
                    f"comparison mixes attributes {attr!r} and {rattr!r}", rpos
                )
            rhs = vterm(rvar)
        try:
            return atom_formula(self.schema, attr, op, vterm(var), rhs)
        except FormulaTypeError as exc:
            raise FormulaParseError(str(exc), pos) from exc

    def ref(self):
        t = self.next()
        if t.kind != "ident":
            raise FormulaParseError("expected a tuple reference like L.attr", t.pos)
        if t.value not in ("L", "R"):
            raise FormulaParseError(
                f"tuple variable must be L or R, got {t.value!r}", t.pos
            )
        self.expect_op(".")
        a = self.next()
        if a.kind != "ident":
            raise FormulaParseError("expected an attribute name", a.pos)
        if a.value not in self.schema:
            raise FormulaParseError(f"unknown attribute {a.value!r}", a.pos)
        return t.value, a.value, t.pos


def parse_formula(schema: Schema, text: str) -> DnfFormula:
    return _Parser(schema, _tokenize(text)).parse()


def _render_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)  # "7" or "3/2"
    escaped = str(v).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _render_term(t, attr: str) -> str:
    if t[0] == "v":
        return f"{t[1]}.{attr}"
    return _render_value(t[1])


def to_source(f: DnfFormula) -> str:
    """Deterministic text form of the canonical DNF."""
    if f.is_false:
        return "false"
    if f.is_true:
        return "true"
    parts = []
    for d in f.disjuncts:
        atoms = sorted(d, key=_atom_key)
        rendered = [
            f"{_render_term(a.lhs, a.attr)} {a.op} {_render_term(a.rhs, a.attr)}"
            for a in atoms
        ]
        parts.append(" and ".join(rendered))
    return " or ".join(parts)
