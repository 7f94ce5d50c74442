"""Revision and contraction of a finite preference state by statements.

A statement is a signed edge: ``("+", (a, b))`` claims a is preferred to
b, ``("-", (a, b))`` denies it. A change step takes a set of statements of
one sign only. Revising by positive statements closes the union and fails
on a cycle; revising by negative ones cuts the named edges with the meet
contractor, so the result is exactly what every minimal cut agrees on.
Contraction is revision by the sign-flipped set, which makes the two
operators interdefinable.

``FAILURE`` is an ordinary return value, not an exception: an inconsistent
positive revision has no preference state to return, and callers decide
what that means for them.
"""

from __future__ import annotations

from typing import Iterable, Tuple

from ..errors import MixedSignSet, ValidationError
from ..relation import Edge, FiniteRelation, require_spo, spo_check, transitive_closure
from .finite import meet_contr

REVISE = "REVISE"
CONTRACT = "CONTRACT"

POSITIVE = "+"
NEGATIVE = "-"

Statement = Tuple[str, Edge]


class _Failure:
    """Inconsistent revision marker; falsy and unique."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FAILURE"

    def __bool__(self) -> bool:
        return False


FAILURE = _Failure()


def _split(statements: Iterable[Statement]):
    edges = []
    signs = set()
    for sign, edge in statements:
        if sign not in (POSITIVE, NEGATIVE):
            raise ValidationError(f"statement sign must be '+' or '-', got {sign!r}")
        signs.add(sign)
        edges.append(edge)
    if len(signs) > 1:
        raise MixedSignSet("statements must be all-positive or all-negative")
    sign = signs.pop() if signs else None
    return sign, FiniteRelation(edges)


def restricted_change(
    model: FiniteRelation, statements: Iterable[Statement], op: str = REVISE
):
    """Apply one revision or contraction step to a preference state.

    Positive revision: transitively close model plus the asserted edges;
    FAILURE when that breaks the strict partial order. Negative revision:
    drop the meet contractor of the denied edges that are actually held.
    Contraction flips every sign and revises. An empty statement set
    changes nothing.
    """
    require_spo(model, "model")
    if op not in (REVISE, CONTRACT):
        raise ValidationError(f"op must be {REVISE} or {CONTRACT}, got {op!r}")
    sign, edges = _split(statements)
    if sign is None:
        return model
    if op == CONTRACT:
        sign = NEGATIVE if sign == POSITIVE else POSITIVE

    if sign == POSITIVE:
        closed = transitive_closure(model | edges)
        if not spo_check(closed).ok:
            return FAILURE
        return closed

    held = edges & model
    if not len(held):
        return model
    return meet_contr(model, held).contracted
