"""Formula text round trips and parse errors."""

from fractions import Fraction

import pytest

from prefcon import (
    Attribute,
    FormulaParseError,
    Schema,
    equivalent,
    parse_formula,
    to_source,
)
from prefcon.errors import FormulaTypeError
from prefcon.formula.core import cterm

SCHEMA = Schema([Attribute("price", "Q"), Attribute("make", "C")])


def p(text):
    return parse_formula(SCHEMA, text)


def test_two_var_comparison():
    g = p("L.price < R.price")
    assert g.variables() == frozenset({"L", "R"})
    assert not g.is_false


def test_precedence_not_and_or():
    # not binds tightest, then and, then or
    g = p("not L.price = 1 and L.price < 5 or L.price > 9")
    h = p("((not (L.price = 1)) and L.price < 5) or (L.price > 9)")
    assert g == h


def test_parentheses():
    g = p("L.price > 0 and (L.price < 2 or L.price > 8)")
    h = p("(L.price > 0 and L.price < 2) or (L.price > 0 and L.price > 8)")
    assert equivalent(g, h)


def test_fraction_literals():
    g = p("L.price = 1/3")
    assert cterm(Fraction(1, 3)) in {a.rhs for d in g.disjuncts for a in d}
    assert p("L.price = 0.5") == p("L.price = 1/2")


def test_quoted_strings():
    g = p("L.make = 'BMW' or L.make = \"VW\"")
    consts = g.constants()["make"]
    assert consts == {"BMW", "VW"}


def test_le_ge_normalize_away():
    # <= and >= exist only in the surface syntax
    g = p("L.price <= 3")
    assert equivalent(g, p("L.price < 3 or L.price = 3"))
    ops = {a.op for d in g.disjuncts for a in d}
    assert ops <= {"=", "!=", "<", ">"}


def test_round_trip_through_source():
    texts = [
        "L.price < R.price",
        "L.make = R.make and L.price > 12000",
        "L.price = 0 and (R.price > 0 and R.price <= 3)",
        "not (L.make = 'Kia') or L.price != 7",
    ]
    for text in texts:
        g = p(text)
        assert p(to_source(g)) == g


def test_to_source_deterministic():
    g1 = p("L.price > 1 and L.make = 'a'")
    g2 = p("L.make = 'a' and L.price > 1")
    assert to_source(g1) == to_source(g2)


def test_false_and_true_render():
    assert p("L.price < 1 and L.price > 2").is_false
    assert p(to_source(p("L.price < 1 and L.price > 2"))).is_false


class TestErrors:
    def test_unknown_attribute(self):
        with pytest.raises((FormulaParseError, FormulaTypeError)):
            p("L.colour = 'red'")

    def test_constant_on_left_rejected(self):
        # comparisons are written reference-first by design
        with pytest.raises(FormulaParseError):
            p("12000 < R.price")

    def test_order_on_c_attribute_rejected(self):
        with pytest.raises((FormulaParseError, FormulaTypeError)):
            p("L.make < R.make")

    def test_string_on_q_attribute_rejected(self):
        with pytest.raises((FormulaParseError, FormulaTypeError)):
            p("L.price = 'cheap'")

    def test_position_reported(self):
        with pytest.raises(FormulaParseError) as err:
            p("L.price < ")
        assert err.value.details.get("position") is not None

    def test_unbalanced_paren(self):
        with pytest.raises(FormulaParseError):
            p("(L.price < 1")

    def test_garbage_token(self):
        with pytest.raises(FormulaParseError):
            p("L.price ~ 3")

    def test_unknown_variable(self):
        with pytest.raises(FormulaParseError):
            p("X.price = 1")
