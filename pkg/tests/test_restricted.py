"""Statement-driven revision and contraction steps."""

import pytest
from conftest import total_order

from prefcon import (
    FAILURE,
    FiniteRelation,
    MixedSignSet,
    ValidationError,
    meet_contr,
    restricted_change,
    spo_check,
    transitive_closure,
)
from prefcon.contract.restricted import CONTRACT, REVISE


def rel(*pairs):
    return FiniteRelation(tuple(p.split()) for p in pairs)


class TestPositiveRevision:
    def test_adds_and_closes(self):
        model = transitive_closure(rel("a b", "b c"))
        out = restricted_change(model, [("+", ("c", "d"))])
        assert out == model | rel("c d", "a d", "b d")
        assert spo_check(out).ok

    def test_already_held_is_identity(self):
        model = transitive_closure(rel("a b", "b c"))
        assert restricted_change(model, [("+", ("a", "c"))]) == model

    def test_cycle_fails(self):
        model = rel("a b")
        assert restricted_change(model, [("+", ("b", "a"))]) is FAILURE
        assert not FAILURE

    def test_indirect_cycle_fails(self):
        model = transitive_closure(rel("a b", "b c"))
        assert restricted_change(model, [("+", ("c", "a"))]) is FAILURE


class TestNegativeRevision:
    def test_cuts_with_every_minimal_repair(self, x5):
        denied = rel("x1 x3", "x2 x3", "x2 x5")
        out = restricted_change(x5, [("-", e) for e in denied.edges])
        assert out == x5 - meet_contr(x5, denied).contractor
        assert len(out & denied) == 0
        assert spo_check(out).ok

    def test_vacuous_when_not_held(self, x4):
        out = restricted_change(x4, [("-", ("x4", "x1"))])
        assert out == x4

    def test_partially_held(self, x4):
        # only the held part of the denial drives the cut
        out = restricted_change(x4, [("-", ("x1", "x4")), ("-", ("x4", "x1"))])
        assert out == x4 - meet_contr(x4, rel("x1 x4")).contractor


class TestContractOp:
    def test_contract_negates_then_revises(self, x4):
        stmts = [("+", ("x1", "x4"))]
        flipped = [("-", ("x1", "x4"))]
        assert restricted_change(x4, stmts, op=CONTRACT) == restricted_change(
            x4, flipped, op=REVISE
        )

    def test_contract_of_negative_asserts(self):
        model = rel("a b")
        out = restricted_change(model, [("-", ("b", "c"))], op=CONTRACT)
        assert out == transitive_closure(rel("a b", "b c"))

    def test_contract_failure_on_cycle(self):
        model = rel("a b")
        assert restricted_change(model, [("-", ("b", "a"))], op=CONTRACT) is FAILURE


class TestValidation:
    def test_empty_statset_is_identity(self, x4):
        assert restricted_change(x4, []) == x4

    def test_mixed_signs_rejected(self, x4):
        with pytest.raises(MixedSignSet):
            restricted_change(x4, [("+", ("x1", "x2")), ("-", ("x2", "x3"))])

    def test_bad_sign_rejected(self, x4):
        with pytest.raises(ValidationError):
            restricted_change(x4, [("*", ("x1", "x2"))])

    def test_bad_op_rejected(self, x4):
        with pytest.raises(ValidationError):
            restricted_change(x4, [("+", ("x1", "x2"))], op="MERGE")

    def test_model_must_be_spo(self):
        with pytest.raises(ValidationError):
            restricted_change(rel("a b", "b a"), [("+", ("a", "c"))])
