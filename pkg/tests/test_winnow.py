"""Winnow, datasets, and the post-contraction shortcuts."""

import random
from fractions import Fraction

import pytest
from conftest import total_order

from prefcon import (
    Dataset,
    DatasetError,
    DuplicateKey,
    FiniteRelation,
    SkylineSpecError,
    ValidationError,
    and_not,
    dump_dataset,
    load_dataset,
    meet_contr,
    min_contr_finite,
    parse_formula,
    skyline_relation,
    spo_check,
    winnow,
    winnow_after_contraction,
)
from test_oracle_properties import random_instance


def p_data(p_schema, values):
    return Dataset(p_schema, [(str(v), {"p": str(v)}) for v in values])


# ---------------------------------------------------------------------------
# datasets


class TestDataset:
    def test_row_order_preserved(self, p_schema):
        data = p_data(p_schema, [3, 1, 2])
        assert data.keys() == ("3", "1", "2")
        assert data.restrict({"2", "3"}).keys() == ("3", "2")

    def test_duplicate_key_rejected(self, p_schema):
        with pytest.raises(DuplicateKey) as err:
            Dataset(p_schema, [("a", {"p": "1"}), ("a", {"p": "2"})])
        assert err.value.details["key"] == "a"

    def test_row_lookup(self, car_schema, car_data):
        assert car_data.row("t3").values["make"] == "Kia"
        assert car_data.row("t4").values["price"] == Fraction(12000)
        assert "t4" in car_data and "t9" not in car_data


class TestLoadDump:
    def test_round_trip(self, tmp_path, car_schema, car_data):
        path = tmp_path / "cars.csv"
        dump_dataset(car_data, path)
        assert load_dataset(path, car_schema) == car_data

    def test_missing_header(self, tmp_path, p_schema):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DatasetError) as err:
            load_dataset(path, p_schema)
        assert err.value.details["row"] == 1

    def test_header_mismatch(self, tmp_path, car_schema):
        path = tmp_path / "bad.csv"
        path.write_text("id,make,price,year\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path, car_schema)
        assert err.value.details["row"] == 1

    def test_cell_count(self, tmp_path, p_schema):
        path = tmp_path / "bad.csv"
        path.write_text("id,p\na,1\nb\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path, p_schema)
        assert err.value.details["row"] == 3

    def test_empty_key(self, tmp_path, p_schema):
        path = tmp_path / "bad.csv"
        path.write_text("id,p\n,1\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path, p_schema)
        assert err.value.details["row"] == 2

    def test_duplicate_key(self, tmp_path, p_schema):
        path = tmp_path / "bad.csv"
        path.write_text("id,p\na,1\na,2\n")
        with pytest.raises(DuplicateKey) as err:
            load_dataset(path, p_schema)
        assert err.value.details["row"] == 3

    def test_bad_rational(self, tmp_path, p_schema):
        path = tmp_path / "bad.csv"
        path.write_text("id,p\na,1\nb,cheap\n")
        with pytest.raises(DatasetError) as err:
            load_dataset(path, p_schema)
        assert err.value.details["row"] == 3
        assert err.value.details["column"] == "p"

    def test_dump_with_mark(self, tmp_path, car_schema, car_data):
        path = tmp_path / "marked.csv"
        dump_dataset(car_data, path, mark={"t1", "t4"})
        lines = path.read_text().strip().splitlines()
        assert lines[0].endswith("winnow_rank")
        flags = {ln.split(",")[0]: ln.split(",")[-1] for ln in lines[1:]}
        assert flags == {"t1": "1", "t2": "0", "t3": "0", "t4": "1"}


# ---------------------------------------------------------------------------
# winnow proper


class TestWinnow:
    def test_car_preference(self, car_pref, car_data):
        assert winnow(car_pref, car_data).keys() == ("t4",)

    def test_car_preference_after_fix(self, car_schema, car_data):
        from conftest import CAR_PREF_FIXED

        fixed = parse_formula(car_schema, CAR_PREF_FIXED)
        assert winnow(fixed, car_data).keys() == ("t1", "t4")

    def test_single_attribute_chain(self, p_schema):
        data = p_data(p_schema, [1, 2, 3, 4])
        pref = parse_formula(p_schema, "L.p < R.p")
        assert winnow(pref, data).keys() == ("1",)

    def test_finite_source(self, p_schema):
        data = p_data(p_schema, [1, 2, 3])
        pref = total_order(["1", "2", "3"])
        assert winnow(pref, data).keys() == ("1",)

    def test_finite_source_must_be_spo(self, p_schema):
        data = p_data(p_schema, [1, 2])
        with pytest.raises(ValidationError):
            winnow(FiniteRelation([("1", "2"), ("2", "1")]), data)

    def test_keeps_input_order(self, p_schema):
        data = p_data(p_schema, [4, 2, 9, 1])
        pref = parse_formula(p_schema, "L.p > R.p")
        assert winnow(pref, data).keys() == ("9",)
        empty = winnow(parse_formula(p_schema, "L.p < 0 and R.p > 0"), data)
        assert empty.keys() == data.keys()

    def test_idempotent(self, car_pref, car_data):
        once = winnow(car_pref, car_data)
        assert winnow(car_pref, once) == once

    def test_contracted_answer_grows(self, p_schema):
        # a contraction can only ever surface more rows
        rng = random.Random(11)
        for _ in range(25):
            pref, con = random_instance(rng, max_nodes=6, max_pref=12)
            data = Dataset(
                p_schema, [(n, {"p": str(i)}) for i, n in enumerate(sorted(pref.nodes))]
            )
            contracted = pref - min_contr_finite(pref, con).contractor
            before = set(winnow(pref, data).keys())
            after = set(winnow(contracted, data).keys())
            assert before <= after


# ---------------------------------------------------------------------------
# post-contraction shortcuts


class TestAfterContraction:
    """A chain 1 < 2 < 3 < 4 on one rational attribute, discarding the
    dominance of 0-priced rows over 3-priced ones. Two different full
    contractors answer the same query with different amounts of work.
    """

    PREF = "L.p < R.p"
    CON = "L.p = 0 and R.p = 3"
    CUT_FROM_START = "L.p = 0 and R.p > 0 and R.p <= 3"
    CUT_INTO_END = "L.p >= 0 and L.p < 3 and R.p = 3"

    @pytest.fixture
    def rows(self, p_schema):
        return p_data(p_schema, [1, 2, 3, 4])

    def f(self, text, schema):
        return parse_formula(schema, text)

    def test_fast_path(self, p_schema, rows):
        result, strategy = winnow_after_contraction(
            self.f(self.PREF, p_schema),
            self.f(self.CUT_FROM_START, p_schema),
            self.f(self.CON, p_schema),
            rows,
        )
        assert result.keys() == ("1",)
        assert strategy.path == "fast"
        assert strategy.s_source == "S(CON)"
        assert strategy.s_hits == 0

    def test_incremental_path(self, p_schema, rows):
        result, strategy = winnow_after_contraction(
            self.f(self.PREF, p_schema),
            self.f(self.CUT_INTO_END, p_schema),
            self.f(self.CON, p_schema),
            rows,
            contractor_is_prefix=False,
        )
        assert result.keys() == ("1", "3")
        assert strategy.path == "incremental"
        assert strategy.s_source == "S(P-)"
        assert strategy.s_hits == 1
        # rescan pool is the old answer plus the rows ending a cut edge
        assert strategy.candidates == 2

    def test_incremental_agrees_with_rescan(self, p_schema, rows):
        pref = self.f(self.PREF, p_schema)
        cut = self.f(self.CUT_INTO_END, p_schema)
        result, _ = winnow_after_contraction(
            pref, cut, self.f(self.CON, p_schema), rows, contractor_is_prefix=False
        )
        assert result == winnow(and_not(pref, cut), rows)

    def test_cached_answer_reused(self, p_schema, rows):
        pref = self.f(self.PREF, p_schema)
        cut = self.f(self.CUT_FROM_START, p_schema)
        con = self.f(self.CON, p_schema)
        cached = winnow(pref, rows)
        result, strategy = winnow_after_contraction(pref, cut, con, rows, cached=cached)
        assert result is cached
        assert strategy.path == "fast"

    def test_finite_fast_path(self, p_schema):
        data = p_data(p_schema, [0, 1, 2, 3, 4])
        pref = total_order(["0", "1", "2", "3", "4"])
        con = FiniteRelation([("3", "4")])
        contractor = min_contr_finite(pref, con).contractor
        result, strategy = winnow_after_contraction(pref, contractor, con, data)
        assert result.keys() == ("0",)
        assert strategy.path == "fast"

    def test_finite_incremental_path(self, p_schema):
        data = p_data(p_schema, [0, 1, 2, 3, 4])
        pref = total_order(["0", "1", "2", "3", "4"])
        con = FiniteRelation([("0", "3")])
        contractor = min_contr_finite(pref, con).contractor
        assert contractor == FiniteRelation([("0", "1"), ("0", "2"), ("0", "3")])
        result, strategy = winnow_after_contraction(pref, contractor, con, data)
        assert result.keys() == ("0", "1")
        assert strategy.path == "incremental"
        assert strategy.s_source == "S(CON)"

    def test_mixed_representations_rejected(self, p_schema, rows):
        with pytest.raises(ValidationError):
            winnow_after_contraction(
                self.f(self.PREF, p_schema),
                FiniteRelation([("1", "2")]),
                self.f(self.CON, p_schema),
                rows,
            )

    def test_agrees_with_plain_winnow_on_random_instances(self, p_schema):
        rng = random.Random(4242)
        for _ in range(30):
            pref, con = random_instance(rng, max_nodes=7, max_pref=14)
            data = Dataset(
                p_schema, [(n, {"p": str(i)}) for i, n in enumerate(sorted(pref.nodes))]
            )
            for maker, is_prefix in (
                (min_contr_finite, True),
                (meet_contr, False),
            ):
                contractor = maker(pref, con).contractor
                expected = winnow(pref - contractor, data)
                result, strategy = winnow_after_contraction(
                    pref, contractor, con, data, contractor_is_prefix=is_prefix
                )
                assert result == expected
                assert strategy.s_source == ("S(CON)" if is_prefix else "S(P-)")


# ---------------------------------------------------------------------------
# skyline relations


class TestSkyline:
    def test_two_attributes(self, car_schema, car_data):
        rel = skyline_relation(car_data, {"price": "min", "year": "max"})
        assert ("t1", "t2") in rel  # same year, cheaper
        assert ("t4", "t3") in rel  # newer and cheaper
        assert ("t1", "t4") not in rel  # t4 cheaper, t1 newer: incomparable
        assert spo_check(rel).ok

    def test_single_min(self, p_schema):
        data = Dataset(p_schema, [("a", {"p": "2"}), ("b", {"p": "1"}), ("c", {"p": "2"})])
        rel = skyline_relation(data, {"p": "min"})
        assert rel == FiniteRelation([("b", "a"), ("b", "c")])

    def test_ignore_direction(self, car_schema, car_data):
        rel = skyline_relation(car_data, {"price": "min", "year": "ignore"})
        assert rel == skyline_relation(car_data, {"price": "min"})

    def test_matches_pairwise_definition(self, car_schema):
        rng = random.Random(3)
        rows = [
            (f"r{i}", {
                "make": rng.choice(["a", "b"]),
                "year": str(rng.randint(0, 3)),
                "price": str(rng.randint(0, 3)),
            })
            for i in range(5)
        ]
        data = Dataset(car_schema, rows)
        spec = {"year": "max", "price": "min"}
        rel = skyline_relation(data, spec)
        for a in data.rows:
            for b in data.rows:
                if a.key == b.key:
                    continue
                weak = a.values["year"] >= b.values["year"] and a.values["price"] <= b.values["price"]
                strict = a.values["year"] > b.values["year"] or a.values["price"] < b.values["price"]
                assert ((a.key, b.key) in rel) == (weak and strict)

    def test_always_spo(self, car_schema):
        rng = random.Random(8)
        for _ in range(20):
            rows = [
                (f"r{i}", {
                    "make": "m",
                    "year": str(rng.randint(0, 2)),
                    "price": str(rng.randint(0, 2)),
                })
                for i in range(6)
            ]
            rel = skyline_relation(Dataset(car_schema, rows), {"year": "min", "price": "min"})
            assert spo_check(rel).ok

    def test_rejects_order_on_categorical(self, car_schema, car_data):
        with pytest.raises(SkylineSpecError) as err:
            skyline_relation(car_data, {"make": "min"})
        assert err.value.details["attribute"] == "make"

    def test_rejects_unknown_attribute(self, car_schema, car_data):
        with pytest.raises(ValidationError):
            skyline_relation(car_data, {"mileage": "min"})

    def test_rejects_unknown_direction(self, car_schema, car_data):
        with pytest.raises(ValidationError):
            skyline_relation(car_data, {"price": "cheapest"})
