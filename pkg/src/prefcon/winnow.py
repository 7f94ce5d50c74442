"""Dominance queries over finite datasets.

A dataset is an ordered list of keyed rows typed by a ``Schema``. The
winnow query keeps the rows that no other row dominates, under either
relation representation: a ``FiniteRelation`` over row keys, or a
``DnfFormula`` over the schema where ``f(L, R)`` reads "L beats R".

After a contraction the fresh winnow can often be had without a full
rescan: if no undominated row starts a discarded edge, the old answer
still stands; otherwise only rows that end a discarded edge can newly
surface, so the rescan runs over the old answer plus those rows.
``winnow_after_contraction`` picks between the two and reports which
shortcut fired.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

from .errors import (
    DatasetError,
    DuplicateKey,
    FormulaTypeError,
    SkylineSpecError,
    ValidationError,
)
from .formula import (
    DnfFormula,
    Schema,
    Value,
    and_not,
    eval_formula,
    eval_pair,
    project_side,
    value_to_text,
)
from .relation import FiniteRelation, boundary_sets, require_spo

PreferenceSource = Union[FiniteRelation, DnfFormula]

MIN = "min"
MAX = "max"
IGNORE = "ignore"


@dataclass(frozen=True)
class DatasetRow:
    key: str
    values: Mapping[str, Value]


class Dataset:
    """Ordered, keyed rows, each total over the schema.

    Row order is significant and preserved by every operation here so
    that diffs between query answers stay stable.
    """

    def __init__(self, schema: Schema, rows: Iterable = ()):
        self.schema = schema
        typed = []
        index = {}
        for item in rows:
            if isinstance(item, DatasetRow):
                key, values = item.key, item.values
            else:
                key, values = item
            if key in index:
                raise DuplicateKey(f"duplicate row key {key!r}", key=key)
            index[key] = len(typed)
            typed.append(DatasetRow(key, schema.coerce_tuple(values)))
        self.rows: Tuple[DatasetRow, ...] = tuple(typed)
        self._index = index

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[DatasetRow]:
        return iter(self.rows)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.schema.to_json() == other.schema.to_json() and self.rows == other.rows

    def keys(self) -> Tuple[str, ...]:
        return tuple(r.key for r in self.rows)

    def row(self, key: str) -> DatasetRow:
        return self.rows[self._index[key]]

    def restrict(self, keys) -> "Dataset":
        """Sub-dataset of the given keys, in this dataset's row order."""
        wanted = set(keys)
        return Dataset(self.schema, (r for r in self.rows if r.key in wanted))

    def to_json(self) -> list:
        return [
            {"key": r.key, "values": {a: value_to_text(r.values[a]) for a in self.schema.names()}}
            for r in self.rows
        ]

    def __repr__(self) -> str:
        return f"Dataset({list(self.keys())!r})"


def load_dataset(path: str | Path, schema: Schema) -> Dataset:
    """Read a CSV file whose header is a key column followed by the
    schema's attribute names, in order.

    Q values must parse as exact rationals ("12000", "3/4"); C values
    are taken verbatim.
    """
    expect = list(schema.names())
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("missing header row", row=1) from None
        if len(header) < 1 or header[1:] != expect:
            raise DatasetError(
                f"header must be a key column followed by {expect}, got {header}",
                row=1,
            )
        rows = []
        seen = set()
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DatasetError(
                    f"expected {len(header)} cells, got {len(cells)}", row=lineno
                )
            key = cells[0]
            if not key:
                raise DatasetError("empty row key", row=lineno, column=header[0])
            if key in seen:
                raise DuplicateKey(f"duplicate row key {key!r}", key=key, row=lineno)
            seen.add(key)
            values = {}
            for name, text in zip(expect, cells[1:]):
                try:
                    values[name] = schema.coerce(name, text)
                except FormulaTypeError as exc:
                    raise DatasetError(str(exc), row=lineno, column=name) from exc
            rows.append(DatasetRow(key, values))
    return Dataset(schema, rows)


def dump_dataset(data: Dataset, path: str | Path, mark: Optional[Iterable[str]] = None) -> None:
    """Write CSV mirroring the input columns; with ``mark`` given, an
    extra winnow_rank column flags the marked keys with 1."""
    names = list(data.schema.names())
    marked = None if mark is None else set(mark)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["id"] + names
        if marked is not None:
            header.append("winnow_rank")
        writer.writerow(header)
        for r in data.rows:
            cells = [r.key] + [value_to_text(r.values[a]) for a in names]
            if marked is not None:
                cells.append("1" if r.key in marked else "0")
            writer.writerow(cells)


# ---------------------------------------------------------------------------
# winnow


def _dominance_test(source: PreferenceSource):
    if isinstance(source, FiniteRelation):
        require_spo(source, "preference relation")
        return lambda a, b: (a.key, b.key) in source
    if isinstance(source, DnfFormula):
        # formula sources are asserted-SPO; checking is the caller's business
        return lambda a, b: eval_pair(source, a.values, b.values)
    raise ValidationError(f"unsupported preference source {type(source).__name__}")


def winnow(source: PreferenceSource, data: Dataset) -> Dataset:
    """Rows of data that no other row beats, in input row order."""
    beats = _dominance_test(source)
    kept = [t for t in data.rows if not any(beats(u, t) for u in data.rows)]
    return Dataset(data.schema, kept)


def _starts_row(rel: PreferenceSource):
    """Predicate: does this row start an edge of rel?"""
    if isinstance(rel, FiniteRelation):
        starts = boundary_sets(rel).starts
        return lambda r: r.key in starts
    s = project_side(rel, "LEFT")
    return lambda r: eval_formula(s, {"L": r.values})


def _ends_row(rel: PreferenceSource):
    if isinstance(rel, FiniteRelation):
        ends = boundary_sets(rel).ends
        return lambda r: r.key in ends
    e = project_side(rel, "RIGHT")
    return lambda r: eval_formula(e, {"L": r.values})


@dataclass(frozen=True)
class WinnowStrategy:
    """How a post-contraction winnow was answered.

    path: "fast" when the cached answer was returned untouched,
    "incremental" when a restricted rescan ran. s_source says which
    edge set supplied the start-node test: the discard request itself
    ("S(CON)", valid for prefix contractors whose added edges all start
    at request starts) or the whole contractor ("S(P-)"). s_hits counts
    cached rows passing that test; candidates is the rescan size.
    """

    path: str
    s_source: str
    s_hits: int
    candidates: int


def winnow_after_contraction(
    pref: PreferenceSource,
    contractor: PreferenceSource,
    con: PreferenceSource,
    data: Dataset,
    cached: Optional[Dataset] = None,
    contractor_is_prefix: bool = True,
) -> Tuple[Dataset, WinnowStrategy]:
    """Winnow under pref minus contractor, reusing a cached winnow(pref).

    The contractor must be a full contractor of pref by con, all three
    in the same representation. The answer always equals a plain winnow
    under the contracted relation; only the amount of work varies.
    """
    kinds = {isinstance(x, FiniteRelation) for x in (pref, contractor, con)}
    if len(kinds) != 1:
        raise ValidationError("pref, contractor, and con must share a representation")

    if cached is None:
        cached = winnow(pref, data)

    if contractor_is_prefix:
        s_rel, s_source = con, "S(CON)"
    else:
        s_rel, s_source = contractor, "S(P-)"
    starts = _starts_row(s_rel)
    s_hits = sum(1 for r in cached.rows if starts(r))
    if s_hits == 0:
        # nothing the old winners were beating got un-beaten
        return cached, WinnowStrategy("fast", s_source, 0, 0)

    if isinstance(pref, FiniteRelation):
        contracted: PreferenceSource = pref - contractor
    else:
        contracted = and_not(pref, contractor)

    # only rows ending a discarded edge can newly surface
    ends = _ends_row(contractor)
    candidate_keys = set(cached.keys())
    candidate_keys.update(r.key for r in data.rows if ends(r))
    pool = data.restrict(candidate_keys)
    result = winnow(contracted, pool)
    return result, WinnowStrategy("incremental", s_source, s_hits, len(pool))


# ---------------------------------------------------------------------------
# skyline relations


def skyline_relation(data: Dataset, spec: Mapping[str, str]) -> FiniteRelation:
    """Pareto dominance over the directed attributes.

    spec maps attribute names to "min", "max", or "ignore"; unmentioned
    attributes are ignored. Edge t -> t' iff t is weakly better on every
    directed attribute and strictly better on at least one.
    """
    names = set(data.schema.names())
    for attr, direction in spec.items():
        if attr not in names:
            raise ValidationError(f"unknown attribute {attr!r} in skyline spec")
        if direction not in (MIN, MAX, IGNORE):
            raise ValidationError(
                f"{attr}: direction must be min, max, or ignore, got {direction!r}"
            )
        if direction != IGNORE and data.schema.domain(attr) == "C":
            raise SkylineSpecError(
                f"{attr}: min/max needs an ordered domain", attribute=attr
            )
    directed = [
        (a, spec[a]) for a in data.schema.names() if spec.get(a, IGNORE) != IGNORE
    ]

    edges = []
    for a in data.rows:
        for b in data.rows:
            if a.key == b.key:
                continue
            strict = False
            weak = True
            for attr, direction in directed:
                x, y = a.values[attr], b.values[attr]
                if direction == MAX:
                    x, y = y, x
                if x > y:
                    weak = False
                    break
                if x < y:
                    strict = True
            if weak and strict:
                edges.append((a.key, b.key))
    return FiniteRelation(edges)
