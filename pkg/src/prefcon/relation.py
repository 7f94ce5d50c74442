"""Finite binary relations over opaque node ids.

Edges are ``(from, to)`` string pairs. A relation is a frozen set of edges
with deterministic (lexicographic) iteration order wherever order shows:
``sorted_edges``, file output, reprs. The operations here are the graph
primitives the contraction algorithms are built on: strict-partial-order
checking, transitive closure, path search with a removed set, the outer
edge set fixpoint, and the start/end/middle boundary sets.
"""

from __future__ import annotations

import json
import warnings
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import NotStrictPartialOrder, ValidationError

Edge = tuple[str, str]


class FiniteRelation:
    """Immutable edge set with set algebra and adjacency lookups."""

    __slots__ = ("_edges", "_succ", "_pred")

    def __init__(self, edges: Iterable[Edge] = ()):
        es = set()
        for e in edges:
            a, b = e
            es.add((str(a), str(b)))
        self._edges = frozenset(es)
        self._succ: Optional[dict] = None
        self._pred: Optional[dict] = None

    @property
    def edges(self) -> frozenset:
        return self._edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges)

    @property
    def nodes(self) -> frozenset:
        out = set()
        for a, b in self._edges:
            out.add(a)
            out.add(b)
        return frozenset(out)

    def successors(self, node: str) -> frozenset:
        if self._succ is None:
            succ: dict = {}
            pred: dict = {}
            for a, b in self._edges:
                succ.setdefault(a, set()).add(b)
                pred.setdefault(b, set()).add(a)
            self._succ = succ
            self._pred = pred
        return frozenset(self._succ.get(node, ()))

    def predecessors(self, node: str) -> frozenset:
        self.successors(node)  # builds both indexes
        return frozenset(self._pred.get(node, ()))

    def __contains__(self, edge: Edge) -> bool:
        return tuple(edge) in self._edges

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.sorted_edges())

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        if isinstance(other, FiniteRelation):
            return self._edges == other._edges
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._edges)

    def __or__(self, other: "FiniteRelation") -> "FiniteRelation":
        return FiniteRelation(self._edges | other._edges)

    def __and__(self, other: "FiniteRelation") -> "FiniteRelation":
        return FiniteRelation(self._edges & other._edges)

    def __sub__(self, other: "FiniteRelation") -> "FiniteRelation":
        return FiniteRelation(self._edges - other._edges)

    def issubset(self, other: "FiniteRelation") -> bool:
        return self._edges <= other._edges

    def isdisjoint(self, other: "FiniteRelation") -> bool:
        return self._edges.isdisjoint(other._edges)

    def inverse(self) -> "FiniteRelation":
        return FiniteRelation((b, a) for a, b in self._edges)

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}->{b}" for a, b in self.sorted_edges())
        return f"FiniteRelation({{{inner}}})"


EMPTY = FiniteRelation()


@dataclass(frozen=True)
class SpoReport:
    """Outcome of spo_check; at most one counterexample of each kind."""

    irreflexive: bool
    transitive: bool
    loop: Optional[Edge] = None
    gap: Optional[tuple[str, str, str]] = None  # x, z, y with xz, zy but not xy

    @property
    def ok(self) -> bool:
        return self.irreflexive and self.transitive


def spo_check(r: FiniteRelation) -> SpoReport:
    """Check irreflexivity and transitivity, reporting a witness for each failure."""
    loop = None
    for a, b in r.sorted_edges():
        if a == b:
            loop = (a, b)
            break
    gap = None
    edges = r.edges
    for x, z in r.sorted_edges():
        for y in sorted(r.successors(z)):
            if (x, y) not in edges:
                gap = (x, z, y)
                break
        if gap:
            break
    return SpoReport(loop is None, gap is None, loop, gap)


def require_spo(r: FiniteRelation, what: str = "relation") -> None:
    report = spo_check(r)
    if not report.ok:
        detail = report.loop if report.loop else report.gap
        raise NotStrictPartialOrder(
            f"{what} is not a strict partial order: witness {detail}",
            witness=detail,
        )


def transitive_closure(r: FiniteRelation) -> FiniteRelation:
    """Smallest transitive superset, by per-node reachability."""
    succ = {n: set(r.successors(n)) for n in r.nodes}
    out = set()
    for start in succ:
        seen: set = set()
        stack = list(succ.get(start, ()))
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        for n in seen:
            out.add((start, n))
    return FiniteRelation(out)


def find_path_avoiding(
    r: FiniteRelation, removed: FiniteRelation, frm: str, to: str
) -> Optional[tuple]:
    """Shortest path (as a node tuple, length >= 1 edge) from frm to to in
    r - removed, or None. frm == to only matches via a cycle."""
    removed_edges = removed.edges
    parent: dict = {}
    queue = deque()
    for b in r.successors(frm):
        if (frm, b) not in removed_edges and b not in parent:
            parent[b] = frm
            if b == to:
                queue.clear()
                break
            queue.append(b)
    else:
        while queue:
            n = queue.popleft()
            for b in r.successors(n):
                if (n, b) in removed_edges or b in parent:
                    continue
                parent[b] = n
                if b == to:
                    queue.clear()
                    break
                queue.append(b)
    if to not in parent:
        return None
    path = [to]
    while path[-1] != frm or len(path) < 2:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def has_path_avoiding(r: FiniteRelation, removed: FiniteRelation, frm: str, to: str) -> bool:
    """True when r - removed contains a path (length >= 1) from frm to to."""
    return find_path_avoiding(r, removed, frm, to) is not None


def outer_edge_set(pref: FiniteRelation, contractor: FiniteRelation, seed: Edge) -> FiniteRelation:
    """Fixpoint of the outer-edge expansion from one contractor edge.

    Layer 0 is the seed; a contractor edge joins layer i+1 when it shares a
    start with a layer-i edge whose ends are linked by a kept edge, or shares
    an end with one whose starts are linked by a kept edge.
    """
    seed = (str(seed[0]), str(seed[1]))
    if seed not in contractor:
        raise ValidationError(f"seed edge {seed} is not in the contractor")
    require_spo(pref, "pref")
    if not contractor.issubset(pref):
        raise ValidationError("contractor is not a subset of pref")
    # Fullness of the contractor is the caller's contract; the fixpoint
    # below is well-defined for any subset and is not worth an O(V*E)
    # recheck here.
    kept = pref - contractor
    out = {seed}
    frontier = {seed}
    while frontier:
        new = set()
        for u, v in frontier:
            for e in contractor.edges:
                if e in out:
                    continue
                u2, v2 = e
                if u2 == u and (v, v2) in kept:
                    new.add(e)
                elif v2 == v and (u2, u) in kept:
                    new.add(e)
        out |= new
        frontier = new
    return FiniteRelation(out)


@dataclass(frozen=True)
class BoundarySets:
    starts: frozenset
    ends: frozenset
    middles: frozenset


def boundary_sets(r: FiniteRelation, pref: Optional[FiniteRelation] = None) -> BoundarySets:
    """Start/end node sets of r; middles need the ambient pref.

    A middle is a node strictly inside a potential detour: x > y > z in pref
    for some edge xz of r. Degenerate endpoints do not count.
    """
    starts = frozenset(a for a, _ in r.edges)
    ends = frozenset(b for _, b in r.edges)
    middles: frozenset = frozenset()
    if pref is not None:
        if not r.issubset(pref):
            raise ValidationError("middles require r to be a subset of pref")
        mids = set()
        for x, z in r.edges:
            for y in pref.successors(x):
                if y != z and (y, z) in pref:
                    mids.add(y)
        middles = frozenset(mids)
    return BoundarySets(starts, ends, middles)


def load_edges(path: str | Path) -> FiniteRelation:
    """Read an edge list: TSV ``from<TAB>to`` with # comments, or JSON {"edges": [...]}."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    pairs: list[Edge] = []
    if stripped.startswith("{"):
        doc = json.loads(text)
        if not isinstance(doc, dict) or "edges" not in doc:
            raise ValidationError(f"{path}: JSON edge file needs an 'edges' array")
        for item in doc["edges"]:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValidationError(f"{path}: bad edge entry {item!r}")
            pairs.append((str(item[0]), str(item[1])))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split("\t")
            if len(parts) != 2:
                parts = body.split()
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValidationError(f"{path}:{lineno}: expected 'from<TAB>to', got {line!r}")
            pairs.append((parts[0], parts[1]))
    if len(pairs) != len(set(pairs)):
        warnings.warn(f"{path}: duplicate edges were deduplicated", stacklevel=2)
    return FiniteRelation(pairs)


def dump_edges(r: FiniteRelation, path: str | Path) -> None:
    lines = [f"{a}\t{b}" for a, b in r.sorted_edges()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
