"""Contraction of finite preference relations.

Given a strict partial order ``pref`` and a base set ``con`` of edges to
discard, a full contractor is any superset of ``con`` inside ``pref`` whose
removal leaves a strict partial order. The functions here build three kinds:

* ``min_contr_finite``: the prefix minimal full contractor, built stratum
  by stratum so that every added edge starts a still-connected detour;
* ``min_contr_protecting``: the same, seeded with the extra edges forced by
  a protected set, so the result never touches protected preferences;
* ``meet_contr`` / ``meet_contr_protecting``: the union of all (protecting)
  minimal full contractors, a safer but larger cut.

Minimality of a full contractor is decidable edge-locally: an edge is
needed iff it is the only contractor edge on some detour of length at most
three around a ``con`` edge. ``check_minimal_contractor`` returns the set
of removable edges, empty exactly for minimal contractors.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConNotSubset, ProtectionConflict, ProtectNotSubset, ValidationError
from ..relation import (
    EMPTY,
    Edge,
    FiniteRelation,
    find_path_avoiding,
    require_spo,
    spo_check,
    transitive_closure,
)

PREFIX = "prefix"
PROTECTING = "protecting"
MEET = "meet"
PROTECTING_MEET = "protecting_meet"


@dataclass(frozen=True)
class ContractionResult:
    """Outcome of one contraction: the edges cut and what remains.

    ``strata_trace`` lists ``(layer index, edges added for that stratum)``
    for the prefix construction; the rounds may overlap. ``protected`` is
    the transitively closed protected set when one was given, ``forced``
    the edges the protection forced into the cut (the seeded detour
    closers for prefix mode, the always-cut core for meet mode).
    """

    contractor: FiniteRelation
    contracted: FiniteRelation
    mode: str = PREFIX
    strata_trace: tuple = field(default=())
    protected: Optional[FiniteRelation] = None
    forced: Optional[FiniteRelation] = None


@dataclass(frozen=True)
class FullContractorReport:
    """Verdict of the full-contractor test with a witness for failure.

    ``missing`` holds con edges absent from the candidate, ``stray``
    candidate edges outside pref. ``bypass`` names the first candidate
    edge whose endpoints stay connected after the cut, with the surviving
    path as a node tuple.
    """

    ok: bool
    missing: FiniteRelation = EMPTY
    stray: FiniteRelation = EMPTY
    bypass: Optional[tuple] = None  # (edge, path of nodes)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class MinimalityReport:
    """``removable`` collects the contractor edges without a detour of
    their own; the contractor is minimal iff it is empty."""

    minimal: bool
    removable: FiniteRelation

    def __bool__(self) -> bool:
        return self.minimal


def _validate(pref: FiniteRelation, con: FiniteRelation) -> None:
    require_spo(pref, "pref")
    if not con.issubset(pref):
        extra = sorted(con.edges - pref.edges)[:5]
        raise ConNotSubset(f"con has edges outside pref: {extra}", edges=extra)


def _validate_protect(pref: FiniteRelation, protect: FiniteRelation) -> None:
    if not protect.issubset(pref):
        extra = sorted(protect.edges - pref.edges)[:5]
        raise ProtectNotSubset(f"protected edges outside pref: {extra}", edges=extra)


def _closed_protect(
    pref: FiniteRelation, con: FiniteRelation, protect: FiniteRelation
) -> FiniteRelation:
    """Transitive closure of the protected set, rejected when it overlaps
    con: a protected chain implying a discarded edge leaves nothing to cut."""
    _validate_protect(pref, protect)
    closed = transitive_closure(protect)
    conflict = closed & con
    if len(conflict):
        raise ProtectionConflict(
            f"protected preferences imply edges being discarded: {conflict.sorted_edges()}",
            edges=conflict.sorted_edges(),
        )
    return closed


def check_full_contractor(
    pref: FiniteRelation, con: FiniteRelation, p: FiniteRelation
) -> FullContractorReport:
    """Is p a full contractor of pref by con?

    Yes iff con ⊆ p ⊆ pref and no cut edge has a surviving detour: for
    every xy in p, pref - p has no path from x to y. That path condition
    is exactly transitivity of the remainder, witnessed by the shortest
    surviving path when it fails; irreflexivity is inherited from pref.
    """
    _validate(pref, con)
    missing = con - p
    stray = p - pref
    if len(missing) or len(stray):
        return FullContractorReport(False, missing=missing, stray=stray)
    for x, y in p.sorted_edges():
        path = find_path_avoiding(pref, p, x, y)
        if path is not None:
            return FullContractorReport(False, bypass=((x, y), path))
    return FullContractorReport(True)


def check_minimal_contractor(
    pref: FiniteRelation, con: FiniteRelation, p: FiniteRelation
) -> MinimalityReport:
    """Removable edges of a full contractor; minimal iff there are none.

    An edge xy stays needed when it is the only p edge on a detour around
    some con edge: xy itself in con, a bent detour x -> y -> v or
    u -> x -> y, or a full u -> x -> y -> v with the outer steps kept.
    """
    report = check_full_contractor(pref, con, p)
    if not report.ok:
        raise ValidationError(
            "p is not a full contractor",
            missing=report.missing.sorted_edges(),
            stray=report.stray.sorted_edges(),
            bypass=report.bypass,
        )
    kept = pref - p
    removable = []
    for x, y in p.sorted_edges():
        if (x, y) in con:
            continue
        if con.successors(x) & kept.successors(y):
            continue
        if con.predecessors(y) & kept.predecessors(x):
            continue
        if any(con.successors(u) & kept.successors(y) for u in kept.predecessors(x)):
            continue
        removable.append((x, y))
    rel = FiniteRelation(removable)
    return MinimalityReport(len(rel) == 0, rel)


def naive_contractor(pref: FiniteRelation, con: FiniteRelation) -> FiniteRelation:
    """Every edge that shares a start with a con edge and ends no lower.

    Always a full contractor, usually not minimal: it cuts whole detour
    bundles at their first edge without checking what is already cut.
    """
    _validate(pref, con)
    out = []
    for x, v in con.sorted_edges():
        for y in pref.successors(x):
            if y == v or (y, v) in pref:
                out.append((x, y))
    return FiniteRelation(out)


def _end_depths(pref: FiniteRelation, con: FiniteRelation) -> dict:
    """Longest-path depth of each con end node inside pref restricted to
    the end nodes. Finite inputs always stratify."""
    ends = frozenset(b for _, b in con.edges)
    succ = {k: sorted(v for v in pref.successors(k) if v in ends) for k in ends}
    depth: dict = {}
    for start in sorted(ends):
        if start in depth:
            continue
        # Iterative post-order; pref is acyclic so every walk terminates.
        stack = [(start, iter(succ[start]), [0])]
        while stack:
            node, children, best = stack[-1]
            descended = False
            for child in children:
                if child in depth:
                    best[0] = max(best[0], depth[child] + 1)
                else:
                    stack.append((child, iter(succ[child]), [0]))
                    descended = True
                    break
            if not descended:
                depth[node] = best[0]
                stack.pop()
                if stack:
                    parent_best = stack[-1][2]
                    parent_best[0] = max(parent_best[0], depth[node] + 1)
    return depth


def layer_indices(pref: FiniteRelation, con: FiniteRelation) -> dict:
    """Stratum of each con edge: the longest-path depth of its end node
    among con end nodes. The prefix construction contracts depth 0 first;
    the largest value is the stratification bound."""
    _validate(pref, con)
    depth = _end_depths(pref, con)
    return {(x, v): depth[v] for x, v in con.sorted_edges()}


def min_contr_finite(pref: FiniteRelation, con: FiniteRelation) -> ContractionResult:
    """Prefix minimal full contractor of pref by con.

    Contracts stratum by stratum, deepest-reaching end nodes last. An edge
    xy joins the round for con edge xv when y = v or the closing step yv
    was still kept at the start of the round. Adjacency is a contiguous
    slice of the sorted edge array; membership in the growing contractor
    is a mark bit per edge, so a round costs O(deg(x) log |pref|) per con
    edge.
    """
    _validate(pref, con)
    arr = pref.sorted_edges()
    starts = [a for a, _ in arr]
    marked = bytearray(len(arr))
    con_edges = con.edges

    def edge_index(edge: Edge) -> int:
        i = bisect_left(arr, edge)
        if i < len(arr) and arr[i] == edge:
            return i
        return -1

    depth = _end_depths(pref, con)
    by_stratum: dict = {}
    for x, v in con.sorted_edges():
        by_stratum.setdefault(depth[v], []).append((x, v))

    trace = []
    for i in sorted(by_stratum):
        added: list[int] = []
        for x, v in by_stratum[i]:
            lo = bisect_left(starts, x)
            hi = bisect_right(starts, x)
            for j in range(lo, hi):
                y = arr[j][1]
                if y == v:
                    added.append(j)
                    continue
                k = edge_index((y, v))
                if k < 0:
                    continue
                if marked[k] or (y, v) in con_edges:
                    continue
                added.append(j)
        e_i = FiniteRelation(arr[j] for j in added)
        for j in added:
            marked[j] = 1
        trace.append((i, e_i))
    contractor = FiniteRelation(arr[j] for j in range(len(arr)) if marked[j])
    return ContractionResult(contractor, pref - contractor, PREFIX, tuple(trace))


def q_set(
    pref: FiniteRelation, con: FiniteRelation, protectedRel: FiniteRelation
) -> FiniteRelation:
    """Edges forced into every protecting full contractor.

    When a protected edge ux runs parallel to a con edge uy, the closing
    step xy of that two-edge detour cannot stay: cutting the detour at ux
    is forbidden. ``protectedRel`` must already be transitively closed so
    that chains of protected edges count as one step.
    """
    _validate_protect(pref, protectedRel)
    if not spo_check(protectedRel).transitive:
        raise ValidationError("protected set must be transitively closed")
    out = []
    for u, y in con.sorted_edges():
        for x in protectedRel.successors(u):
            if (x, y) in pref:
                out.append((x, y))
    return FiniteRelation(out)


def min_contr_protecting(
    pref: FiniteRelation,
    con: FiniteRelation,
    protect: FiniteRelation,
) -> ContractionResult:
    """Prefix minimal full contractor that avoids all protected edges.

    Protection propagates along chains of protected edges, so the check
    and the forced set both use the transitive closure of ``protect``. A
    closed protected edge inside con means no protecting contractor exists
    at all.
    """
    _validate(pref, con)
    closed = _closed_protect(pref, con, protect)
    q = q_set(pref, con, closed)
    res = min_contr_finite(pref, con | q)
    return ContractionResult(
        res.contractor,
        res.contracted,
        PROTECTING,
        res.strata_trace,
        protected=closed,
        forced=q,
    )


def _detour_union(
    pref: FiniteRelation,
    base: FiniteRelation,
    outer: FiniteRelation,
    exclude: frozenset = frozenset(),
) -> FiniteRelation:
    """Edges xy on a detour u >= x > y >= v around some base edge uv whose
    outer steps ux and yv (when present) come from ``outer``."""
    out = []
    for u, v in base.sorted_edges():
        xs = {u} | outer.successors(u)
        ys = {v} | outer.predecessors(v)
        for x in sorted(xs):
            for y in pref.successors(x) & ys:
                if (x, y) not in exclude:
                    out.append((x, y))
    return FiniteRelation(out)


def meet_contr(pref: FiniteRelation, con: FiniteRelation) -> ContractionResult:
    """Union of all minimal full contractors.

    An edge xy belongs iff some con edge uv admits a detour
    u >= x > y >= v whose outer steps ux and yv (when present) are not con
    edges; some minimal contractor then cuts that detour exactly at xy.
    """
    _validate(pref, con)
    contractor = _detour_union(pref, con, pref - con)
    return ContractionResult(contractor, pref - contractor, MEET)


def meet_contr_protecting(
    pref: FiniteRelation,
    con: FiniteRelation,
    protect: FiniteRelation,
) -> ContractionResult:
    """Union of all protecting minimal full contractors.

    First the forced core: edges closing a detour whose every other step
    is protected belong to every protecting contractor, exactly as con
    does. The meet is then the detour test of ``meet_contr`` run against
    that enlarged core, skipping protected edges themselves.
    """
    _validate(pref, con)
    closed = _closed_protect(pref, con, protect)
    forced = _detour_union(pref, con, closed)
    contractor = _detour_union(pref, forced, pref - forced, exclude=closed.edges)
    return ContractionResult(
        contractor,
        pref - contractor,
        PROTECTING_MEET,
        protected=closed,
        forced=forced,
    )
