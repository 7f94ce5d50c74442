"""Exhaustive ground truth for small contraction instances.

``enumerate_minimal_contractors`` walks every edge set between con and
pref in order of size and keeps the inclusion-minimal full contractors.
Exponential by nature, so inputs are capped; the point is to pin down the
expected answers the fast constructions are tested against, not to be
usable on real data.
"""

from __future__ import annotations

from itertools import combinations

from ..errors import ConNotSubset, OracleTooLarge
from ..relation import FiniteRelation, find_path_avoiding, require_spo

ORACLE_EDGE_LIMIT = 18


def _kept_is_transitive(kept_succ: dict) -> bool:
    for a, bs in kept_succ.items():
        for b in bs:
            if not kept_succ.get(b, frozenset()) <= bs:
                return False
    return True


def enumerate_minimal_contractors(
    pref: FiniteRelation, con: FiniteRelation, limit: int = ORACLE_EDGE_LIMIT
) -> set:
    """All inclusion-minimal full contractors of pref by con.

    Tries candidate cuts smallest first, skipping supersets of cuts
    already accepted, so everything kept is minimal by construction. The
    remainder check needs only transitivity: irreflexivity is inherited
    from pref.
    """
    require_spo(pref, "pref")
    if not con.issubset(pref):
        extra = sorted(con.edges - pref.edges)[:5]
        raise ConNotSubset(f"con has edges outside pref: {extra}", edges=extra)
    if len(pref) > limit:
        raise OracleTooLarge(
            f"oracle bound is {limit} edges, pref has {len(pref)}",
            limit=limit,
            size=len(pref),
        )

    free = sorted(pref.edges - con.edges)
    n = len(free)
    found_masks: list[int] = []
    found: set = set()
    base_kept = {a: pref.successors(a) for a in pref.nodes}

    for size in range(n + 1):
        for combo in combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if any(mask & m == m for m in found_masks):
                continue
            removed = con.edges | {free[i] for i in combo}
            kept_succ = {
                a: frozenset(b for b in bs if (a, b) not in removed)
                for a, bs in base_kept.items()
            }
            if _kept_is_transitive(kept_succ):
                found_masks.append(mask)
                found.add(FiniteRelation(removed))
    return found


def has_prefix_property(
    pref: FiniteRelation, con: FiniteRelation, candidate: FiniteRelation
) -> bool:
    """Every candidate edge xy starts a con detour it alone cuts: some con
    edge xv shares the start and the rest of the detour y -> ... -> v
    survives the cut (or y is v itself)."""
    for x, y in candidate.edges:
        ok = False
        for v in con.successors(x):
            if y == v or find_path_avoiding(pref, candidate, y, v) is not None:
                ok = True
                break
        if not ok:
            return False
    return True


def oracle_prefix_contractor(pref: FiniteRelation, con: FiniteRelation, limit: int = ORACLE_EDGE_LIMIT):
    """The unique minimal full contractor with the prefix property, or
    None if the enumeration surprisingly finds none (it never should)."""
    matches = [
        p
        for p in enumerate_minimal_contractors(pref, con, limit)
        if has_prefix_property(pref, con, p)
    ]
    if len(matches) != 1:
        return None
    return matches[0]
