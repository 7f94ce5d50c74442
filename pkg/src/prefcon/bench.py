"""Desk-scale contraction benchmark over generated skyline relations.

Builds Pareto dominance relations from random numeric rows, discards a
random handful of edges, and times prefix against meet contraction.
The interesting outputs are the wall times and the size ordering: the
prefix contractor can never cut more than the meet contractor, which
unions every minimal alternative.
"""

from __future__ import annotations

import random
import time
from typing import List, Optional

from .contract import check_full_contractor, meet_contr, min_contr_finite
from .formula import Attribute, Schema
from .winnow import MIN, Dataset, skyline_relation

SCHEMA = Schema([Attribute("d1", "Q"), Attribute("d2", "Q"), Attribute("d3", "Q")])
SPEC = {"d1": MIN, "d2": MIN, "d3": MIN}


def generate_relation(rng: random.Random, target_edges: int):
    """Random rows, grown until their skyline relation reaches the target."""
    # ~12.7% of ordered pairs dominate under 3 uniform attributes
    n = max(16, int((target_edges / 0.127) ** 0.5))
    while True:
        data = Dataset(
            SCHEMA,
            (
                (f"r{i}", {"d1": rng.randrange(1000), "d2": rng.randrange(1000), "d3": rng.randrange(1000)})
                for i in range(n)
            ),
        )
        rel = skyline_relation(data, SPEC)
        if len(rel) >= target_edges:
            return data, rel
        n = int(n * 1.25) + 8


def run_trial(seed: int, target_edges: int, max_con: int) -> dict:
    rng = random.Random(seed)
    data, pref = generate_relation(rng, target_edges)
    con_edges = rng.sample(sorted(pref.edges), min(max_con, len(pref)))
    from .relation import FiniteRelation

    con = FiniteRelation(con_edges)

    t0 = time.perf_counter()
    prefix = min_contr_finite(pref, con)
    prefix_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    meet = meet_contr(pref, con)
    meet_seconds = time.perf_counter() - t0

    ok = (
        bool(check_full_contractor(pref, con, prefix.contractor))
        and bool(check_full_contractor(pref, con, meet.contractor))
        and len(prefix.contractor) <= len(meet.contractor)
    )
    return {
        "seed": seed,
        "rows": len(data),
        "edges": len(pref),
        "con": len(con),
        "prefix_size": len(prefix.contractor),
        "meet_size": len(meet.contractor),
        "prefix_seconds": round(prefix_seconds, 4),
        "meet_seconds": round(meet_seconds, 4),
        "ok": ok,
    }


def run_bench(
    trials: int = 5,
    seed: int = 0,
    target_edges: int = 2000,
    max_con: int = 35,
    time_budget: Optional[float] = 1.0,
) -> dict:
    """ok means: both contractors verified full, prefix no larger than
    meet, and (when a budget is set) prefix finished inside it."""
    results: List[dict] = []
    for i in range(trials):
        trial = run_trial(seed + i, target_edges, max_con)
        if time_budget is not None:
            trial["ok"] = trial["ok"] and trial["prefix_seconds"] < time_budget
        results.append(trial)
    return {"trials": results, "all_ok": all(t["ok"] for t in results)}
