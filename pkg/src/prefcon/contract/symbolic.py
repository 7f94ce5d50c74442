"""Contraction of formula-defined preference relations.

The finite constructions carry over to relations given as two-variable
DNF formulas, with quantifier elimination standing in for joins. The cut
is built stratum by stratum exactly as in the finite case; a stratum here
is a formula describing the end nodes whose longest onward chain (among
end nodes) has one fixed length. That only terminates when chain lengths
are bounded, so ``check_finitely_stratifiable`` decides boundedness first:
per DNF disjunct and per attribute, a three-step chain is satisfiable iff
chains of every length are, which turns the test into one satisfiability
call on a four-variable formula.

Variable conventions: two-variable formulas use ``L`` and ``R``; formulas
describing a set of tuples (strata, end-node sets) use ``L`` alone.
Temporaries ``U``, ``V``, ``M``, ``O1``..``O4`` appear only inside
eliminations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import (
    IterationCap,
    NotFinitelyStratifiable,
    NotStrictPartialOrder,
    ProtectionConflict,
)
from ..formula import (
    DnfFormula,
    Schema,
    and_not,
    conj,
    disj,
    exists,
    false_formula,
    implies,
    negate,
    rename,
    satisfiable,
    tuple_eq,
)
from ..formula.core import Atom, cterm, vterm
from ..relation import FiniteRelation

PREFIX = "prefix"
PROTECTING = "protecting"

TC_ITER_CAP = 50


@dataclass(frozen=True)
class SymbolicStratum:
    """One round of the symbolic prefix construction: the end nodes the
    round serves (single-variable formula) and the edges it cut."""

    index: int
    layer: DnfFormula
    added: DnfFormula


@dataclass(frozen=True)
class SymbolicContractionResult:
    contractor: DnfFormula
    contracted: DnfFormula
    mode: str = PREFIX
    strata_trace: tuple = field(default=())
    protected: Optional[DnfFormula] = None
    forced: Optional[DnfFormula] = None


@dataclass(frozen=True)
class StratifiabilityReport:
    """Boundedness verdicts for the chain relation among con end nodes.

    ``failing_reason[i]`` maps each attribute to whether its constraint
    group bounds chain lengths in disjunct i; a disjunct needs one bounded
    attribute, the relation needs every disjunct covered.
    ``failing_disjunct`` is the first uncovered disjunct. ``pref_con``
    and ``k_con`` are the chain relation and end-node set themselves,
    reusable for stratum queries.
    """

    stratifiable: bool
    failing_disjunct: Optional[int]
    failing_reason: tuple
    pref_con: DnfFormula
    k_con: DnfFormula


@dataclass(frozen=True)
class SymbolicSpoReport:
    irreflexive: bool
    transitive: bool
    loop_witness: Optional[dict] = None
    gap_witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.irreflexive and self.transitive


def spo_check_symbolic(f: DnfFormula) -> SymbolicSpoReport:
    """Strict-partial-order test for a two-variable relation formula."""
    schema = f.schema
    loop = satisfiable(conj(f, tuple_eq(schema, "L", "R")))
    gap = satisfiable(
        and_not(conj(rename(f, {"R": "M"}), rename(f, {"L": "M"})), f)
    )
    return SymbolicSpoReport(loop is None, gap is None, loop, gap)


def require_spo_symbolic(f: DnfFormula, what: str) -> None:
    report = spo_check_symbolic(f)
    if not report.irreflexive:
        raise NotStrictPartialOrder(
            f"{what} is not irreflexive", witness=_show_witness(report.loop_witness)
        )
    if not report.transitive:
        raise NotStrictPartialOrder(
            f"{what} is not transitive", witness=_show_witness(report.gap_witness)
        )


def _show_witness(witness: Optional[dict]) -> Optional[dict]:
    if witness is None:
        return None
    return {
        var: {attr: str(val) for attr, val in tup.items()}
        for var, tup in witness.items()
    }


def end_nodes_formula(con: DnfFormula) -> DnfFormula:
    """Single-variable formula (over L) for the end nodes of con edges."""
    return rename(exists(con, "L"), {"R": "L"})


def chain_relation(pref: DnfFormula, con: DnfFormula) -> DnfFormula:
    """pref restricted to con end nodes on both sides; stratum depth is
    measured along this relation."""
    k = end_nodes_formula(con)
    return conj(pref, k, rename(k, {"L": "R"}))


# ---------------------------------------------------------------------------
# finite stratifiability


def _three_chain_bounded(schema: Schema, atoms: tuple) -> bool:
    """No chain o1 -> o2 -> o3 -> o4 fits the constraint group: the
    four-variable conjunction is unsatisfiable."""
    lam = DnfFormula(schema, (atoms,))
    if lam.is_false:
        return True
    step = [
        rename(lam, {"L": "O1", "R": "O2"}),
        rename(lam, {"L": "O2", "R": "O3"}),
        rename(lam, {"L": "O3", "R": "O4"}),
    ]
    return conj(*step).is_false


def _interval_of(atoms: list) -> Optional[tuple]:
    """Value set one side of a Q group allows: ('point', c) or
    ('interval', lo, hi, holes) with open ends, None meaning unbounded.
    Returns None for an empty set (cannot happen in canonical input)."""
    eq = None
    lo = hi = None
    holes = set()
    for a in atoms:
        c = a.rhs[1]
        if a.op == "=":
            eq = c
        elif a.op == "<":
            hi = c if hi is None else min(hi, c)
        elif a.op == ">":
            lo = c if lo is None else max(lo, c)
        else:
            holes.add(c)
    if eq is not None:
        ok = (lo is None or lo < eq) and (hi is None or eq < hi) and eq not in holes
        return ("point", eq) if ok else None
    if lo is not None and hi is not None and lo >= hi:
        return None
    return ("interval", lo, hi, holes)


def _q_cardinality(r1, r2) -> int:
    """0, 1 or 2 (meaning infinite) common values of two Q value sets."""
    if r1 is None or r2 is None:
        return 0
    if r1[0] == "point" and r2[0] == "point":
        return 1 if r1[1] == r2[1] else 0
    if r2[0] == "point":
        r1, r2 = r2, r1
    if r1[0] == "point":
        c = r1[1]
        _, lo, hi, holes = r2
        inside = (lo is None or lo < c) and (hi is None or c < hi) and c not in holes
        return 1 if inside else 0
    _, lo1, hi1, _ = r1
    _, lo2, hi2, _ = r2
    lo = lo1 if lo2 is None else lo2 if lo1 is None else max(lo1, lo2)
    hi = hi1 if hi2 is None else hi2 if hi1 is None else min(hi1, hi2)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    return 2  # a dense open interval survives finitely many holes


def _c_values(atoms: list):
    """('point', c) or ('cofinite', excluded) for one side of a C group."""
    eq = None
    excluded = set()
    for a in atoms:
        if a.op == "=":
            eq = a.rhs[1]
        else:
            excluded.add(a.rhs[1])
    if eq is not None:
        return None if eq in excluded else ("point", eq)
    return ("cofinite", excluded)


def _c_cardinality(r1, r2) -> int:
    if r1 is None or r2 is None:
        return 0
    if r1[0] == "point" and r2[0] == "point":
        return 1 if r1[1] == r2[1] else 0
    if r2[0] == "point":
        r1, r2 = r2, r1
    if r1[0] == "point":
        return 0 if r1[1] in r2[1] else 1
    return 2  # two cofinite sets of an infinite domain share infinitely many


def _structural_bounded(schema: Schema, atoms: tuple, attr: str) -> bool:
    """Case analysis replacement for the four-variable test: chains are
    unbounded iff the values allowed on both sides overlap enough for the
    middle comparison, which depends only on interval overlap cardinality.
    """
    left = [a for a in atoms if a.lhs == vterm("L") and a.rhs[0] == "c"]
    right = [a for a in atoms if a.lhs == vterm("R") and a.rhs[0] == "c"]
    middle_ops = {a.op for a in atoms if a.lhs == vterm("L") and a.rhs == vterm("R")}

    if schema.domain(attr) == "Q":
        card = _q_cardinality(_interval_of(left), _interval_of(right))
    else:
        card = _c_cardinality(_c_values(left), _c_values(right))

    if "=" in middle_ops:
        # equal middles chain freely at any shared value
        return card == 0
    if "<" in middle_ops or ">" in middle_ops:
        # strictly moving middles need two shared values to pass through
        return card <= 1
    if "!=" in middle_ops:
        # alternating middles need two shared values
        return card <= 1
    return card == 0


def check_finitely_stratifiable(
    pref: DnfFormula, con: DnfFormula, method: str = "sat"
) -> StratifiabilityReport:
    """Is the chain relation among con end nodes bounded in length?

    Decides per DNF disjunct: chains through one disjunct are bounded iff
    some attribute group blocks a three-step chain; the whole relation is
    bounded iff every disjunct is. ``method`` picks the decision routine:
    the four-variable satisfiability call ("sat") or the interval overlap
    case analysis ("structural"); they agree, and tests hold them to it.
    """
    if method not in ("sat", "structural"):
        raise ValueError(f"unknown method {method!r}")
    k = end_nodes_formula(con)
    pref_con = chain_relation(pref, con)
    names = pref_con.schema.names()
    reasons = []
    failing = None
    for idx, d in enumerate(pref_con.disjuncts):
        by_attr: dict = {}
        for a in d:
            by_attr.setdefault(a.attr, []).append(a)
        verdict = {}
        for attr in names:
            atoms = tuple(by_attr.get(attr, ()))
            if method == "sat":
                verdict[attr] = _three_chain_bounded(pref_con.schema, atoms)
            else:
                verdict[attr] = _structural_bounded(pref_con.schema, atoms, attr)
        reasons.append(verdict)
        if failing is None and not any(verdict.values()):
            failing = idx
    return StratifiabilityReport(failing is None, failing, tuple(reasons), pref_con, k)


# ---------------------------------------------------------------------------
# strata and the prefix construction


def _next_reach(pref_con: DnfFormula, reach: DnfFormula) -> DnfFormula:
    """Nodes starting a chain one step longer: ∃x. pref_con(y, x) ∧ reach(x)."""
    return exists(conj(pref_con, rename(reach, {"L": "R"})), "R")


def get_stratum_symbolic(
    pref_con: DnfFormula, k_con: DnfFormula, i: int
) -> Optional[DnfFormula]:
    """End nodes whose longest chain has length exactly i, or None when
    no end node does (the stratum is empty and so are all later ones)."""
    if i < 0:
        raise ValueError("stratum index must be nonnegative")
    reach = k_con
    for _ in range(i):
        reach = _next_reach(pref_con, reach)
    layer = and_not(reach, _next_reach(pref_con, reach))
    return None if layer.is_false else layer


def min_contr_symbolic(pref: DnfFormula, con: DnfFormula) -> SymbolicContractionResult:
    """Prefix minimal full contractor for formula-defined relations.

    Rejects unstratifiable input up front; the loop below would otherwise
    never run out of strata. Each round cuts, for every detour around a
    con edge ending in the current stratum, its first edge - unless the
    closing step was already cut or is itself a con edge, exactly as in
    the finite construction.
    """
    report = check_finitely_stratifiable(pref, con)
    if not report.stratifiable:
        raise NotFinitelyStratifiable(
            "con chains are unbounded; no finite stratum sequence exists",
            failing_disjunct=report.failing_disjunct,
            failing_reason=report.failing_reason[report.failing_disjunct]
            if report.failing_disjunct is not None
            else None,
        )
    schema = pref.schema
    pref_con = report.pref_con
    reach = report.k_con
    p_acc = false_formula(schema)
    # pref minus the growing cut and minus con: exactly the closing steps
    # a detour may still use. Subtracting stratum by stratum keeps each
    # negation small.
    kept = and_not(pref, con)
    trace = []
    i = 0
    while True:
        reach_next = _next_reach(pref_con, reach)
        layer = and_not(reach, reach_next)
        if layer.is_false:
            break
        layer_v = rename(layer, {"L": "V"})
        con_lv = rename(con, {"R": "V"})
        closes = disj(tuple_eq(schema, "R", "V"), rename(kept, {"L": "R", "R": "V"}))
        e_i = conj(pref, exists(conj(layer_v, con_lv, closes), "V"))
        trace.append(SymbolicStratum(i, layer, e_i))
        p_acc = disj(p_acc, e_i)
        kept = and_not(kept, e_i)
        reach = reach_next
        i += 1
    # con lands in the cut round by round, so kept ends at pref ∧ ¬p_acc
    return SymbolicContractionResult(p_acc, kept, PREFIX, tuple(trace))


# ---------------------------------------------------------------------------
# minimality, closure, protection, meet


def check_minimal_symbolic(pref: DnfFormula, con: DnfFormula, p: DnfFormula) -> bool:
    """Full-contractor and minimality test, both as validity checks.

    Full: con ⇒ p ⇒ pref and the remainder has no two-step gap. Minimal:
    every p edge closes a detour around some con edge whose outer steps
    (possibly empty) were themselves spared by p.
    """
    if not implies(con, p) or not implies(p, pref):
        return False
    schema = pref.schema
    kept = and_not(pref, p)
    gap = conj(rename(kept, {"R": "M"}), rename(kept, {"L": "M"}), p)
    if not gap.is_false:
        return False
    np = negate(p)
    needed = exists(
        exists(
            conj(
                rename(con, {"L": "U", "R": "V"}),
                disj(tuple_eq(schema, "U", "L"), rename(pref, {"L": "U", "R": "L"})),
                disj(tuple_eq(schema, "R", "V"), rename(pref, {"L": "R", "R": "V"})),
                rename(np, {"L": "U", "R": "L"}),
                rename(np, {"L": "R", "R": "V"}),
            ),
            "V",
        ),
        "U",
    )
    return implies(p, needed)


def tc_symbolic(r: DnfFormula, max_iter: int = TC_ITER_CAP) -> DnfFormula:
    """Transitive closure by composing until nothing new appears.

    Composition introduces no constants beyond the input's, so the chain
    of closures lives in a finite lattice and must stabilize; the cap
    only guards against a normalization bug breaking that argument.
    """
    t = r
    for _ in range(max_iter):
        step = exists(conj(rename(t, {"R": "M"}), rename(r, {"L": "M"})), "M")
        if implies(step, t):
            return t
        t = disj(t, step)
    raise IterationCap(f"transitive closure still growing after {max_iter} rounds")


def _protection_closure(pref: DnfFormula, con: DnfFormula, protect: DnfFormula):
    p_plus = tc_symbolic(protect)
    witness = satisfiable(conj(p_plus, con))
    if witness is not None:
        raise ProtectionConflict(
            "protected preferences imply edges being discarded",
            witness=_show_witness(witness),
        )
    return p_plus


def min_contr_protecting_symbolic(
    pref: DnfFormula, con: DnfFormula, protect: DnfFormula
) -> SymbolicContractionResult:
    """Prefix contraction avoiding everything the protected set implies.

    The forced edges close detours whose first step is protected; cutting
    then proceeds as if they were con edges. End nodes stay the same, so
    stratifiability is unaffected.
    """
    p_plus = _protection_closure(pref, con, protect)
    q = exists(
        conj(
            rename(pref, {"L": "U", "R": "L"}),
            pref,
            rename(con, {"L": "U"}),
            rename(p_plus, {"L": "U", "R": "L"}),
        ),
        "U",
    )
    inner = min_contr_symbolic(pref, disj(con, q))
    return SymbolicContractionResult(
        inner.contractor,
        inner.contracted,
        PROTECTING,
        inner.strata_trace,
        protected=p_plus,
        forced=q,
    )


def _detour_formula(
    pref: DnfFormula, base: DnfFormula, outer: DnfFormula
) -> DnfFormula:
    """Edges x > y on a detour u >= x > y >= v around a base edge uv with
    outer steps (when present) drawn from ``outer``."""
    schema = pref.schema
    body = conj(
        rename(base, {"L": "U", "R": "V"}),
        disj(tuple_eq(schema, "U", "L"), rename(outer, {"L": "U", "R": "L"})),
        pref,
        disj(tuple_eq(schema, "R", "V"), rename(outer, {"L": "R", "R": "V"})),
    )
    return exists(exists(body, "V"), "U")


def meet_contr_symbolic(
    pref: DnfFormula, con: DnfFormula, protect: Optional[DnfFormula] = None
) -> DnfFormula:
    """Union of all (protecting) minimal full contractors as a formula.

    Without protection: edges cutting some detour whose outer steps avoid
    con. With protection: detours whose outer steps are protected force a
    core cut beyond con, and the union then respects that core, skipping
    protected edges themselves.
    """
    if protect is None:
        return _detour_formula(pref, con, and_not(pref, con))
    p_plus = _protection_closure(pref, con, protect)
    core = _detour_formula(pref, con, p_plus)
    return and_not(_detour_formula(pref, core, and_not(pref, core)), p_plus)


# ---------------------------------------------------------------------------
# bridges between representations


def point_formula(schema: Schema, left: dict, right: dict) -> DnfFormula:
    """Two-variable formula satisfied exactly by one (left, right) pair of
    fully specified tuples."""
    atoms = []
    for var, tup in (("L", left), ("R", right)):
        for attr in schema.names():
            atoms.append(Atom(attr, "=", vterm(var), cterm(schema.coerce(attr, tup[attr]))))
    return DnfFormula(schema, (tuple(atoms),))


def encode_edges(
    schema: Schema, values: dict, rel: FiniteRelation
) -> DnfFormula:
    """Point-formula union for a finite relation; ``values`` maps node id
    to its attribute tuple."""
    out = false_formula(schema)
    for a, b in rel.sorted_edges():
        out = disj(out, point_formula(schema, values[a], values[b]))
    return out
