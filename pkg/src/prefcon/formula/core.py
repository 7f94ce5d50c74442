"""Quantifier-free DNF formulas over tuple variables, with exact QE.

A formula is a disjunction of conjuncts; a conjunct is a frozenset of atoms;
an atom compares one attribute of a tuple variable against a constant or the
same attribute of another tuple variable. Atoms never mix attributes, so
satisfiability, witness construction, and quantifier elimination all decompose
per attribute: dense-order reasoning (Fourier-Motzkin with equalities and
disequalities) for Q, equality classes over an infinite constant pool for C.

Canonical form does the heavy lifting: equality chains are collapsed onto
representatives, Q bounds are merged to the tightest constant bound per
variable, contradictions are detected exactly (cycle check over the strict
order digraph with constants pinned to their true order), and disjuncts are
deduplicated and subsumption-pruned. Unsatisfiable conjuncts never survive
construction, so ``FALSE`` is the empty disjunction and ``TRUE`` the single
empty conjunct.

Normalized operators are ``=``, ``!=``, ``<`` and ``>`` only; wide
comparisons are expanded at construction into strict-or-equal disjunctions.
Everything is immutable; operations return new formulas.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Union

from ..errors import FormulaSizeLimit, FormulaTypeError, ValidationError
from .schema import Schema, Value

# Budget on the total number of atoms a single normalization may materialize.
MAX_ATOMS = 10**6

Term = tuple  # ("v", var_name) | ("c", value)


def vterm(name: str) -> Term:
    return ("v", name)


def cterm(value: Value) -> Term:
    return ("c", value)


class Atom(NamedTuple):
    attr: str
    op: str  # "=" | "!=" | "<" | ">"
    lhs: Term
    rhs: Term


_FLIP = {"<": ">", ">": "<", "=": "=", "!=": "!="}


def _term_key(t: Term):
    kind, val = t
    if kind == "v":
        return (0, str(val), "")
    if isinstance(val, Fraction):
        return (1, "", val)
    return (2, str(val), 0)


def _atom_key(a: Atom):
    return (a.attr, a.op, _term_key(a.lhs), _term_key(a.rhs))


def _norm_atom(attr: str, op: str, lhs: Term, rhs: Term):
    """Fold and orient one atom. Returns Atom, True, or False."""
    if lhs[0] == "c" and rhs[0] == "c":
        a, b = lhs[1], rhs[1]
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        return a > b
    if lhs[0] == "c":
        lhs, rhs, op = rhs, lhs, _FLIP[op]
    if rhs[0] == "v":
        if lhs[1] == rhs[1]:
            return op == "="
        if lhs[1] > rhs[1]:
            lhs, rhs, op = rhs, lhs, _FLIP[op]
    return Atom(attr, op, lhs, rhs)


class DnfFormula:
    """Canonical DNF; equality is syntactic on the canonical form."""

    __slots__ = ("schema", "disjuncts")

    def __init__(self, schema: Schema, disjuncts: Iterable[frozenset], *, _canonical=False):
        if _canonical:
            self.schema = schema
            self.disjuncts = tuple(disjuncts)
            return
        kept = []
        for d in disjuncts:
            c = _canon_conjunct(schema, d)
            if c is not None:
                kept.append(c)
        kept = _prune(kept)
        total = sum(len(c) for c in kept)
        if total > MAX_ATOMS:
            raise FormulaSizeLimit(f"normalized formula has {total} atoms (budget {MAX_ATOMS})")
        self.schema = schema
        self.disjuncts = tuple(kept)

    @property
    def is_false(self) -> bool:
        return not self.disjuncts

    @property
    def is_true(self) -> bool:
        return len(self.disjuncts) == 1 and not self.disjuncts[0]

    def variables(self) -> frozenset:
        out = set()
        for d in self.disjuncts:
            for a in d:
                if a.lhs[0] == "v":
                    out.add(a.lhs[1])
                if a.rhs[0] == "v":
                    out.add(a.rhs[1])
        return frozenset(out)

    def constants(self) -> dict:
        """attr -> set of constant values appearing in atoms of that attr."""
        out: dict = {}
        for d in self.disjuncts:
            for a in d:
                if a.rhs[0] == "c":
                    out.setdefault(a.attr, set()).add(a.rhs[1])
        return out

    def __eq__(self, other):
        if isinstance(other, DnfFormula):
            return self.schema == other.schema and set(self.disjuncts) == set(other.disjuncts)
        return NotImplemented

    def __hash__(self):
        return hash((self.schema, frozenset(self.disjuncts)))

    def __repr__(self):
        from .parser import to_source

        return f"DnfFormula({to_source(self)!r})"


def true_formula(schema: Schema) -> DnfFormula:
    return DnfFormula(schema, (frozenset(),), _canonical=True)


def false_formula(schema: Schema) -> DnfFormula:
    return DnfFormula(schema, (), _canonical=True)


def atom_formula(schema: Schema, attr: str, op: str, lhs: Term, rhs: Term) -> DnfFormula:
    """Typed single-atom formula; expands <= and >= into strict-or-equal."""
    dom = schema.domain(attr)
    for t in (lhs, rhs):
        if t[0] == "v":
            continue
        v = t[1]
        if dom == "Q" and not isinstance(v, Fraction):
            raise FormulaTypeError(f"{attr}: expected a rational constant, got {v!r}")
        if dom == "C" and not isinstance(v, str):
            raise FormulaTypeError(f"{attr}: expected a string constant, got {v!r}")
    if op in ("<", ">", "<=", ">=") and dom == "C":
        raise FormulaTypeError(f"{attr}: order comparison on a C attribute")
    if op in ("<=", ">="):
        strict = atom_formula(schema, attr, op[0], lhs, rhs)
        equal = atom_formula(schema, attr, "=", lhs, rhs)
        return disj(strict, equal)
    if op not in ("=", "!=", "<", ">"):
        raise ValidationError(f"unknown comparison {op!r}")
    res = _norm_atom(attr, op, lhs, rhs)
    if res is True:
        return true_formula(schema)
    if res is False:
        return false_formula(schema)
    return DnfFormula(schema, (frozenset((res,)),))


def tuple_eq(schema: Schema, var_a: str, var_b: str) -> DnfFormula:
    atoms = []
    for att in schema.attributes:
        res = _norm_atom(att.name, "=", vterm(var_a), vterm(var_b))
        if res is True:
            continue
        if res is False:
            return false_formula(schema)
        atoms.append(res)
    return DnfFormula(schema, (frozenset(atoms),))


# ---------------------------------------------------------------------------
# canonical conjunct form


class _Unsat(Exception):
    pass


def _canon_conjunct(schema: Schema, atoms: Iterable[Atom]) -> Optional[frozenset]:
    """Canonicalize one conjunct; None when unsatisfiable."""
    by_attr: dict = {}
    for a in atoms:
        by_attr.setdefault(a.attr, []).append(a)
    out: list = []
    try:
        for attr in sorted(by_attr):
            group = by_attr[attr]
            if schema.domain(attr) == "Q":
                out.extend(_canon_group_q(attr, group))
            else:
                out.extend(_canon_group_c(attr, group))
    except _Unsat:
        return None
    return frozenset(out)


def _classes(group: list[Atom]):
    """Union-find over '=' atoms; raises on two distinct constants in a class."""
    parent: dict = {}

    def find(t):
        while parent.get(t, t) != t:
            parent[t] = parent.get(parent[t], parent[t])
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    terms = set()
    for a in group:
        terms.add(a.lhs)
        terms.add(a.rhs)
        if a.op == "=":
            union(a.lhs, a.rhs)

    classes: dict = {}
    for t in terms:
        classes.setdefault(find(t), []).append(t)

    rep_of: dict = {}
    spans: list[tuple[Term, Term]] = []
    for members in classes.values():
        consts = [t for t in members if t[0] == "c"]
        if len({c[1] for c in consts}) > 1:
            raise _Unsat
        rep = consts[0] if consts else min(members, key=_term_key)
        for t in members:
            rep_of[t] = rep
            if t != rep:
                spans.append((t, rep))
    return rep_of, spans


def _emit(attr, op, lhs, rhs, sink):
    res = _norm_atom(attr, op, lhs, rhs)
    if res is False:
        raise _Unsat
    if res is not True:
        sink.add(res)


def _canon_group_q(attr: str, group: list[Atom]) -> set:
    rep_of, spans = _classes(group)
    rewritten: set = set()
    for a in group:
        if a.op == "=":
            continue
        _emit(attr, a.op, rep_of[a.lhs], rep_of[a.rhs], rewritten)

    # Strict-order digraph over representatives; constants carry their value.
    edges: set = set()
    consts: set = set()
    lowers: dict = {}
    uppers: dict = {}
    neq_const: dict = {}
    neq_var: set = set()
    for a in rewritten:
        lo, hi = a.lhs, a.rhs
        if a.op == ">":
            lo, hi = hi, lo
        if a.op in ("<", ">"):
            edges.add((lo, hi))
            for t in (lo, hi):
                if t[0] == "c":
                    consts.add(t[1])
            if lo[0] == "c" and hi[0] == "v":
                cur = lowers.get(hi)
                if cur is None or lo[1] > cur:
                    lowers[hi] = lo[1]
            if lo[0] == "v" and hi[0] == "c":
                cur = uppers.get(lo)
                if cur is None or hi[1] < cur:
                    uppers[lo] = hi[1]
        elif a.op == "!=":
            if a.rhs[0] == "c":
                neq_const.setdefault(a.lhs, set()).add(a.rhs[1])
                consts.add(a.rhs[1])
            else:
                neq_var.add((a.lhs, a.rhs))

    ordered = sorted(consts)
    for c1, c2 in zip(ordered, ordered[1:]):
        edges.add((cterm(c1), cterm(c2)))

    if _has_cycle(edges):
        raise _Unsat

    out: set = set()
    for t, rep in spans:
        _emit(attr, "=", t, rep, out)
    for lo, hi in edges:
        if lo[0] == "c" and hi[0] == "c":
            continue
        if lo[0] == "c" and hi[0] == "v" and lowers.get(hi) != lo[1]:
            continue  # dominated lower bound
        if lo[0] == "v" and hi[0] == "c" and uppers.get(lo) != hi[1]:
            continue  # dominated upper bound
        _emit(attr, "<", lo, hi, out)
    for v, vals in neq_const.items():
        lo, hi = lowers.get(v), uppers.get(v)
        for c in sorted(vals):
            if lo is not None and c <= lo:
                continue
            if hi is not None and c >= hi:
                continue
            _emit(attr, "!=", v, cterm(c), out)
    for a, b in neq_var:
        _emit(attr, "!=", a, b, out)
    return out


def _has_cycle(edges: set) -> bool:
    succ: dict = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    state: dict = {}
    for start in succ:
        if state.get(start):
            continue
        stack = [(start, iter(succ.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                s = state.get(nxt)
                if s == 1:
                    return True
                if s is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
    return False


def _canon_group_c(attr: str, group: list[Atom]) -> set:
    rep_of, spans = _classes(group)
    out: set = set()
    for t, rep in spans:
        _emit(attr, "=", t, rep, out)
    for a in group:
        if a.op == "=":
            continue
        if a.op != "!=":
            raise FormulaTypeError(f"{attr}: order comparison on a C attribute")
        ra, rb = rep_of[a.lhs], rep_of[a.rhs]
        if ra == rb:
            raise _Unsat
        _emit(attr, "!=", ra, rb, out)
    return out


def _prune(conjuncts: list[frozenset]) -> list[frozenset]:
    """Dedup and drop disjuncts that are supersets of another (subsumed)."""
    uniq = sorted(set(conjuncts), key=len)
    kept: list = []
    for c in uniq:
        if any(k <= c for k in kept):
            continue
        kept.append(c)
    kept.sort(key=lambda c: sorted(map(_atom_key, c)))
    return kept


# ---------------------------------------------------------------------------
# boolean combinations


def disj(*fs: DnfFormula) -> DnfFormula:
    schema = fs[0].schema
    out = []
    for f in fs:
        out.extend(f.disjuncts)
    return DnfFormula(schema, out)


def conj(*fs: DnfFormula) -> DnfFormula:
    schema = fs[0].schema
    acc = [frozenset()]
    for f in fs:
        if f.is_false:
            return false_formula(schema)
        nxt = []
        for c1 in acc:
            for c2 in f.disjuncts:
                merged = _canon_conjunct(schema, c1 | c2)
                if merged is not None:
                    nxt.append(merged)
        if len(nxt) > MAX_ATOMS:
            raise FormulaSizeLimit("conjunction blew the disjunct budget")
        acc = nxt
        if not acc:
            return false_formula(schema)
    return DnfFormula(schema, acc)


def _negate_atom(atom: Atom) -> list[Atom]:
    if atom.op == "=":
        return [atom._replace(op="!=")]
    if atom.op == "!=":
        return [atom._replace(op="=")]
    if atom.op == "<":
        return [atom._replace(op=">"), atom._replace(op="=")]
    return [atom._replace(op="<"), atom._replace(op="=")]


def _insert_leaf(out: list, c: frozenset, budget: int) -> None:
    """Keep ``out`` free of subsumed conjuncts while it grows."""
    for k in out:
        if k <= c:
            return
    out[:] = [k for k in out if not (c <= k)]
    out.append(c)
    if len(out) > budget:
        raise FormulaSizeLimit("negation blew the disjunct budget")


def _and_not_leaves(schema, conjunct, disjuncts, out, budget):
    """Append satisfiable canonical conjuncts of conjunct ∧ ¬(∨ disjuncts).

    One conjunct a1 ∧ ... ∧ am is negated by sequential expansion:
    ¬a1 ∨ (a1 ∧ ¬a2) ∨ ... — the branches are disjoint and the growing
    positive context kills most of them early against the next conjunct.
    """
    if not disjuncts:
        _insert_leaf(out, conjunct, budget)
        return
    head, rest = disjuncts[0], disjuncts[1:]
    ctx = conjunct
    for a in sorted(head, key=_atom_key):
        for neg in _negate_atom(a):
            c2 = _canon_conjunct(schema, ctx | {neg})
            if c2 is not None:
                _and_not_leaves(schema, c2, rest, out, budget)
        ctx = _canon_conjunct(schema, ctx | {a})
        if ctx is None:
            return  # head impossible from here on; branches above covered it
    # ctx now implies head, hence falls inside g: drop it


def and_not(f: DnfFormula, g: DnfFormula) -> DnfFormula:
    """f ∧ ¬g without materializing ¬g as a whole."""
    if g.is_false:
        return f
    if g.is_true:
        return false_formula(f.schema)
    out: list = []
    for c in f.disjuncts:
        _and_not_leaves(f.schema, c, list(g.disjuncts), out, MAX_ATOMS)
    return DnfFormula(f.schema, out)


def negate(f: DnfFormula) -> DnfFormula:
    return and_not(true_formula(f.schema), f)


def _conj_implies(schema, conjunct, g: DnfFormula) -> bool:
    """conjunct ⇒ g, decided by failure to find a sat leaf of conjunct ∧ ¬g."""

    def walk(c, disjuncts):
        if not disjuncts:
            return True  # found a satisfiable leaf
        head, rest = disjuncts[0], disjuncts[1:]
        ctx = c
        for a in sorted(head, key=_atom_key):
            for neg in _negate_atom(a):
                c2 = _canon_conjunct(schema, ctx | {neg})
                if c2 is not None and walk(c2, rest):
                    return True
            ctx = _canon_conjunct(schema, ctx | {a})
            if ctx is None:
                return False
        return False

    return not walk(conjunct, list(g.disjuncts))


def implies(f: DnfFormula, g: DnfFormula) -> bool:
    return all(_conj_implies(f.schema, c, g) for c in f.disjuncts)


def equivalent(f: DnfFormula, g: DnfFormula) -> bool:
    if f.schema != g.schema:
        raise ValidationError("equivalence across different schemas")
    if set(f.disjuncts) == set(g.disjuncts):
        return True
    return implies(f, g) and implies(g, f)


def rename(f: DnfFormula, mapping: dict) -> DnfFormula:
    def sub(t: Term) -> Term:
        if t[0] == "v" and t[1] in mapping:
            return vterm(mapping[t[1]])
        return t

    out = []
    for d in f.disjuncts:
        atoms = []
        dead = False
        for a in d:
            res = _norm_atom(a.attr, a.op, sub(a.lhs), sub(a.rhs))
            if res is False:
                dead = True
                break
            if res is not True:
                atoms.append(res)
        if not dead:
            out.append(frozenset(atoms))
    return DnfFormula(f.schema, out)


# ---------------------------------------------------------------------------
# quantifier elimination


def exists(f: DnfFormula, var: str) -> DnfFormula:
    """Eliminate one tuple variable existentially; exact over Q and C."""
    out = []
    for d in f.disjuncts:
        out.append(_eliminate_conjunct(f.schema, d, var))
    return DnfFormula(f.schema, [c for c in out if c is not None])


def _eliminate_conjunct(schema: Schema, conjunct: frozenset, var: str) -> Optional[frozenset]:
    keep: set = set()
    involved: dict = {}
    for a in conjunct:
        if (a.lhs[0] == "v" and a.lhs[1] == var) or (a.rhs[0] == "v" and a.rhs[1] == var):
            involved.setdefault(a.attr, []).append(a)
        else:
            keep.add(a)
    try:
        for attr, group in involved.items():
            dom = schema.domain(attr)
            me = vterm(var)
            eqs: list = []
            lowers: list = []
            uppers: list = []
            neqs: list = []
            for a in group:
                other = a.rhs if (a.lhs == me) else a.lhs
                if a.op == "=":
                    eqs.append(other)
                elif a.op == "!=":
                    neqs.append(other)
                else:
                    # a.op orients lhs against rhs; find var's side
                    if a.op == "<":
                        lo, hi = a.lhs, a.rhs
                    else:
                        lo, hi = a.rhs, a.lhs
                    if lo == me:
                        uppers.append(hi)
                    else:
                        lowers.append(lo)
            if eqs:
                t0 = min(eqs, key=_term_key)  # constants sort after vars; prefer const
                consts = [t for t in eqs if t[0] == "c"]
                if consts:
                    t0 = consts[0]
                for t in eqs:
                    if t != t0:
                        _emit(attr, "=", t0, t, keep)
                for t in lowers:
                    _emit(attr, "<", t, t0, keep)
                for t in uppers:
                    _emit(attr, "<", t0, t, keep)
                for t in neqs:
                    _emit(attr, "!=", t0, t, keep)
            elif dom == "Q":
                for lo in lowers:
                    for hi in uppers:
                        _emit(attr, "<", lo, hi, keep)
                # disequalities alone never block a witness in a dense order
            # C with no equality: finitely many exclusions over an infinite
            # domain always leave a witness; nothing to emit
    except _Unsat:
        return None
    return _canon_conjunct(schema, keep)


def forall(f: DnfFormula, var: str) -> DnfFormula:
    return negate(exists(negate(f), var))


def qe_eliminate(f: DnfFormula, var: str, mode: str = "EXISTS") -> DnfFormula:
    if mode == "EXISTS":
        return exists(f, var)
    if mode == "FORALL":
        return forall(f, var)
    raise ValidationError(f"unknown QE mode {mode!r}")


def project_side(f: DnfFormula, side: str) -> DnfFormula:
    """Start/end node set of a two-variable relation formula over L and R.

    The result is a one-variable formula over L by convention.
    """
    if side in ("S", "LEFT", "start", "starts"):
        return exists(f, "R")
    if side in ("E", "RIGHT", "end", "ends"):
        return rename(exists(f, "L"), {"R": "L"})
    raise ValidationError(f"project_side: side must be LEFT or RIGHT, got {side!r}")


# ---------------------------------------------------------------------------
# evaluation and witnesses


def eval_formula(f: DnfFormula, assignment: dict) -> bool:
    """assignment: var name -> {attr: value}."""
    for d in f.disjuncts:
        if all(_eval_atom(a, assignment) for a in d):
            return True
    return False


def _term_value(t: Term, assignment: dict, attr: str):
    if t[0] == "c":
        return t[1]
    return assignment[t[1]][attr]


def _eval_atom(a: Atom, assignment: dict) -> bool:
    x = _term_value(a.lhs, assignment, a.attr)
    y = _term_value(a.rhs, assignment, a.attr)
    if a.op == "=":
        return x == y
    if a.op == "!=":
        return x != y
    if a.op == "<":
        return x < y
    return x > y


def eval_pair(f: DnfFormula, left: dict, right: dict) -> bool:
    left = f.schema.coerce_tuple(left)
    right = f.schema.coerce_tuple(right)
    return eval_formula(f, {"L": left, "R": right})


def satisfiable(f: DnfFormula, variables: Optional[Iterable[str]] = None):
    """A witness assignment for the first satisfiable disjunct, else None."""
    if f.is_false:
        return None
    names = set(variables or ()) | set(f.variables())
    if not names:
        names = {"L"}
    return _conjunct_witness(f.schema, f.disjuncts[0], sorted(names))


def _conjunct_witness(schema: Schema, conjunct: frozenset, names: list[str]) -> dict:
    assignment: dict = {v: {} for v in names}
    by_attr: dict = {}
    for a in conjunct:
        by_attr.setdefault(a.attr, []).append(a)
    fresh = 0
    for att in schema.attributes:
        group = by_attr.get(att.name, [])
        rep_of, _spans = _classes(group)
        if att.domain == "Q":
            values = _witness_values_q(group, rep_of)
        else:
            values = {}
            taken = {t[1] for t in rep_of if t[0] == "c"}
            for rep in sorted(set(rep_of.values()), key=_term_key):
                if rep[0] == "c":
                    values[rep] = rep[1]
                else:
                    while f"w{fresh}" in taken:
                        fresh += 1
                    values[rep] = f"w{fresh}"
                    fresh += 1
        for v in names:
            t = vterm(v)
            rep = rep_of.get(t)
            if rep is None:
                assignment[v][att.name] = Fraction(0) if att.domain == "Q" else f"w{fresh}"
                if att.domain == "C":
                    fresh += 1
            else:
                assignment[v][att.name] = values[rep]
    return assignment


def _witness_values_q(group: list[Atom], rep_of: dict) -> dict:
    """Distinct rational values per representative, respecting order atoms."""
    reps = sorted(set(rep_of.values()), key=_term_key)
    edges: set = set()
    for a in group:
        if a.op not in ("<", ">"):
            continue
        lo, hi = (a.lhs, a.rhs) if a.op == "<" else (a.rhs, a.lhs)
        edges.add((rep_of[lo], rep_of[hi]))
    consts = sorted(t[1] for t in reps if t[0] == "c")
    for c1, c2 in zip(consts, consts[1:]):
        edges.add((cterm(c1), cterm(c2)))
    succ: dict = {}
    indeg: dict = {r: 0 for r in reps}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    # Kahn with deterministic tie-break; constants ordered by value via edges.
    ready = sorted((r for r, d in indeg.items() if d == 0), key=_term_key)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for m in sorted(succ.get(n, ()), key=_term_key):
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
        ready.sort(key=_term_key)
    # Assign strictly increasing values along the order, constants pinned.
    values: dict = {}
    pending: list = []
    prev: Optional[Fraction] = None

    def flush(upto: Optional[Fraction]):
        nonlocal prev
        k = len(pending)
        if not k:
            prev = upto if upto is not None else prev
            return
        if prev is None and upto is None:
            base = Fraction(0)
            for i, t in enumerate(pending):
                values[t] = base + i
            prev = base + k - 1
        elif prev is None:
            for i, t in enumerate(pending):
                values[t] = upto - (k - i)
            prev = upto
        elif upto is None:
            for i, t in enumerate(pending):
                values[t] = prev + i + 1
            prev = prev + k
        else:
            step = (upto - prev) / (k + 1)
            for i, t in enumerate(pending):
                values[t] = prev + step * (i + 1)
            prev = upto
        pending.clear()

    for t in order:
        if t[0] == "c":
            flush(t[1])
            values[t] = t[1]
        else:
            pending.append(t)
    flush(None)
    return values
