"""Formula-defined relations: schema, DNF core, syntax, and witnesses."""

from .core import (
    Atom,
    DnfFormula,
    MAX_ATOMS,
    and_not,
    atom_formula,
    conj,
    cterm,
    disj,
    equivalent,
    eval_formula,
    eval_pair,
    exists,
    false_formula,
    forall,
    implies,
    negate,
    project_side,
    qe_eliminate,
    rename,
    satisfiable,
    true_formula,
    tuple_eq,
    vterm,
)
from .parser import parse_formula, to_source
from .schema import Attribute, Schema, Value, value_to_text

__all__ = [
    "Atom",
    "Attribute",
    "DnfFormula",
    "MAX_ATOMS",
    "Schema",
    "Value",
    "and_not",
    "atom_formula",
    "conj",
    "cterm",
    "disj",
    "equivalent",
    "eval_formula",
    "eval_pair",
    "exists",
    "false_formula",
    "forall",
    "implies",
    "negate",
    "parse_formula",
    "project_side",
    "qe_eliminate",
    "rename",
    "satisfiable",
    "to_source",
    "true_formula",
    "tuple_eq",
    "value_to_text",
    "vterm",
]
