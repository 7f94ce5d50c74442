"""Contraction engine for strict-partial-order preference relations.

Preferences come in two representations: finite edge sets
(``FiniteRelation``) and two-variable DNF formulas over a typed schema
(``DnfFormula``). Both support the same operations: cutting a set of
preferences out while keeping the remainder a strict partial order
(prefix, protecting, and meet contraction), testing fullness and
minimality of a cut, and answering dominance queries over datasets.
"""

from .errors import (
    ConNotSubset,
    DatasetError,
    DuplicateKey,
    FormulaParseError,
    FormulaSizeLimit,
    IterationCap,
    MixedSignSet,
    NotFinitelyStratifiable,
    NotStrictPartialOrder,
    OracleTooLarge,
    PrefconError,
    ProtectionConflict,
    ProtectNotSubset,
    SkylineSpecError,
    ValidationError,
)
from .formula import (
    Attribute,
    DnfFormula,
    Schema,
    and_not,
    atom_formula,
    conj,
    disj,
    equivalent,
    eval_pair,
    exists,
    false_formula,
    forall,
    implies,
    negate,
    parse_formula,
    project_side,
    rename,
    satisfiable,
    to_source,
    true_formula,
    tuple_eq,
)
from .relation import (
    EMPTY,
    Edge,
    FiniteRelation,
    SpoReport,
    boundary_sets,
    dump_edges,
    load_edges,
    spo_check,
    transitive_closure,
)
from .contract import (
    FAILURE,
    ContractionResult,
    StratifiabilityReport,
    SymbolicContractionResult,
    check_finitely_stratifiable,
    check_full_contractor,
    check_minimal_contractor,
    check_minimal_symbolic,
    enumerate_minimal_contractors,
    layer_indices,
    meet_contr,
    meet_contr_protecting,
    meet_contr_symbolic,
    min_contr_finite,
    min_contr_protecting,
    min_contr_protecting_symbolic,
    min_contr_symbolic,
    naive_contractor,
    restricted_change,
    tc_symbolic,
)
from .winnow import (
    Dataset,
    DatasetRow,
    WinnowStrategy,
    dump_dataset,
    load_dataset,
    skyline_relation,
    winnow,
    winnow_after_contraction,
)

__version__ = "0.1.0"
