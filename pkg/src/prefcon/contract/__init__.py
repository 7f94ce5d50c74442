"""Contraction operators: finite, symbolic, oracle, restricted change."""

from .finite import (
    MEET,
    PREFIX,
    PROTECTING,
    PROTECTING_MEET,
    ContractionResult,
    FullContractorReport,
    MinimalityReport,
    check_full_contractor,
    check_minimal_contractor,
    layer_indices,
    meet_contr,
    meet_contr_protecting,
    min_contr_finite,
    min_contr_protecting,
    naive_contractor,
    q_set,
)
from .oracle import (
    ORACLE_EDGE_LIMIT,
    enumerate_minimal_contractors,
    has_prefix_property,
    oracle_prefix_contractor,
)
from .restricted import (
    CONTRACT,
    FAILURE,
    NEGATIVE,
    POSITIVE,
    REVISE,
    Statement,
    restricted_change,
)
from .symbolic import (
    StratifiabilityReport,
    SymbolicContractionResult,
    SymbolicSpoReport,
    SymbolicStratum,
    chain_relation,
    check_finitely_stratifiable,
    check_minimal_symbolic,
    encode_edges,
    end_nodes_formula,
    get_stratum_symbolic,
    meet_contr_symbolic,
    min_contr_protecting_symbolic,
    min_contr_symbolic,
    point_formula,
    require_spo_symbolic,
    spo_check_symbolic,
    tc_symbolic,
)

__all__ = [
    "MEET",
    "PREFIX",
    "PROTECTING",
    "PROTECTING_MEET",
    "ContractionResult",
    "FullContractorReport",
    "MinimalityReport",
    "check_full_contractor",
    "check_minimal_contractor",
    "layer_indices",
    "meet_contr",
    "meet_contr_protecting",
    "min_contr_finite",
    "min_contr_protecting",
    "naive_contractor",
    "q_set",
    "ORACLE_EDGE_LIMIT",
    "enumerate_minimal_contractors",
    "has_prefix_property",
    "oracle_prefix_contractor",
    "CONTRACT",
    "FAILURE",
    "NEGATIVE",
    "POSITIVE",
    "REVISE",
    "Statement",
    "restricted_change",
    "StratifiabilityReport",
    "SymbolicContractionResult",
    "SymbolicSpoReport",
    "SymbolicStratum",
    "chain_relation",
    "check_finitely_stratifiable",
    "check_minimal_symbolic",
    "encode_edges",
    "end_nodes_formula",
    "get_stratum_symbolic",
    "meet_contr_symbolic",
    "min_contr_protecting_symbolic",
    "min_contr_symbolic",
    "point_formula",
    "require_spo_symbolic",
    "spo_check_symbolic",
    "tc_symbolic",
]
