"""Extremal hypergraph constructions, pattern detection, and exact
Turán-type search, with the number-theoretic supports they lean on."""

from .errors import (BaseNotFreeError, BudgetError, InvariantViolation,
                     ParameterError, ParseError, QturanError, StructureError)
from .hypergraphs import (Hypergraph, Partition, VertexSetT, kpartite_reduce,
                          link, load_hypergraph, read_hg, read_hg_json,
                          save_hypergraph, shadow, write_hg, write_hg_json)
from .patterns import (AuditReport, DSet, IPattern, QEmbedding, QPattern,
                       all_d_sets, d_set, find_I_copy, find_Q_copy,
                       generate_I, generate_Q, shadow_clique_audit)
from .numbers import (APFreeSet, GoodSet, GoodSetViolation, Packing,
                      behrend_good_set, exact_max_packing, greedy_packing,
                      is_ap_free, is_k_good, max_ap_free, max_good_set)
from .constructions import (LiftConfig, ModularConfig, SplitConfig,
                            centered_family, construct_lift,
                            construct_modular, construct_split,
                            modular_membership, prime_select)
from .turan import (BESParams, ChainReport, ForbiddenFamily, GrowthRow,
                    SearchResult, TrendRow, bes_family, density_trend,
                    ex_exact, growth_csv, growth_table, monotone_chain_check)
from .cli import ExitStatus, PatternSpec, main

__version__ = "0.1.0"

__all__ = [
    "APFreeSet", "AuditReport", "BESParams", "BaseNotFreeError", "BudgetError",
    "ChainReport", "DSet", "ExitStatus", "ForbiddenFamily", "GoodSet",
    "GoodSetViolation", "GrowthRow", "Hypergraph", "IPattern",
    "InvariantViolation", "LiftConfig", "ModularConfig", "Packing",
    "ParameterError", "ParseError", "Partition", "PatternSpec", "QEmbedding",
    "QPattern", "QturanError", "SearchResult", "SplitConfig", "StructureError",
    "TrendRow", "VertexSetT", "all_d_sets", "behrend_good_set", "bes_family",
    "centered_family", "construct_lift", "construct_modular",
    "construct_split", "d_set", "density_trend", "ex_exact", "exact_max_packing",
    "find_I_copy", "find_Q_copy", "generate_I", "generate_Q", "greedy_packing",
    "growth_csv", "growth_table", "is_ap_free", "is_k_good", "kpartite_reduce",
    "link", "load_hypergraph", "main", "max_ap_free", "max_good_set",
    "modular_membership", "monotone_chain_check", "prime_select", "read_hg",
    "read_hg_json", "save_hypergraph", "shadow", "shadow_clique_audit",
    "write_hg", "write_hg_json",
]
