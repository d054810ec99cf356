"""Tree-child phylogenetic networks, agreement digraphs, and SNPR distances."""

__version__ = "0.1.0"

from .errors import (
    SnprLabError,
    ParseError,
    InvalidNetworkError,
    InvalidDigraphError,
    MoveError,
    EmbeddingError,
    BudgetExceededError,
    ContractViolationError,
)
from .netcore import (
    Edge,
    Network,
    TreeChildReport,
    validate,
    network_violations,
    tree_child_report,
    is_tree_child,
    canonical_signature,
    canonical_order,
    isomorphic,
    isomorphism_map,
    delete_reticulation_edge,
    random_network,
    random_tree_child,
    enumerate_tree_child,
    rooted_tree_count,
)
from .digraphcore import (
    LeafDigraph,
    PhyloDigraph,
    validate_component,
    validate_digraph,
    is_tree_child_digraph,
    quotient,
    singleton_digraph,
    network_as_digraph,
    digraph_signature,
    digraph_isomorphic,
)
from .phyloio import (
    parse_enewick,
    write_enewick,
    parse_pnd,
    write_pnd,
    parse_digraph_pnd,
    write_digraph_pnd,
    write_extension_pnd,
    write_witness_bundle,
)
from .snpr import (
    Move,
    MoveSequence,
    NeighborCache,
    WEIGHTS,
    apply_move,
    apply_move_detailed,
    enumerate_moves,
    sequence_weight,
    enforce_global_assumption,
    normalize_sequence,
    dtc,
    moves_to_json,
    moves_from_json,
)
from .embed import (
    Embedding,
    Extension,
    ExtensionPolicy,
    find_embedding,
    enumerate_embeddings,
    embedding_violations,
    extension_violations,
    extend,
    root_extend,
    cut_size,
    digraph_cut_size,
    to_root_extension,
    root_path,
    path_extension,
    transfer_extension,
)
from .agreement import (
    AgreementWitness,
    BoundsReport,
    candidate_from_edges,
    enumerate_agreement_digraphs,
    mtc,
    check_bounds,
    maf_rspr,
    gap_witness_search,
)

__all__ = [
    "SnprLabError", "ParseError", "InvalidNetworkError", "InvalidDigraphError",
    "MoveError", "EmbeddingError", "BudgetExceededError", "ContractViolationError",
    "Edge", "Network", "TreeChildReport", "validate", "network_violations",
    "tree_child_report", "is_tree_child", "canonical_signature", "canonical_order",
    "isomorphic", "isomorphism_map", "delete_reticulation_edge", "random_network",
    "random_tree_child", "enumerate_tree_child", "rooted_tree_count",
    "LeafDigraph", "PhyloDigraph", "validate_component", "validate_digraph",
    "is_tree_child_digraph", "quotient", "singleton_digraph", "network_as_digraph",
    "digraph_signature", "digraph_isomorphic",
    "parse_enewick", "write_enewick", "parse_pnd", "write_pnd",
    "parse_digraph_pnd", "write_digraph_pnd", "write_extension_pnd",
    "write_witness_bundle",
    "Move", "MoveSequence", "NeighborCache", "WEIGHTS", "apply_move",
    "apply_move_detailed", "enumerate_moves", "sequence_weight",
    "enforce_global_assumption", "normalize_sequence", "dtc",
    "moves_to_json", "moves_from_json",
    "Embedding", "Extension", "ExtensionPolicy", "find_embedding",
    "enumerate_embeddings", "embedding_violations", "extension_violations",
    "extend", "root_extend", "cut_size", "digraph_cut_size",
    "to_root_extension", "root_path", "path_extension", "transfer_extension",
    "AgreementWitness", "BoundsReport", "candidate_from_edges",
    "enumerate_agreement_digraphs", "mtc", "check_bounds", "maf_rspr",
    "gap_witness_search",
]
