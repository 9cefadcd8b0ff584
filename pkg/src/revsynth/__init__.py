"""Reversible-circuit synthesis toolkit.

Reversible functions on n wires are permutations of the 2^n input words;
circuits over a gate library are words in the corresponding permutation
group.  The package builds deterministic stabilizer chains for membership
and factorization, finds length- and cost-optimal circuits by exhaustive
Cayley-graph search, and runs a full census over every sub-library of the
3-wire N/F/T family, with delimited reports and figures.
"""

__version__ = "0.1.0"

from .perms import (
    CycleParseError,
    Permutation,
    Specification,
    compose,
    format_cycles,
    identity,
    inverse,
    parse_cycles,
    perm_to_spec,
    spec_to_perm,
)
from .gates import (
    Circuit,
    CostModel,
    DEFAULT_COST_MODEL,
    Gate,
    GateLibrary,
    GateSyntaxError,
    UnsupportedGateError,
    circuit_cost,
    circuit_perm,
    enumerate_sublibraries,
    format_circuit,
    format_gate,
    format_library,
    gate_perm,
    library_mask,
    nft_library,
    parse_circuit,
    parse_gate,
    parse_library,
    sublibrary_from_mask,
)
from .chains import (
    NotInGroupError,
    SiftResult,
    StabilizerChain,
    build_chain,
    chain_to_json,
    factorize,
    group_order,
    sift,
)
from .search import (
    CayleyCensus,
    FactorizationResult,
    LibraryExtremes,
    StateSpaceError,
    SynthesisResult,
    UnreachableError,
    bfs_census,
    dijkstra_census,
    library_extremes,
    ss_synthesize,
    synthesize,
)
from .census import (
    CacheError,
    CensusResult,
    LibraryRecord,
    SpecRecord,
    cost_bounds_census,
    length_bounds_census,
    library_bounds_census,
    load_cached_records,
    membership_census,
    run_census,
    universality_census,
)
from .reports import discrepancy_report, emit_report

__all__ = [
    "__version__",
    "CycleParseError", "Permutation", "Specification", "compose",
    "format_cycles", "identity", "inverse", "parse_cycles", "perm_to_spec",
    "spec_to_perm",
    "Circuit", "CostModel", "DEFAULT_COST_MODEL", "Gate", "GateLibrary",
    "GateSyntaxError", "UnsupportedGateError", "circuit_cost", "circuit_perm",
    "enumerate_sublibraries", "format_circuit", "format_gate",
    "format_library", "gate_perm", "library_mask", "nft_library",
    "parse_circuit", "parse_gate", "parse_library", "sublibrary_from_mask",
    "NotInGroupError", "SiftResult", "StabilizerChain", "build_chain",
    "chain_to_json", "factorize", "group_order", "sift",
    "CayleyCensus", "FactorizationResult", "LibraryExtremes",
    "StateSpaceError", "SynthesisResult", "UnreachableError", "bfs_census",
    "dijkstra_census", "library_extremes", "ss_synthesize", "synthesize",
    "CacheError", "CensusResult", "LibraryRecord", "SpecRecord",
    "cost_bounds_census", "length_bounds_census", "library_bounds_census",
    "load_cached_records", "membership_census", "run_census",
    "universality_census",
    "discrepancy_report", "emit_report",
]
