"""Cayley-graph search: exact optima, witnesses, extremes, engine parity."""
from __future__ import annotations

import random

import pytest

from revsynth.chains import build_chain, group_order
from revsynth.gates import (
    DEFAULT_COST_MODEL,
    Circuit,
    CostModel,
    Gate,
    GateLibrary,
    circuit_cost,
    circuit_perm,
    format_circuit,
    format_gate,
    gate_perm,
    nft_library,
    parse_gate,
    parse_library,
    sublibrary_from_mask,
)
from revsynth.perms import Permutation, Specification, identity, parse_cycles, perm_to_spec
from revsynth.search import (
    CayleyCensus,
    StateSpaceError,
    UnreachableError,
    _sparse_search,
    bfs_census,
    dijkstra_census,
    library_extremes,
    ss_synthesize,
    synthesize,
)

from .oracles import cheapest_costs, closure, shortest_lengths

NFT = nft_library(3)
EXAMPLE = parse_cycles("(1,7)(2,5)(3,6,8,4)", 8)


def test_full_library_length_distribution():
    census = bfs_census(NFT)
    assert census.reachable_count == 40320
    assert census.distribution() == {
        1: 12, 2: 102, 3: 625, 4: 2780, 5: 8921, 6: 17049, 7: 10253, 8: 577,
    }


def test_full_library_cost_distribution_spot_values():
    census = dijkstra_census(NFT)
    dist = census.distribution()
    assert dist[0] == 7
    assert max(dist) == 17
    assert sum(dist.values()) == 40319


def test_identity_is_free():
    census = bfs_census(NFT)
    ident = identity(8)
    assert census.value(ident) == 0
    assert census.companion(ident) == 0
    assert census.witness(ident).gates == ()


def test_example_spec_optima():
    lengths = bfs_census(NFT)
    costs = dijkstra_census(NFT)
    assert lengths.value(EXAMPLE) == 7
    assert lengths.companion(EXAMPLE) == 17
    assert costs.value(EXAMPLE) == 17
    assert costs.companion(EXAMPLE) == 7


def test_example_spec_witness_is_frozen_and_valid():
    census = bfs_census(NFT)
    witness = census.witness(EXAMPLE)
    assert format_circuit(witness) == "T123,N1,F12,F32,T321,N3,T123"
    assert circuit_perm(witness) == EXAMPLE
    assert circuit_cost(witness) == 17


def test_toffoli_min_cost_is_five():
    census = dijkstra_census(NFT)
    assert census.value(gate_perm(parse_gate("T123"), 3)) == 5


def test_synthesize_results():
    spec = Specification((2, 6, 5, 4, 7, 1, 0, 3))
    by_length = synthesize(spec, NFT)
    assert (by_length.value, by_length.companion) == (5, 12)
    assert format_circuit(by_length.witness) == "T132,F21,N2,T321,F13"
    assert circuit_perm(by_length.witness) == spec_perm(spec)
    by_cost = synthesize(spec, NFT, objective="cost")
    assert (by_cost.value, by_cost.companion) == (11, 6)
    assert circuit_cost(by_cost.witness) == 11
    assert len(by_cost.witness.gates) == 6
    with pytest.raises(ValueError):
        synthesize(spec, NFT, objective="speed")


def spec_perm(spec):
    from revsynth.perms import spec_to_perm

    return spec_to_perm(spec)


def test_nonmember_raises_unreachable():
    census = bfs_census(parse_library("N1", 3))
    assert census.reachable_count == 2
    with pytest.raises(UnreachableError):
        census.value(EXAMPLE)


def test_wrong_point_count_rejected():
    census = bfs_census(NFT)
    with pytest.raises(ValueError, match="points"):
        census.value(identity(4))


def test_library_extremes_full_nft():
    lengths = library_extremes(bfs_census(NFT))
    assert lengths.value == 8
    assert len(lengths.achievers) == 577
    assert lengths.companions[0] == 20
    costs = library_extremes(dijkstra_census(NFT))
    assert costs.value == 17
    assert costs.companions[0] == 5


def test_library_extremes_small_libraries():
    for name in ("N1", "F13", "T321"):
        single = library_extremes(bfs_census(parse_library(name, 3)))
        assert single.value == 1
        assert len(single.achievers) == 1
    triple = library_extremes(bfs_census(parse_library("N1,N2,N3", 3)))
    assert triple.value == 3
    assert len(triple.achievers) == 1
    swap_pair = bfs_census(parse_library("F12,F21", 3))
    assert swap_pair.reachable_count == 6
    assert library_extremes(swap_pair).value == 3


def test_two_wire_library():
    lib = nft_library(2)
    lengths = bfs_census(lib)
    costs = dijkstra_census(lib)
    assert lengths.reachable_count == 24
    assert lengths.distribution() == {1: 4, 2: 9, 3: 7, 4: 3}
    assert costs.distribution() == {0: 3, 1: 8, 2: 8, 3: 4}


def test_unit_costs_make_both_objectives_agree():
    unit = CostModel((1, 1, 1))
    lib = sublibrary_from_mask(NFT, 0x2B5)
    lengths = bfs_census(lib, unit)
    costs = dijkstra_census(lib, unit)
    assert lengths.distribution(paired=True) == costs.distribution(paired=True)
    for perm in random.Random(3).sample(list(lengths.reachable_permutations()), 40):
        assert lengths.value(perm) == costs.value(perm) == lengths.companion(perm)


def _census_against_oracles(mask):
    lib = sublibrary_from_mask(NFT, mask)
    images = [gate_perm(g, 3).images for g in lib.gates]
    weights = [DEFAULT_COST_MODEL.gate_cost(g) for g in lib.gates]
    lengths = bfs_census(lib)
    costs = dijkstra_census(lib)
    want_len = shortest_lengths(images)
    want_cost = cheapest_costs(images, weights)
    assert lengths.reachable_count == len(want_len)
    assert costs.reachable_count == len(want_cost)
    sample = random.Random(mask).sample(sorted(want_len), min(60, len(want_len)))
    for state in sample:
        perm = Permutation(state)
        assert lengths.value(perm) == want_len[state]
        assert costs.value(perm) == want_cost[state]


def test_censuses_match_naive_oracles_on_random_sublibraries():
    rng = random.Random(11)
    for mask in rng.sample(range(1, 4096), 4):
        _census_against_oracles(mask)
    _census_against_oracles(0x7)
    _census_against_oracles(0xFFF)


def test_reachable_set_matches_stabilizer_chain_order():
    rng = random.Random(23)
    for mask in rng.sample(range(1, 4096), 6):
        lib = sublibrary_from_mask(NFT, mask)
        chain = build_chain(
            [(gate_perm(g, 3), format_gate(g)) for g in lib.gates])
        assert bfs_census(lib).reachable_count == group_order(chain)


def test_witness_is_lexicographically_smallest_optimal_sequence():
    lib = parse_library("N2,F12,T321", 3)
    census = bfs_census(lib)
    gates = list(lib.gates)
    images = [gate_perm(g, 3).images for g in gates]

    def brute_best(target, depth):
        best = None
        stack = [((), tuple(range(1, 9)))]
        for seq, cur in stack:
            if len(seq) == depth:
                continue
            for i, im in enumerate(images):
                nxt = tuple(im[x - 1] for x in cur)
                stack.append((seq + (i,), nxt))
                if nxt == target and len(seq) + 1 == depth:
                    cand = seq + (i,)
                    if best is None or cand < best:
                        best = cand
        return best

    for perm in list(census.reachable_permutations())[1:20]:
        depth = census.value(perm)
        if depth > 4:
            continue
        got = tuple(gates.index(g) for g in census.witness(perm).gates)
        assert got == brute_best(perm.images, depth)


def test_every_witness_realizes_its_target_exhaustively():
    census = bfs_census(NFT)
    sampled = random.Random(5).sample(list(census.reachable_permutations()), 300)
    for perm in sampled:
        witness = census.witness(perm)
        assert circuit_perm(witness) == perm
        assert len(witness.gates) == census.value(perm)
        assert circuit_cost(witness) == census.companion(perm)


def test_cost_witnesses_hit_value_and_companion():
    census = dijkstra_census(NFT)
    sampled = random.Random(6).sample(list(census.reachable_permutations()), 120)
    for perm in sampled:
        witness = census.witness(perm)
        assert circuit_perm(witness) == perm
        assert circuit_cost(witness) == census.value(perm)
        assert len(witness.gates) == census.companion(perm)


def test_determinism_two_runs_identical():
    first = bfs_census(sublibrary_from_mask(NFT, 0x93F))
    second = bfs_census(sublibrary_from_mask(NFT, 0x93F))
    assert (first._dist == second._dist).all()
    assert (first._comp == second._comp).all()
    assert (first._pred == second._pred).all()


def test_sparse_engine_agrees_with_dense():
    lib = sublibrary_from_mask(NFT, 0x5A7)
    dense = bfs_census(lib)
    images = [gate_perm(g, 3).images for g in lib.gates]
    weights = [(1, DEFAULT_COST_MODEL.gate_cost(g)) for g in lib.gates]
    best, _pred = _sparse_search(images, weights, 8)
    assert len(best) == dense.reachable_count
    for state, (value, companion) in best.items():
        perm = Permutation(state)
        assert dense.value(perm) == value
        assert dense.companion(perm) == companion


def test_sparse_engine_cost_objective_agrees_with_dense():
    lib = sublibrary_from_mask(NFT, 0x1C6)
    dense = dijkstra_census(lib)
    images = [gate_perm(g, 3).images for g in lib.gates]
    weights = [(DEFAULT_COST_MODEL.gate_cost(g), 1) for g in lib.gates]
    best, _pred = _sparse_search(images, weights, 8)
    assert len(best) == dense.reachable_count
    for state, (value, companion) in best.items():
        perm = Permutation(state)
        assert dense.value(perm) == value
        assert dense.companion(perm) == companion


def test_four_wire_library_uses_sparse_engine():
    lib = GateLibrary(4, (Gate((), 1), Gate((1,), 2)))
    census = bfs_census(lib)
    assert census.reachable_count == 8
    assert census.distribution() == {1: 2, 2: 2, 3: 2, 4: 1}
    chain = build_chain(
        [(gate_perm(g, 4), format_gate(g)) for g in lib.gates])
    assert census.reachable_count == group_order(chain)
    for perm in census.reachable_permutations():
        witness = census.witness(perm)
        assert circuit_perm(witness) == perm


def test_state_cap_and_oversized_spaces_rejected():
    images = [gate_perm(g, 3).images for g in NFT.gates]
    weights = [(1, 0)] * len(images)
    with pytest.raises(StateSpaceError):
        _sparse_search(images, weights, 8, cap=100)
    with pytest.raises(StateSpaceError):
        bfs_census(GateLibrary(5, (Gate((), 1),)))


def test_ss_synthesize_members_and_nonmembers():
    result = ss_synthesize(NFT, perm_to_spec(EXAMPLE))
    assert result.member
    assert circuit_perm(result.circuit) == EXAMPLE
    assert len(result.circuit.gates) >= 7

    lonely = ss_synthesize(parse_library("N1", 3), perm_to_spec(EXAMPLE))
    assert not lonely.member
    assert lonely.circuit.gates == ()

    trivial = ss_synthesize(NFT, perm_to_spec(identity(8)))
    assert trivial.member
    assert trivial.circuit.gates == ()


def test_ss_synthesize_never_beats_bfs():
    rng = random.Random(17)
    census = bfs_census(NFT)
    reachable = list(census.reachable_permutations())
    from revsynth.chains import build_chain as _bc

    chain = _bc([(gate_perm(g, 3), format_gate(g)) for g in NFT.gates])
    for perm in rng.sample(reachable, 200):
        result = ss_synthesize(NFT, perm_to_spec(perm), chain=chain)
        assert result.member
        assert circuit_perm(result.circuit) == perm
        assert len(result.circuit.gates) >= census.value(perm)
