"""Optimal circuit synthesis by exhaustive search of a library's Cayley graph.

States are the permutations generated by a gate library; appending a gate to
a circuit is right-multiplication of its permutation, so single-source search
from the identity labels every reachable permutation with its exact optimum.
Two engines share the state space: a level-synchronous breadth-first search
for minimum length, and a bucket (Dial) uniform-cost search for minimum cost
under a cost model with small integer gate costs.  Both also record a
companion statistic, the best value of the other objective among optimal
circuits, computed by a second pass over tight edges.  Witnesses are rebuilt
greedily from the front, always taking the lowest-numbered feasible gate, so
ties resolve to the lexicographically smallest optimal gate sequence.

Point counts up to 8 use dense tables over all n_points! permutations backed
by numpy; 16 points fall back to an explicit-dictionary search that gives up
once the reachable set outgrows a fixed cap.  Larger spaces are rejected.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .chains import NotInGroupError, build_chain, factorize
from .gates import (
    DEFAULT_COST_MODEL,
    Circuit,
    CostModel,
    Gate,
    GateLibrary,
    format_gate,
    gate_perm,
)
from .perms import Permutation, Specification, identity, inverse, spec_to_perm

_INF = np.int32(2 ** 30)
_SPARSE_STATE_CAP = 2_000_000


class StateSpaceError(ValueError):
    """The permutation space is too large for exhaustive search."""


class UnreachableError(ValueError):
    """The target permutation is not generated by the library."""


class _DenseSpace:
    """Ranking tables over all permutations of up to 8 points.

    Permutations are enumerated in lexicographic image order, so the identity
    has rank 0 and the base-n_points digit keys come out pre-sorted, which
    lets rank lookup be a plain binary search.  Per-gate transition columns
    (rank of p followed by the gate, for every p) are cached by gate images.
    """

    def __init__(self, n_points: int):
        if n_points > 8:
            raise StateSpaceError(f"dense tables need n_points <= 8, got {n_points}")
        self.n_points = n_points
        self.size = math.factorial(n_points)
        self.rows = np.array(
            list(itertools.permutations(range(n_points))), dtype=np.uint8
        )
        self._powers = (n_points ** np.arange(n_points - 1, -1, -1)).astype(np.uint32)
        self.keys = self.rows.astype(np.uint32) @ self._powers
        self._cols: dict[tuple[int, ...], np.ndarray] = {}

    def rank(self, images: tuple[int, ...]) -> int:
        key = 0
        for x in images:
            key = key * self.n_points + (x - 1)
        return int(np.searchsorted(self.keys, key))

    def images_of(self, state: int) -> tuple[int, ...]:
        return tuple(int(x) + 1 for x in self.rows[state])

    def column(self, images: tuple[int, ...]) -> np.ndarray:
        col = self._cols.get(images)
        if col is None:
            gate_row = np.array(images, dtype=np.uint8) - 1
            keys = gate_row[self.rows].astype(np.uint32) @ self._powers
            col = np.searchsorted(self.keys, keys).astype(np.uint16)
            self._cols[images] = col
        return col


_SPACE_CACHE: dict[int, _DenseSpace] = {}


def _dense_space(n_points: int) -> _DenseSpace:
    space = _SPACE_CACHE.get(n_points)
    if space is None:
        space = _DenseSpace(n_points)
        _SPACE_CACHE[n_points] = space
    return space


def _dense_bfs(size, cols, costs):
    """Level-synchronous BFS: distance, then per-level companion-cost pass."""
    dist = np.full(size, _INF, dtype=np.int32)
    comp = np.full(size, _INF, dtype=np.int32)
    pred = np.full(size, -1, dtype=np.int8)
    dist[0] = 0
    comp[0] = 0
    frontier = np.array([0], dtype=np.uint16)
    level = 0
    while frontier.size:
        level += 1
        new_parts = []
        for gate_index, col in enumerate(cols):
            nxt = col[frontier]
            fresh = nxt[dist[nxt] == _INF]
            if fresh.size:
                dist[fresh] = level
                pred[fresh] = gate_index
                new_parts.append(fresh)
        if not new_parts:
            break
        for gate_index, col in enumerate(cols):
            nxt = col[frontier]
            sel = dist[nxt] == level
            if sel.any():
                targets = nxt[sel]
                cand = comp[frontier[sel]] + costs[gate_index]
                comp[targets] = np.minimum(comp[targets], cand)
        frontier = np.sort(np.concatenate(new_parts))
    return dist, comp, pred


def _dense_dial(size, cols, costs):
    """Bucketed uniform-cost search, then companion-length pass per cost class.

    Zero-cost gates close each cost class from within before its outgoing
    positive edges relax; the companion pass replays tight edges class by
    class, iterating the in-class zero edges to a fixpoint.
    """
    zero = [(g, cols[g]) for g, c in enumerate(costs) if c == 0]
    positive = [(g, cols[g], c) for g, c in enumerate(costs) if c > 0]
    dist = np.full(size, _INF, dtype=np.int32)
    pred = np.full(size, -1, dtype=np.int8)
    dist[0] = 0
    buckets: dict[int, list[np.ndarray]] = {0: [np.array([0], dtype=np.uint16)]}
    class_members: dict[int, np.ndarray] = {}
    while buckets:
        cost = min(buckets)
        pending = np.unique(np.concatenate(buckets.pop(cost)))
        frontier = pending[dist[pending] == cost]
        collected = []
        while frontier.size:
            collected.append(frontier)
            fresh_parts = []
            for gate_index, col in zero:
                nxt = col[frontier]
                fresh = nxt[dist[nxt] > cost]
                if fresh.size:
                    dist[fresh] = cost
                    pred[fresh] = gate_index
                    fresh_parts.append(fresh)
            if not fresh_parts:
                break
            frontier = np.concatenate(fresh_parts)
        if not collected:
            continue
        members = np.sort(np.concatenate(collected))
        class_members[cost] = members
        for gate_index, col, weight in positive:
            nxt = col[members]
            improved = nxt[dist[nxt] > cost + weight]
            if improved.size:
                dist[improved] = cost + weight
                pred[improved] = gate_index
                buckets.setdefault(cost + weight, []).append(improved)
    comp = np.full(size, _INF, dtype=np.int32)
    comp[0] = 0
    for cost in sorted(class_members):
        members = class_members[cost]
        for _gate_index, col, weight in positive:
            sources = class_members.get(cost - weight)
            if sources is None:
                continue
            nxt = col[sources]
            sel = dist[nxt] == cost
            if sel.any():
                targets = nxt[sel]
                comp[targets] = np.minimum(comp[targets], comp[sources[sel]] + 1)
        if zero:
            while True:
                changed = False
                for _gate_index, col in zero:
                    nxt = col[members]
                    sel = dist[nxt] == cost
                    targets = nxt[sel]
                    cand = comp[members[sel]] + 1
                    better = cand < comp[targets]
                    if better.any():
                        comp[targets[better]] = cand[better]
                        changed = True
                if not changed:
                    break
    return dist, comp, pred


def _sparse_search(gate_images, weights, n_points, cap=_SPARSE_STATE_CAP):
    """Dijkstra over explicit state tuples with lexicographic (value, companion).

    weights[i] is the (primary, companion) increment of gate i, so the same
    routine serves both objectives.  Raises StateSpaceError past the cap.
    """
    start = tuple(range(1, n_points + 1))
    best: dict[tuple[int, ...], tuple[int, int]] = {start: (0, 0)}
    pred: dict[tuple[int, ...], int] = {start: -1}
    heap = [(0, 0, start)]
    while heap:
        value, companion, state = heapq.heappop(heap)
        if (value, companion) != best[state]:
            continue
        for gate_index, images in enumerate(gate_images):
            nxt = tuple(images[x - 1] for x in state)
            cand = (value + weights[gate_index][0], companion + weights[gate_index][1])
            old = best.get(nxt)
            if old is None or cand < old:
                if old is None and len(best) >= cap:
                    raise StateSpaceError(
                        f"reachable set exceeds {cap} states; library unsupported"
                    )
                best[nxt] = cand
                pred[nxt] = gate_index
                heapq.heappush(heap, (cand[0], cand[1], nxt))
    return best, pred


class CayleyCensus:
    """Exact optima for every permutation a library generates.

    Holds per-state distance (the objective value), companion (best value of
    the other objective among optimal circuits), and the discovering gate
    index.  Dense instances cover all n_points! states with unreachable ones
    marked; sparse instances enumerate only the reachable set.
    """

    def __init__(self, library, objective, cost_model, dist, comp, pred,
                 space=None, index=None, states=None):
        self.library = library
        self.objective = objective
        self.cost_model = cost_model
        self._dist = dist
        self._comp = comp
        self._pred = pred
        self._space = space
        self._index = index
        self._states = states
        if space is not None:
            self.reachable_count = int((dist != _INF).sum())
            self._identity_state = 0
        else:
            self.reachable_count = len(states)
            self._identity_state = index[tuple(range(1, 2 ** library.n_wires + 1))]
        inv_gates = []
        for gate in library.gates:
            perm = gate_perm(gate, library.n_wires)
            inv_gates.append((gate, inverse(perm).images,
                              cost_model.gate_cost(gate)))
        self._gate_info = tuple(inv_gates)

    def _state_of(self, images: tuple[int, ...]) -> int | None:
        if self._space is not None:
            state = self._space.rank(images)
            if self._dist[state] == _INF:
                return None
            return state
        return self._index.get(images)

    def _require_state(self, perm: Permutation) -> int:
        if perm.n_points != 2 ** self.library.n_wires:
            raise ValueError(
                f"permutation acts on {perm.n_points} points, census on "
                f"{2 ** self.library.n_wires}"
            )
        state = self._state_of(perm.images)
        if state is None:
            raise UnreachableError(
                f"permutation {perm} is not generated by this library"
            )
        return state

    def value(self, perm: Permutation) -> int:
        """Exact optimum (length or cost, per the objective) for a member."""
        return int(self._dist[self._require_state(perm)])

    def companion(self, perm: Permutation) -> int:
        """Best other-objective value among optimal circuits for a member."""
        return int(self._comp[self._require_state(perm)])

    def witness(self, perm: Permutation) -> Circuit:
        """Lexicographically smallest optimal circuit realizing the member."""
        state = self._require_state(perm)
        ident = tuple(range(1, perm.n_points + 1))
        current = perm.images
        value = int(self._dist[state])
        companion = int(self._comp[state])
        gates = []
        while current != ident:
            for gate, inv_images, cost in self._gate_info:
                rest = tuple(current[inv_images[y] - 1] for y in range(len(ident)))
                rest_state = self._state_of(rest)
                if rest_state is None:
                    continue
                rest_value = int(self._dist[rest_state])
                rest_comp = int(self._comp[rest_state])
                if self.objective == "length":
                    ok = rest_value == value - 1 and rest_comp == companion - cost
                else:
                    ok = rest_value == value - cost and rest_comp == companion - 1
                if ok:
                    gates.append(gate)
                    current = rest
                    value, companion = rest_value, rest_comp
                    break
            else:
                raise AssertionError("optimal witness reconstruction got stuck")
        return Circuit(self.library.n_wires, tuple(gates))

    def distribution(self, paired: bool = False, include_identity: bool = False):
        """Histogram of optima over reachable permutations.

        Returns {value: count}, or {(value, companion): count} when paired.
        The identity is excluded unless asked for, matching the convention
        of reporting over nontrivial specifications.
        """
        if self._space is not None:
            mask = self._dist != _INF
            if not include_identity:
                mask[self._identity_state] = False
            values = self._dist[mask]
            comps = self._comp[mask]
        else:
            values = self._dist.copy()
            comps = self._comp.copy()
            if not include_identity:
                keep = np.arange(len(values)) != self._identity_state
                values = values[keep]
                comps = comps[keep]
        if paired:
            pairs = np.stack([values, comps], axis=1)
            uniq, counts = np.unique(pairs, axis=0, return_counts=True)
            return {(int(v), int(c)): int(n) for (v, c), n in zip(uniq, counts)}
        uniq, counts = np.unique(values, return_counts=True)
        return {int(v): int(n) for v, n in zip(uniq, counts)}

    def reachable_permutations(self):
        """Yield every generated permutation in a deterministic order."""
        if self._space is not None:
            for state in np.flatnonzero(self._dist != _INF):
                yield Permutation(self._space.images_of(int(state)))
        else:
            for images in self._states:
                yield Permutation(images)


def _build_census(library: GateLibrary, cost_model: CostModel, objective: str):
    n_points = 2 ** library.n_wires
    gate_images = [gate_perm(g, library.n_wires).images for g in library.gates]
    costs = [cost_model.gate_cost(g) for g in library.gates]
    if n_points <= 8:
        space = _dense_space(n_points)
        cols = [space.column(images) for images in gate_images]
        if objective == "length":
            dist, comp, pred = _dense_bfs(space.size, cols, costs)
        else:
            dist, comp, pred = _dense_dial(space.size, cols, costs)
        return CayleyCensus(library, objective, cost_model, dist, comp, pred,
                            space=space)
    if n_points > 16:
        raise StateSpaceError(
            f"{n_points} points is beyond exhaustive search; at most 4 wires"
        )
    if objective == "length":
        weights = [(1, c) for c in costs]
    else:
        weights = [(c, 1) for c in costs]
    best, pred_map = _sparse_search(gate_images, weights, n_points)
    states = tuple(sorted(best))
    index = {images: i for i, images in enumerate(states)}
    dist = np.array([best[s][0] for s in states], dtype=np.int32)
    comp = np.array([best[s][1] for s in states], dtype=np.int32)
    pred = np.array([pred_map[s] for s in states], dtype=np.int8)
    return CayleyCensus(library, objective, cost_model, dist, comp, pred,
                        index=index, states=states)


def bfs_census(library: GateLibrary,
               cost_model: CostModel = DEFAULT_COST_MODEL) -> CayleyCensus:
    """Minimum circuit length for every permutation the library generates."""
    return _build_census(library, cost_model, "length")


def dijkstra_census(library: GateLibrary,
                    cost_model: CostModel = DEFAULT_COST_MODEL) -> CayleyCensus:
    """Minimum circuit cost for every permutation the library generates."""
    return _build_census(library, cost_model, "cost")


@dataclass(frozen=True)
class SynthesisResult:
    """An exact optimum with its witness circuit and companion statistic."""

    spec: Specification
    library: GateLibrary
    objective: str
    value: int
    companion: int
    witness: Circuit


def synthesize(spec: Specification, library: GateLibrary,
               objective: str = "length",
               cost_model: CostModel = DEFAULT_COST_MODEL) -> SynthesisResult:
    """Optimal circuit for one specification, or UnreachableError."""
    if objective not in ("length", "cost"):
        raise ValueError(f"objective must be 'length' or 'cost', got {objective!r}")
    census = (bfs_census if objective == "length" else dijkstra_census)(
        library, cost_model)
    perm = spec_to_perm(spec)
    return SynthesisResult(
        spec=spec,
        library=library,
        objective=objective,
        value=census.value(perm),
        companion=census.companion(perm),
        witness=census.witness(perm),
    )


@dataclass(frozen=True)
class FactorizationResult:
    """Outcome of stabilizer-chain synthesis: membership plus a circuit.

    Non-members get the empty circuit with member False; the identity gets
    the empty circuit with member True.
    """

    member: bool
    circuit: Circuit


def ss_synthesize(library: GateLibrary, spec: Specification,
                  chain=None) -> FactorizationResult:
    """Synthesize via stabilizer-chain factorization; valid but not optimal.

    A prebuilt chain for the same library may be passed to amortize repeated
    calls.
    """
    if chain is None:
        chain = build_chain([
            (gate_perm(g, library.n_wires), format_gate(g)) for g in library.gates
        ])
    by_name = {format_gate(g): g for g in library.gates}
    perm = spec_to_perm(spec)
    try:
        word = factorize(chain, perm)
    except NotInGroupError:
        return FactorizationResult(False, Circuit(library.n_wires, ()))
    gates = tuple(by_name[label] for label in word)
    return FactorizationResult(True, Circuit(library.n_wires, gates))


@dataclass(frozen=True)
class LibraryExtremes:
    """A library's worst-case optimum with every achieving permutation.

    Achievers ascend in image order, so achievers[0] is the canonical
    representative and companions[0] the companion reported for the library.
    """

    value: int
    achievers: tuple[Permutation, ...]
    companions: tuple[int, ...]


def library_extremes(census: CayleyCensus) -> LibraryExtremes:
    """Worst optimal value over reachable nonidentity permutations."""
    if census._space is not None:
        states = np.flatnonzero(census._dist != _INF)
        states = states[states != census._identity_state]
        values = census._dist[states]
        top = int(values.max())
        arg = states[values == top]
        achievers = tuple(Permutation(census._space.images_of(int(s))) for s in arg)
        companions = tuple(int(census._comp[int(s)]) for s in arg)
    else:
        pairs = [
            (images, i) for i, images in enumerate(census._states)
            if i != census._identity_state
        ]
        top = max(int(census._dist[i]) for _, i in pairs)
        arg = [(images, i) for images, i in pairs if census._dist[i] == top]
        achievers = tuple(Permutation(images) for images, _ in arg)
        companions = tuple(int(census._comp[i]) for _, i in arg)
    return LibraryExtremes(top, achievers, companions)
