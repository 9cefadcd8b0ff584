"""Full census over every nonempty sub-library of the 3-wire N/F/T family.

One pass per sub-library computes its stabilizer chain (order, universality),
enumerates its group elements by transversal products (membership plus the
factorization word's length and cost per element), and runs both Cayley
searches (minimum length and minimum cost with companions).  Per-library
records and per-specification aggregates are reduced over all 4095 masks.

Aggregation policies, applied identically everywhere:

* min-side per-spec tables minimize (value, companion, mask) lexicographically,
  so the companion is the best secondary among optima and ties go to the
  smallest library mask;
* max-side per-spec tables maximize value, break ties to the smallest mask,
  and report that winning library's companion;
* per-library extremes pair the eccentricity with the companion of the
  lexicographically first achieving permutation.

Work is chunked in fixed blocks of 64 masks and partial results are merged in
chunk order, so output is byte-identical for any worker count.  Completed
chunks are checkpointed to a JSON-lines record file with an aggregate sidecar
and the census resumes from any valid prefix.
"""
from __future__ import annotations

import json
import multiprocessing
import os
import sys
from dataclasses import dataclass

import numpy as np

from .chains import build_chain, group_order
from .gates import (
    DEFAULT_COST_MODEL,
    format_gate,
    gate_perm,
    nft_library,
    sublibrary_from_mask,
)
from .perms import Permutation, perm_to_spec
from .search import _INF, _dense_space, bfs_census, dijkstra_census

N_POINTS = 8
N_SPECS = 40320
N_MASKS = 4095
FULL_ORDER = 40320
CHUNK_SIZE = 64
CACHE_VERSION = 1
RECORD_FILE = "library_records.jsonl"
AGGREGATE_FILE = "census_aggregates.npz"

_VAL_INF = np.int32(2 ** 30)
_MASK_NONE = np.int32(65535)


class CacheError(ValueError):
    """A census cache file is unreadable or inconsistent."""


@dataclass(frozen=True)
class LibraryRecord:
    """Census outcome for one sub-library."""

    mask: int
    order: int
    universal: bool
    max_len: int
    max_len_cost: int
    max_cost: int
    max_cost_len: int
    word_max_len: int
    word_max_len_cost: int
    word_max_cost: int
    word_max_cost_len: int

    def to_json(self) -> str:
        payload = {
            "v": CACHE_VERSION,
            "mask": self.mask,
            "order": self.order,
            "universal": self.universal,
            "max_len": self.max_len,
            "max_len_cost": self.max_len_cost,
            "max_cost": self.max_cost,
            "max_cost_len": self.max_cost_len,
            "word_max_len": self.word_max_len,
            "word_max_len_cost": self.word_max_len_cost,
            "word_max_cost": self.word_max_cost,
            "word_max_cost_len": self.word_max_cost_len,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "LibraryRecord":
        payload = json.loads(line)
        if payload.get("v") != CACHE_VERSION:
            raise CacheError(f"unsupported record version {payload.get('v')!r}")
        return cls(
            mask=payload["mask"],
            order=payload["order"],
            universal=payload["universal"],
            max_len=payload["max_len"],
            max_len_cost=payload["max_len_cost"],
            max_cost=payload["max_cost"],
            max_cost_len=payload["max_cost_len"],
            word_max_len=payload["word_max_len"],
            word_max_len_cost=payload["word_max_len_cost"],
            word_max_cost=payload["word_max_cost"],
            word_max_cost_len=payload["word_max_cost_len"],
        )


@dataclass(frozen=True)
class SpecRecord:
    """Census outcome for one specification, aggregated over sub-libraries."""

    spec_id: int
    outputs: tuple[int, ...]
    covering_count: int
    min_len: int
    min_len_cost: int
    min_len_mask: int
    max_len: int
    max_len_cost: int
    max_len_mask: int
    min_cost: int
    min_cost_len: int
    min_cost_mask: int
    max_cost: int
    max_cost_len: int
    max_cost_mask: int
    word_max_len: int
    word_max_len_cost: int
    word_max_len_mask: int
    word_max_cost: int
    word_max_cost_len: int
    word_max_cost_mask: int


_MIN_SIDES = ("min_len", "min_cost")
_MAX_SIDES = ("max_len", "max_cost", "word_max_len", "word_max_cost")
_SIDES = _MIN_SIDES + _MAX_SIDES
_COMPANION_FIELD = {
    "min_len": "min_len_cost",
    "min_cost": "min_cost_len",
    "max_len": "max_len_cost",
    "max_cost": "max_cost_len",
    "word_max_len": "word_max_len_cost",
    "word_max_cost": "word_max_cost_len",
}


class _Aggregates:
    """Per-spec reduction state: covering counts plus six (val, comp, mask)
    triples, merged with the declared lexicographic policies."""

    def __init__(self):
        self.cover = np.zeros(N_SPECS, dtype=np.int32)
        self.val = {}
        self.comp = {}
        self.mask = {}
        for side in _SIDES:
            fill = _VAL_INF if side in _MIN_SIDES else np.int32(-1)
            self.val[side] = np.full(N_SPECS, fill, dtype=np.int32)
            self.comp[side] = np.zeros(N_SPECS, dtype=np.int32)
            self.mask[side] = np.full(N_SPECS, _MASK_NONE, dtype=np.int32)

    def update_library(self, mask, members, stats):
        """Fold one library's per-member (value, companion) pairs in.

        Masks ascend within a run, so on equal keys the incumbent (smaller
        mask) is kept by using strict comparisons only.
        """
        self.cover[members] += 1
        for side in _SIDES:
            val, comp = stats[side]
            cur_v = self.val[side][members]
            cur_c = self.comp[side][members]
            if side in _MIN_SIDES:
                better = (val < cur_v) | ((val == cur_v) & (comp < cur_c))
            else:
                better = val > cur_v
            if better.any():
                idx = members[better]
                self.val[side][idx] = val[better]
                self.comp[side][idx] = comp[better]
                self.mask[side][idx] = mask

    def merge(self, other: "_Aggregates"):
        """Merge a later chunk's partial into this prefix, preserving the
        same tie-breaks as sequential processing."""
        self.cover += other.cover
        for side in _SIDES:
            a_v, a_c, a_m = self.val[side], self.comp[side], self.mask[side]
            b_v, b_c, b_m = other.val[side], other.comp[side], other.mask[side]
            if side in _MIN_SIDES:
                take = (b_v < a_v) | ((b_v == a_v) & (b_c < a_c)) | (
                    (b_v == a_v) & (b_c == a_c) & (b_m < a_m))
            else:
                take = (b_v > a_v) | ((b_v == a_v) & (b_m < a_m))
            a_v[take] = b_v[take]
            a_c[take] = b_c[take]
            a_m[take] = b_m[take]

    def to_arrays(self) -> dict[str, np.ndarray]:
        out = {"cover": self.cover}
        for side in _SIDES:
            out[f"{side}_val"] = self.val[side]
            out[f"{side}_comp"] = self.comp[side]
            out[f"{side}_mask"] = self.mask[side]
        return out

    @classmethod
    def from_arrays(cls, arrays) -> "_Aggregates":
        agg = cls()
        agg.cover = arrays["cover"].astype(np.int32)
        for side in _SIDES:
            agg.val[side] = arrays[f"{side}_val"].astype(np.int32)
            agg.comp[side] = arrays[f"{side}_comp"].astype(np.int32)
            agg.mask[side] = arrays[f"{side}_mask"].astype(np.int32)
        return agg


def _enumerate_elements(chain, gate_costs):
    """All group elements as dense ranks via transversal products, with each
    element's factorization word length and cost.

    The product order matches sifting, so the per-element word statistics are
    exactly those of factorize()'s output for that element.
    """
    space = _dense_space(N_POINTS)
    rows, keys, powers = space.rows, space.keys, space._powers
    ranks = np.array([0], dtype=np.int64)
    wlen = np.array([0], dtype=np.int32)
    wcost = np.array([0], dtype=np.int32)
    for level in reversed(chain.levels):
        parts, lens, costs = [], [], []
        for point in level.points:
            rep = level.reps[point]
            word = level.rep_words[point]
            rep_row = np.array(rep, dtype=np.uint8) - 1
            new_keys = rep_row[rows[ranks]].astype(np.uint32) @ powers
            parts.append(np.searchsorted(keys, new_keys))
            lens.append(wlen + len(word))
            costs.append(wcost + sum(gate_costs[abs(i) - 1] for i in word))
        ranks = np.concatenate(parts)
        wlen = np.concatenate(lens)
        wcost = np.concatenate(costs)
    return ranks, wlen, wcost


def _library_pass(mask: int):
    """Everything the census needs from one sub-library."""
    library = sublibrary_from_mask(nft_library(3), mask)
    chain = build_chain(
        [(gate_perm(g, 3), format_gate(g)) for g in library.gates])
    order = group_order(chain)
    gate_costs = [DEFAULT_COST_MODEL.gate_cost(g) for g in library.gates]
    members, wlen, wcost = _enumerate_elements(chain, gate_costs)
    if members.size != order:
        raise AssertionError(f"mask {mask}: enumerated {members.size} != order {order}")
    lengths = bfs_census(library)
    costs = dijkstra_census(library)
    if lengths.reachable_count != order or costs.reachable_count != order:
        raise AssertionError(f"mask {mask}: census reachable set disagrees with chain")
    if (lengths._dist[members] == _INF).any():
        raise AssertionError(f"mask {mask}: enumerated element missing from census")

    len_val = lengths._dist[members]
    len_comp = lengths._comp[members]
    cost_val = costs._dist[members]
    cost_comp = costs._comp[members]
    stats = {
        "min_len": (len_val, len_comp),
        "max_len": (len_val, len_comp),
        "min_cost": (cost_val, cost_comp),
        "max_cost": (cost_val, cost_comp),
        "word_max_len": (wlen, wcost),
        "word_max_cost": (wcost, wlen),
    }

    nonid = members != 0
    ecc_len = _extreme(members[nonid], len_val[nonid], len_comp[nonid])
    ecc_cost = _extreme(members[nonid], cost_val[nonid], cost_comp[nonid])
    ecc_wlen = _extreme(members[nonid], wlen[nonid], wcost[nonid])
    ecc_wcost = _extreme(members[nonid], wcost[nonid], wlen[nonid])
    record = LibraryRecord(
        mask=mask,
        order=order,
        universal=order == FULL_ORDER,
        max_len=ecc_len[0],
        max_len_cost=ecc_len[1],
        max_cost=ecc_cost[0],
        max_cost_len=ecc_cost[1],
        word_max_len=ecc_wlen[0],
        word_max_len_cost=ecc_wlen[1],
        word_max_cost=ecc_wcost[0],
        word_max_cost_len=ecc_wcost[1],
    )
    return record, members, stats


def _extreme(members, values, companions):
    """Library eccentricity: max value, companion of the rank-first achiever."""
    top = values.max()
    achieving = values == top
    first = int(np.argmin(members[achieving]))
    return int(top), int(companions[achieving][first])


def _chunk_masks(chunk_id: int):
    lo = 1 + chunk_id * CHUNK_SIZE
    return range(lo, min(lo + CHUNK_SIZE, N_MASKS + 1))


def _n_chunks():
    return (N_MASKS + CHUNK_SIZE - 1) // CHUNK_SIZE


def _chunk_worker(chunk_id: int):
    records = []
    agg = _Aggregates()
    for mask in _chunk_masks(chunk_id):
        record, members, stats = _library_pass(mask)
        agg.update_library(mask, members, stats)
        records.append(record)
    return chunk_id, records, agg.to_arrays()


class CensusResult:
    """Everything the census produced: 4095 library records plus per-spec
    aggregate arrays.  Spec ids are dense permutation ranks (identity = 0)."""

    def __init__(self, records, aggregates: _Aggregates):
        self.records = tuple(records)
        self._agg = aggregates
        self._spec_records = None

    @property
    def universal_count(self) -> int:
        return sum(1 for r in self.records if r.universal)

    @property
    def pair_total(self) -> int:
        return sum(r.order - 1 for r in self.records)

    @property
    def covering_counts(self) -> np.ndarray:
        """Per-spec covering counts, indexed by spec id (identity included)."""
        return self._agg.cover

    def spec_records(self) -> tuple[SpecRecord, ...]:
        """Materialize all 40319 nonidentity SpecRecords, id ascending."""
        if self._spec_records is None:
            space = _dense_space(N_POINTS)
            agg = self._agg
            records = []
            for spec_id in range(1, N_SPECS):
                images = space.images_of(spec_id)
                fields = {"spec_id": spec_id,
                          "outputs": perm_to_spec(Permutation(images)).outputs,
                          "covering_count": int(agg.cover[spec_id])}
                for side, comp_name in _COMPANION_FIELD.items():
                    fields[side] = int(agg.val[side][spec_id])
                    fields[comp_name] = int(agg.comp[side][spec_id])
                    fields[f"{side}_mask"] = int(agg.mask[side][spec_id])
                records.append(SpecRecord(**fields))
            self._spec_records = tuple(records)
        return self._spec_records

    def spec_histogram(self, side: str, paired: bool = False):
        """Histogram over the 40319 nonidentity specs for one aggregate side."""
        vals = self._agg.val[side][1:]
        comps = self._agg.comp[side][1:]
        if paired:
            pairs = np.stack([vals, comps], axis=1)
            uniq, counts = np.unique(pairs, axis=0, return_counts=True)
            return {(int(v), int(c)): int(n) for (v, c), n in zip(uniq, counts)}
        uniq, counts = np.unique(vals, return_counts=True)
        return {int(v): int(n) for v, n in zip(uniq, counts)}

    def covering_histogram(self):
        uniq, counts = np.unique(self._agg.cover[1:], return_counts=True)
        return {int(v): int(n) for v, n in zip(uniq, counts)}

    def joint_histogram(self, side_a: str, side_b: str):
        """Joint histogram of two independently aggregated per-spec values."""
        pairs = np.stack([self._agg.val[side_a][1:], self._agg.val[side_b][1:]], axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        return {(int(a), int(b)): int(n) for (a, b), n in zip(uniq, counts)}

    def library_histogram(self, value_field: str, companion_field: str | None = None):
        """Histogram over the 4095 libraries of a record field, optionally
        paired with its companion field."""
        if companion_field is None:
            out: dict = {}
            for r in self.records:
                key = getattr(r, value_field)
                out[key] = out.get(key, 0) + 1
            return dict(sorted(out.items()))
        out = {}
        for r in self.records:
            key = (getattr(r, value_field), getattr(r, companion_field))
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def coverage_histogram(self):
        """Libraries by how many nonidentity specs they cover (order - 1)."""
        out: dict[int, int] = {}
        for r in self.records:
            key = r.order - 1
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))


def _write_cache(cache_dir, records, agg, completed_chunks):
    record_path = os.path.join(cache_dir, RECORD_FILE)
    agg_path = os.path.join(cache_dir, AGGREGATE_FILE)
    tmp = record_path + ".tmp"
    with open(tmp, "w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    os.replace(tmp, record_path)
    arrays = agg.to_arrays()
    arrays["completed_chunks"] = np.array([completed_chunks], dtype=np.int64)
    arrays["version"] = np.array([CACHE_VERSION], dtype=np.int64)
    tmp = agg_path + ".tmp"
    with open(tmp, "wb") as fh:
        np.savez(fh, **arrays)
    os.replace(tmp, agg_path)


def load_cached_records(cache_dir, strict: bool = False):
    """Read cached library records; returns (records by mask, warnings).

    Corrupt lines abort with their line number under strict, otherwise they
    are skipped with a warning and recomputed later.
    """
    record_path = os.path.join(cache_dir, RECORD_FILE)
    by_mask: dict[int, LibraryRecord] = {}
    warnings = []
    if not os.path.exists(record_path):
        return by_mask, warnings
    with open(record_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = LibraryRecord.from_json(line)
            except (json.JSONDecodeError, KeyError, CacheError, TypeError) as exc:
                message = f"{record_path}:{lineno}: corrupt cache line ({exc})"
                if strict:
                    raise CacheError(message) from exc
                warnings.append(message)
                continue
            by_mask[record.mask] = record
    return by_mask, warnings


def _load_resume_state(cache_dir, strict):
    """Longest valid chunk prefix present in the cache, with its aggregates."""
    by_mask, warnings = load_cached_records(cache_dir, strict)
    agg_path = os.path.join(cache_dir, AGGREGATE_FILE)
    if not by_mask or not os.path.exists(agg_path):
        return 0, [], _Aggregates(), warnings
    try:
        with np.load(agg_path) as data:
            if int(data["version"][0]) != CACHE_VERSION:
                raise CacheError("aggregate sidecar version mismatch")
            completed = int(data["completed_chunks"][0])
            agg = _Aggregates.from_arrays(data)
    except (OSError, KeyError, ValueError, CacheError) as exc:
        message = f"{agg_path}: unreadable aggregate sidecar ({exc})"
        if strict:
            raise CacheError(message) from exc
        warnings.append(message)
        return 0, [], _Aggregates(), warnings
    completed = min(completed, _n_chunks())
    prefix = 0
    records = []
    for chunk_id in range(completed):
        masks = list(_chunk_masks(chunk_id))
        if all(m in by_mask for m in masks):
            records.extend(by_mask[m] for m in masks)
            prefix += 1
        else:
            break
    if prefix < completed:
        # records file lost masks the sidecar claims; trust the shorter prefix
        warnings.append(
            f"{cache_dir}: record file covers {prefix} chunks, sidecar "
            f"{completed}; resuming from chunk {prefix}")
        if prefix == 0:
            return 0, [], _Aggregates(), warnings
        # aggregates cannot be rewound, so recompute from scratch
        warnings.append(f"{cache_dir}: aggregates not prefix-consistent; recomputing")
        return 0, [], _Aggregates(), warnings
    return prefix, records, agg, warnings


def run_census(jobs: int | None = None, cache_dir: str | None = None,
               strict: bool = False, progress=None) -> CensusResult:
    """Run (or resume) the full 4095-library census.

    jobs > 1 forks workers over 64-mask chunks; partial results merge in
    chunk order, so any worker count yields identical output.  progress, if
    given, is called with (done_chunks, total_chunks) after each merge.
    """
    if jobs is None:
        jobs = 1
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    total = _n_chunks()
    start_chunk = 0
    records: list[LibraryRecord] = []
    agg = _Aggregates()
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        start_chunk, records, agg, warnings = _load_resume_state(cache_dir, strict)
        for message in warnings:
            print(f"census cache: {message}", file=sys.stderr)
    # warm the shared dense tables before forking so workers inherit them
    space = _dense_space(N_POINTS)
    for gate in nft_library(3).gates:
        space.column(gate_perm(gate, 3).images)

    def _merge(chunk_id, chunk_records, agg_arrays):
        records.extend(chunk_records)
        agg.merge(_Aggregates.from_arrays(agg_arrays))
        if cache_dir is not None:
            _write_cache(cache_dir, records, agg, chunk_id + 1)
        if progress is not None:
            progress(chunk_id + 1, total)

    todo = list(range(start_chunk, total))
    if jobs == 1 or not todo:
        for chunk_id in todo:
            _merge(*_chunk_worker(chunk_id))
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=jobs) as pool:
            for chunk_id, chunk_records, agg_arrays in pool.imap(
                    _chunk_worker, todo, chunksize=1):
                _merge(chunk_id, chunk_records, agg_arrays)
    return CensusResult(records, agg)


def universality_census(result: CensusResult | None = None, jobs: int | None = None):
    """Universal-library count plus all per-library records."""
    if result is None:
        result = run_census(jobs=jobs)
    return result.universal_count, result.records


def membership_census(result: CensusResult | None = None, jobs: int | None = None):
    """Per-spec covering counts and per-library coverage counts."""
    if result is None:
        result = run_census(jobs=jobs)
    coverage = {r.mask: r.order - 1 for r in result.records}
    return result.covering_counts, coverage


def length_bounds_census(result: CensusResult | None = None, jobs: int | None = None):
    """Length-side SpecRecords and distribution reports."""
    if result is None:
        result = run_census(jobs=jobs)
    reports = {
        "min_len": result.spec_histogram("min_len"),
        "min_len_paired": result.spec_histogram("min_len", paired=True),
        "max_len": result.spec_histogram("max_len"),
        "max_len_paired": result.spec_histogram("max_len", paired=True),
    }
    return result.spec_records(), reports


def cost_bounds_census(result: CensusResult | None = None, jobs: int | None = None):
    """Cost-side SpecRecords and distribution reports."""
    if result is None:
        result = run_census(jobs=jobs)
    reports = {
        "min_cost": result.spec_histogram("min_cost"),
        "min_cost_paired": result.spec_histogram("min_cost", paired=True),
        "max_cost": result.spec_histogram("max_cost"),
        "max_cost_paired": result.spec_histogram("max_cost", paired=True),
    }
    return result.spec_records(), reports


def library_bounds_census(result: CensusResult | None = None, jobs: int | None = None):
    """Per-library eccentricity distribution reports."""
    if result is None:
        result = run_census(jobs=jobs)
    return {
        "library_max_len": result.library_histogram("max_len"),
        "library_max_len_paired": result.library_histogram("max_len", "max_len_cost"),
        "library_max_cost": result.library_histogram("max_cost"),
        "library_max_cost_paired": result.library_histogram("max_cost", "max_cost_len"),
    }
