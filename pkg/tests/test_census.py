"""Census pipeline: chunked runs, worker independence, caching, aggregates.

Fast tests shrink the mask range to 192 (three chunks) by monkeypatching;
everything that needs real numbers uses the session-scoped full census.
"""

import json
import os

import numpy as np
import pytest

import revsynth.census as census
from revsynth.census import (
    CacheError,
    LibraryRecord,
    load_cached_records,
    run_census,
)
from revsynth.gates import nft_library, sublibrary_from_mask
from revsynth.perms import Specification, spec_to_perm
from revsynth.search import UnreachableError, bfs_census, dijkstra_census


def _shrink(monkeypatch, n_masks=192):
    monkeypatch.setattr(census, "N_MASKS", n_masks)


def _records_equal(a, b):
    return tuple(a) == tuple(b)


def _aggregates_equal(a, b):
    left, right = a.to_arrays(), b.to_arrays()
    return left.keys() == right.keys() and all(
        np.array_equal(left[k], right[k]) for k in left)


def test_chunks_partition_mask_range():
    seen = []
    for chunk_id in range(census._n_chunks()):
        seen.extend(census._chunk_masks(chunk_id))
    assert seen == list(range(1, census.N_MASKS + 1))


def test_record_json_roundtrip(monkeypatch):
    _shrink(monkeypatch, 3)
    result = run_census(jobs=1)
    for record in result.records:
        assert LibraryRecord.from_json(record.to_json()) == record


def test_record_version_mismatch():
    line = json.dumps({"mask": 1, "v": census.CACHE_VERSION + 1})
    with pytest.raises(CacheError):
        LibraryRecord.from_json(line)


def test_worker_count_does_not_change_output(monkeypatch, tmp_path):
    _shrink(monkeypatch)
    serial = run_census(jobs=1, cache_dir=str(tmp_path / "serial"))
    forked = run_census(jobs=2, cache_dir=str(tmp_path / "forked"))
    assert _records_equal(serial.records, forked.records)
    assert _aggregates_equal(serial._agg, forked._agg)
    # the persisted record file is part of the deterministic surface
    serial_bytes = (tmp_path / "serial" / census.RECORD_FILE).read_bytes()
    forked_bytes = (tmp_path / "forked" / census.RECORD_FILE).read_bytes()
    assert serial_bytes == forked_bytes


def test_resume_skips_completed_chunks(monkeypatch, tmp_path):
    _shrink(monkeypatch)
    fresh = run_census(jobs=1)

    class Abort(Exception):
        pass

    def bail_after_first(done, total):
        if done == 1:
            raise Abort

    cache = str(tmp_path / "cache")
    with pytest.raises(Abort):
        run_census(jobs=1, cache_dir=cache, progress=bail_after_first)
    lines = (tmp_path / "cache" / census.RECORD_FILE).read_text().splitlines()
    assert len(lines) == census.CHUNK_SIZE

    worked = []
    real_worker = census._chunk_worker
    monkeypatch.setattr(census, "_chunk_worker",
                        lambda cid: (worked.append(cid), real_worker(cid))[1])
    resumed = run_census(jobs=1, cache_dir=cache)
    assert worked == [1, 2]
    assert _records_equal(resumed.records, fresh.records)
    assert _aggregates_equal(resumed._agg, fresh._agg)


def test_cached_run_recomputes_nothing(monkeypatch, tmp_path):
    _shrink(monkeypatch)
    cache = str(tmp_path)
    first = run_census(jobs=1, cache_dir=cache)
    monkeypatch.setattr(census, "_chunk_worker",
                        lambda cid: pytest.fail("cache should satisfy the run"))
    second = run_census(jobs=1, cache_dir=cache)
    assert _records_equal(first.records, second.records)
    assert _aggregates_equal(first._agg, second._agg)


def test_missing_sidecar_forces_recompute(monkeypatch, tmp_path):
    _shrink(monkeypatch)
    cache = str(tmp_path)
    first = run_census(jobs=1, cache_dir=cache)
    os.remove(tmp_path / census.AGGREGATE_FILE)
    second = run_census(jobs=1, cache_dir=cache)
    assert _records_equal(first.records, second.records)
    assert _aggregates_equal(first._agg, second._agg)


def _corrupt_line(cache_dir, lineno, text="{broken"):
    path = cache_dir / census.RECORD_FILE
    lines = path.read_text().splitlines()
    lines[lineno - 1] = text
    path.write_text("\n".join(lines) + "\n")


def test_corrupt_line_strict_names_the_line(monkeypatch, tmp_path):
    _shrink(monkeypatch)
    run_census(jobs=1, cache_dir=str(tmp_path))
    _corrupt_line(tmp_path, 70)
    with pytest.raises(CacheError, match=r":70: corrupt cache line"):
        load_cached_records(str(tmp_path), strict=True)
    with pytest.raises(CacheError, match=r":70:"):
        run_census(jobs=1, cache_dir=str(tmp_path), strict=True)


def test_corrupt_line_lenient_warns_and_recomputes(monkeypatch, tmp_path, capsys):
    _shrink(monkeypatch)
    fresh = run_census(jobs=1)
    cache = str(tmp_path)
    run_census(jobs=1, cache_dir=cache)
    _corrupt_line(tmp_path, 130)
    recovered = run_census(jobs=1, cache_dir=cache)
    err = capsys.readouterr().err
    assert "corrupt cache line" in err
    assert _records_equal(recovered.records, fresh.records)
    assert _aggregates_equal(recovered._agg, fresh._agg)
    # the rewritten cache is whole again
    by_mask, warnings = load_cached_records(cache, strict=True)
    assert not warnings and len(by_mask) == census.N_MASKS


def test_jobs_must_be_positive():
    with pytest.raises(ValueError):
        run_census(jobs=0)


# -- aggregate semantics, checked against the search layer ------------------

def test_min_side_aggregates_are_consistent(full_census):
    """The recorded min-length winner reproduces under direct search, and no
    sampled library beats it."""
    result = full_census.result
    by_outputs = {r.outputs: r for r in result.spec_records()}
    nft = nft_library(3)
    samples = (
        (1, 0, 2, 3, 4, 5, 6, 7),
        (2, 6, 5, 4, 7, 1, 0, 3),
        (0, 1, 2, 3, 4, 5, 7, 6),
    )
    sampled_masks = list(range(1, 4096, 97))
    for outputs in samples:
        record = by_outputs[outputs]
        perm = spec_to_perm(Specification(outputs))
        winner = bfs_census(sublibrary_from_mask(nft, record.min_len_mask))
        assert winner.value(perm) == record.min_len
        assert winner.companion(perm) == record.min_len_cost
        for mask in sampled_masks:
            lengths = bfs_census(sublibrary_from_mask(nft, mask))
            try:
                value = lengths.value(perm)
            except UnreachableError:
                continue
            assert (value, lengths.companion(perm)) >= (
                record.min_len, record.min_len_cost)


def test_min_cost_aggregates_are_consistent(full_census):
    result = full_census.result
    by_outputs = {r.outputs: r for r in result.spec_records()}
    nft = nft_library(3)
    record = by_outputs[(7, 6, 5, 4, 3, 2, 1, 0)]
    assert record.min_cost == 0
    winner = dijkstra_census(sublibrary_from_mask(nft, record.min_cost_mask))
    perm = spec_to_perm(Specification((7, 6, 5, 4, 3, 2, 1, 0)))
    assert winner.value(perm) == 0


def test_identity_is_covered_by_every_library(full_census):
    counts = full_census.result.covering_counts
    assert counts[0] == census.N_MASKS
    assert (counts[1:] > 0).all()


def test_full_library_record(full_census):
    record = full_census.result.records[-1]
    assert record.mask == 4095
    assert record.order == 40320 and record.universal
    assert (record.max_len, record.max_len_cost) == (8, 20)
    assert (record.max_cost, record.max_cost_len) == (17, 5)
    assert (record.word_max_len, record.word_max_len_cost) == (58, 105)
    assert (record.word_max_cost, record.word_max_cost_len) == (105, 58)


def test_headline_totals(full_census):
    result = full_census.result
    assert result.universal_count == 1960
    assert result.pair_total == 80_925_629


def test_two_path_coverage_consistency(full_census):
    """Membership-set totals must equal the chain-order totals."""
    result = full_census.result
    assert int(result.covering_counts[1:].sum()) == result.pair_total


def test_minimum_tables_match_full_library(full_census):
    """Per-spec minima over all libraries equal the full-library optima."""
    result = full_census.result
    nft = nft_library(3)
    lengths = bfs_census(nft)
    costs = dijkstra_census(nft)
    for record in result.spec_records()[:500]:
        perm = spec_to_perm(Specification(record.outputs))
        assert record.min_len == lengths.value(perm)
        assert record.min_cost == costs.value(perm)


def test_histogram_mass_conservation(full_census):
    result = full_census.result
    for side in ("min_len", "max_len", "min_cost", "max_cost",
                 "word_max_len", "word_max_cost"):
        assert sum(result.spec_histogram(side).values()) == 40319
        assert sum(result.spec_histogram(side, paired=True).values()) == 40319
    assert sum(result.covering_histogram().values()) == 40319
    assert sum(result.coverage_histogram().values()) == 4095
    for field in ("max_len", "max_cost"):
        assert sum(result.library_histogram(field).values()) == 4095


def test_op_wrappers_share_one_result(full_census):
    result = full_census.result
    universal, records = census.universality_census(result)
    assert universal == 1960 and len(records) == 4095

    covering, coverage = census.membership_census(result)
    assert coverage[4095] == 40319
    assert len(coverage) == 4095
    assert int(covering[1:].sum()) == sum(coverage.values())

    spec_records, length_reports = census.length_bounds_census(result)
    assert len(spec_records) == 40319
    assert set(length_reports) == {
        "min_len", "min_len_paired", "max_len", "max_len_paired"}
    assert length_reports["min_len"][1] == 12

    _, cost_reports = census.cost_bounds_census(result)
    assert cost_reports["min_cost"][0] == 7

    library_reports = census.library_bounds_census(result)
    assert library_reports["library_max_len"][1] == 12
    assert library_reports["library_max_cost"][0] == 7
