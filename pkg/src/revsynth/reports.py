"""Census report emission: delimited histograms, JSON summary, figures.

Every delimited or JSON file is byte-deterministic: CSV files carry a header
row, comma delimiters, LF line endings, and rows sorted ascending by value
then companion; JSON files are dumped with sorted keys.  Figures are PNG
renderings of the main histograms and carry no determinism guarantee.

The discrepancy report places this census side by side with the previously
published distributions for the same family (see baselines), under this
package's declared semantics: true optima from exhaustive search, companions
by the documented tie-break policies.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction

from . import baselines
from .census import CACHE_VERSION, CensusResult

SUMMARY_SCHEMA = "census-summary@1"
DISCREPANCY_SCHEMA = "census-discrepancy@1"

_SPEC_HISTS = (
    ("min_len", "min_len", "cost"),
    ("max_len", "max_len", "cost"),
    ("min_cost", "min_cost", "length"),
    ("max_cost", "max_cost", "length"),
    ("word_max_len", "word_max_len", "cost"),
    ("word_max_cost", "word_max_cost", "length"),
)

_LIBRARY_HISTS = (
    ("library_max_len", "max_len", "max_len_cost", "cost"),
    ("library_max_cost", "max_cost", "max_cost_len", "length"),
    ("library_word_max_len", "word_max_len", "word_max_len_cost", "cost"),
    ("library_word_max_cost", "word_max_cost", "word_max_cost_len", "length"),
)


def _write_text(path: str, text: str) -> str:
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _hist_file(path, name, value_col, hist, fmt, companion_col=None):
    """One histogram table; hist keys are values or (value, companion)."""
    rows = sorted(hist.items())
    if fmt == "json":
        if companion_col is None:
            payload_rows = [[k, n] for k, n in rows]
            columns = [value_col, "count"]
        else:
            payload_rows = [[k[0], k[1], n] for k, n in rows]
            columns = [value_col, companion_col, "count"]
        payload = {"name": name, "columns": columns, "rows": payload_rows}
        return _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if companion_col is None:
        lines = [f"{value_col},count"]
        lines += [f"{k},{n}" for k, n in rows]
    else:
        lines = [f"{value_col},{companion_col},count"]
        lines += [f"{k[0]},{k[1]},{n}" for k, n in rows]
    return _write_text(path, "\n".join(lines) + "\n")


def _mean_entry(hist):
    num = sum(k * n for k, n in hist.items())
    den = sum(hist.values())
    frac = Fraction(num, den)
    return {
        "mean": round(float(frac), 3),
        "numerator": num,
        "denominator": den,
    }


def _ext(fmt: str) -> str:
    return "json" if fmt == "json" else "csv"


def emit_report(result: CensusResult, out_dir: str, fmt: str = "csv",
                figures: bool = True) -> list[str]:
    """Write the full census report under out_dir; returns written paths.

    fmt selects csv or json for the histogram tables; the summary, the
    per-library records, and the discrepancy report are always JSON.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    ext = _ext(fmt)

    spec_hists = {}
    for name, side, companion_col in _SPEC_HISTS:
        single = result.spec_histogram(side)
        paired = result.spec_histogram(side, paired=True)
        spec_hists[name] = single
        written.append(_hist_file(
            os.path.join(out_dir, f"{name}_hist.{ext}"),
            f"{name}_hist", name, single, fmt))
        written.append(_hist_file(
            os.path.join(out_dir, f"{name}_hist_paired.{ext}"),
            f"{name}_hist_paired", name, paired, fmt, companion_col))

    cover_hist = result.covering_histogram()
    written.append(_hist_file(
        os.path.join(out_dir, f"coverage_hist.{ext}"),
        "coverage_hist", "covering_count", cover_hist, fmt))
    lib_cover_hist = result.coverage_histogram()
    written.append(_hist_file(
        os.path.join(out_dir, f"library_coverage_hist.{ext}"),
        "library_coverage_hist", "coverage", lib_cover_hist, fmt))

    for name, field, comp_field, companion_col in _LIBRARY_HISTS:
        written.append(_hist_file(
            os.path.join(out_dir, f"{name}_hist.{ext}"),
            f"{name}_hist", name, result.library_histogram(field), fmt))
        written.append(_hist_file(
            os.path.join(out_dir, f"{name}_hist_paired.{ext}"),
            f"{name}_hist_paired", name,
            result.library_histogram(field, comp_field), fmt, companion_col))

    records_path = os.path.join(out_dir, "library_records.jsonl")
    written.append(_write_text(
        records_path, "".join(r.to_json() + "\n" for r in result.records)))

    written.append(_write_text(
        os.path.join(out_dir, "spec_records.csv"), _spec_records_csv(result)))

    summary = {
        "schema": SUMMARY_SCHEMA,
        "cache_version": CACHE_VERSION,
        "total_libraries": len(result.records),
        "total_specs": baselines.TOTAL_SPECS,
        "universal_libraries": result.universal_count,
        "pair_total": result.pair_total,
        "means": {
            "min_len": _mean_entry(spec_hists["min_len"]),
            "max_len": _mean_entry(spec_hists["max_len"]),
            "min_cost": _mean_entry(spec_hists["min_cost"]),
            "max_cost": _mean_entry(spec_hists["max_cost"]),
            "covering_count": _mean_entry(cover_hist),
        },
        "zero_cost_specs": spec_hists["min_cost"].get(0, 0),
    }
    written.append(_write_text(
        os.path.join(out_dir, "summary.json"),
        json.dumps(summary, sort_keys=True, indent=2) + "\n"))

    written.append(_write_text(
        os.path.join(out_dir, "discrepancy_report.json"),
        json.dumps(discrepancy_report(result), sort_keys=True, indent=2) + "\n"))

    if figures:
        written.extend(_emit_figures(result, out_dir, spec_hists,
                                     cover_hist, lib_cover_hist))
    return written


def _spec_records_csv(result: CensusResult) -> str:
    header = ("spec_id,outputs,covering_count,"
              "min_len,min_len_cost,min_len_mask,"
              "max_len,max_len_cost,max_len_mask,"
              "min_cost,min_cost_len,min_cost_mask,"
              "max_cost,max_cost_len,max_cost_mask,"
              "word_max_len,word_max_len_cost,word_max_len_mask,"
              "word_max_cost,word_max_cost_len,word_max_cost_mask")
    lines = [header]
    for r in result.spec_records():
        outputs = " ".join(str(x) for x in r.outputs)
        lines.append(
            f"{r.spec_id},{outputs},{r.covering_count},"
            f"{r.min_len},{r.min_len_cost},{r.min_len_mask},"
            f"{r.max_len},{r.max_len_cost},{r.max_len_mask},"
            f"{r.min_cost},{r.min_cost_len},{r.min_cost_mask},"
            f"{r.max_cost},{r.max_cost_len},{r.max_cost_mask},"
            f"{r.word_max_len},{r.word_max_len_cost},{r.word_max_len_mask},"
            f"{r.word_max_cost},{r.word_max_cost_len},{r.word_max_cost_mask}")
    return "\n".join(lines) + "\n"


def _rows(hist):
    return [[list(k) if isinstance(k, tuple) else k, n] for k, n in sorted(hist.items())]


def _pub_rows(table):
    return [[list(r[:-1]) if len(r) == 3 else r[0], r[-1]] for r in table]


def _table_entry(ours, published, note=None):
    pub = {tuple(r[:-1]) if len(r) == 3 else r[0]: r[-1] for r in published}
    entry = {
        "equal": dict(ours) == pub,
        "ours": _rows(ours),
        "published": _pub_rows(published),
    }
    if note:
        entry["note"] = note
    return entry


def discrepancy_report(result: CensusResult) -> dict:
    """This census versus the published distributions, table by table."""
    full = next(r for r in result.records if r.mask == 4095)
    cover = result.covering_histogram()
    lib_cover = result.coverage_histogram()
    tables = {
        "spec_coverage": _table_entry(
            cover, baselines.SPEC_COVERAGE,
            "published rows 2085 and 2624 each understate one spec by 1"),
        "spec_min_len": _table_entry(
            result.spec_histogram("min_len"), baselines.SPEC_MIN_LEN),
        "spec_min_len_paired": _table_entry(
            result.spec_histogram("min_len", paired=True),
            baselines.SPEC_MIN_LEN_PAIRED,
            "published companions are not minimal costs among length-optimal "
            "circuits; some published pairs are unachievable under the stated "
            "gate costs"),
        "spec_max_len": _table_entry(
            result.spec_histogram("max_len"), baselines.SPEC_MAX_LEN),
        "spec_max_len_paired": _table_entry(
            result.spec_histogram("max_len", paired=True),
            baselines.SPEC_MAX_LEN_PAIRED,
            "companions are tool-specific; see spec_min_len_paired"),
        "spec_min_cost": _table_entry(
            result.spec_histogram("min_cost"), baselines.SPEC_MIN_COST,
            "published rows at costs 0 through 6 match the optimum exactly, "
            "but the published mean lies below the true optimal mean, so "
            "some published values are below any achievable cost and the "
            "table cannot describe realizable circuits"),
        "spec_min_cost_paired": _table_entry(
            result.spec_histogram("min_cost", paired=True),
            baselines.SPEC_MIN_COST_PAIRED),
        "spec_max_cost": _table_entry(
            result.spec_histogram("max_cost"), baselines.SPEC_MAX_COST,
            "cost eccentricities of non-optimal circuits; the true "
            "worst-case optimal cost over all libraries is "
            f"{max(result.spec_histogram('max_cost'))}"),
        "spec_max_cost_paired": _table_entry(
            result.spec_histogram("max_cost", paired=True),
            baselines.SPEC_MAX_COST_PAIRED),
        "library_coverage": _table_entry(
            lib_cover, baselines.LIBRARY_COVERAGE,
            "published rows 4 and 1342 are impossible: a library's coverage "
            "is its group order minus 1, and no group over these points has "
            "order 5 or 1343"),
        "library_max_len": _table_entry(
            result.library_histogram("max_len"), baselines.LIBRARY_MAX_LEN),
        "library_max_len_paired": _table_entry(
            result.library_histogram("max_len", "max_len_cost"),
            baselines.LIBRARY_MAX_LEN_PAIRED,
            "our companion is the cost companion of the first achieving "
            "permutation in image order"),
        "library_max_cost": _table_entry(
            result.library_histogram("max_cost"), baselines.LIBRARY_MAX_COST,
            "published cost eccentricities come from non-optimal circuits "
            "and exceed the true values"),
        "library_max_cost_paired": _table_entry(
            result.library_histogram("max_cost", "max_cost_len"),
            baselines.LIBRARY_MAX_COST_PAIRED),
    }
    joint_min = result.joint_histogram("min_len", "min_cost")
    joint_max = result.joint_histogram("max_len", "max_cost")
    min_cost_mean = _mean_entry(result.spec_histogram("min_cost"))
    return {
        "schema": DISCREPANCY_SCHEMA,
        "pair_total": {
            "ours": result.pair_total,
            "published": baselines.REPORTED_PAIR_TOTAL,
            "difference": result.pair_total - baselines.REPORTED_PAIR_TOTAL,
            "note": "both published coverage tables are short by exactly two "
                    "library-spec membership pairs; the affected rows are "
                    "identified in spec_coverage and library_coverage",
        },
        "tables": tables,
        "full_library": {
            "max_len": {"ours": [full.max_len, full.max_len_cost],
                        "published": [8, 20]},
            "max_cost": {"ours": [full.max_cost, full.max_cost_len],
                         "published": [23, 7],
                         "note": "the published cost eccentricity is not the "
                                 "optimum; the true value is "
                                 f"{full.max_cost}"},
        },
        "min_cost_mean": {
            "ours": min_cost_mean,
            "published_rows_mean": 11.76996,
            "published_stated_mean": 11.76967,
            "note": "the published table's own rows average 11.76996, not "
                    "the stated 11.76967, and both lie below the true "
                    "optimal mean; a table of realizable circuit costs can "
                    "never average below the optimum, so the published "
                    "distribution is not realizable",
        },
        "paired_table_semantics": {
            "note": "published paired tables match neither companion "
                    "minimization nor joint distributions of independent "
                    "extremes; joint distributions under this census are "
                    "included for reference",
            "joint_min_len_min_cost": _rows(joint_min),
            "joint_max_len_max_cost": _rows(joint_max),
        },
    }


def _emit_figures(result, out_dir, spec_hists, cover_hist, lib_cover_hist):
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig_dir = os.path.join(out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    written = []

    def bar(name, hist, xlabel, ylabel, title, width=1.0):
        path = os.path.join(fig_dir, f"{name}.png")
        fig, ax = plt.subplots(figsize=(8, 4.5))
        xs = sorted(hist)
        ax.bar(xs, [hist[x] for x in xs], width=width, color="#33658a")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    bar("min_len_hist", spec_hists["min_len"], "minimum circuit length",
        "specifications", "Shortest circuits over all sub-libraries")
    bar("max_len_hist", spec_hists["max_len"], "maximum optimal length",
        "specifications", "Worst covering sub-library, length objective")
    bar("min_cost_hist", spec_hists["min_cost"], "minimum circuit cost",
        "specifications", "Cheapest circuits over all sub-libraries")
    bar("max_cost_hist", spec_hists["max_cost"], "maximum optimal cost",
        "specifications", "Worst covering sub-library, cost objective")
    bar("coverage_hist", cover_hist, "covering sub-libraries",
        "specifications", "How many sub-libraries realize each function",
        width=12.0)
    bar("library_coverage_hist", lib_cover_hist, "functions covered",
        "sub-libraries", "How many functions each sub-library realizes",
        width=120.0)
    return written
