"""Command-line interface: exact synthesis, library reports, the full census.

All standard-output payloads are schema-versioned JSON; report files are
written by the census command through the report layer.  Exit codes are a
stable contract: 0 success, 1 usage/parse/I-O failure, 2 spec outside the
library's reach.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .census import CACHE_VERSION, CacheError, run_census
from .chains import build_chain, group_order
from .gates import (
    CostModel,
    DEFAULT_COST_MODEL,
    GateLibrary,
    circuit_cost,
    format_circuit,
    format_gate,
    format_library,
    gate_perm,
    library_mask,
    parse_library,
)
from .perms import (
    CycleParseError,
    Permutation,
    Specification,
    format_cycles,
    parse_cycles,
    perm_to_spec,
    spec_to_perm,
)
from .reports import DISCREPANCY_SCHEMA, SUMMARY_SCHEMA, emit_report
from .search import (
    StateSpaceError,
    UnreachableError,
    bfs_census,
    dijkstra_census,
    library_extremes,
    ss_synthesize,
    synthesize,
)

SYNTH_SCHEMA = "synth-result@1"
LIBRARY_SCHEMA = "library-report@1"
CACHE_SCHEMA = f"census-cache@{CACHE_VERSION}"
JOBS_ENV = "REVSYNTH_JOBS"


class _CliError(ValueError):
    """Invalid input surfaced to the user with exit code 1."""


def parse_spec_text(text: str, spec_format: str = "auto",
                    n_points: int = 8) -> Permutation:
    """Parse a specification as a 0-based image list or 1-based cycles.

    Auto mode treats an outer double parenthesis as cycle notation and
    otherwise tries the image list first, falling back to cycles when the
    elements fit 1..n rather than 0..n-1.
    """
    stripped = text.strip()
    if spec_format == "images":
        return _parse_images(stripped, n_points)
    if spec_format == "cycles":
        return _parse_cycle_text(stripped, n_points)
    if stripped.replace(" ", "").startswith("(("):
        return _parse_cycle_text(stripped, n_points)
    try:
        return _parse_images(stripped, n_points)
    except _CliError as image_error:
        try:
            return _parse_cycle_text(stripped, n_points)
        except _CliError:
            raise image_error from None


def _parse_images(text: str, n_points: int) -> Permutation:
    body = text
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    tokens = [t for t in body.replace(",", " ").split() if t]
    if len(tokens) != n_points:
        raise _CliError(
            f"image list needs {n_points} entries, got {len(tokens)}: {text!r}")
    values = []
    for token in tokens:
        try:
            values.append(int(token))
        except ValueError:
            raise _CliError(f"bad image-list token {token!r} in {text!r}") from None
    try:
        return spec_to_perm(Specification(tuple(values)))
    except ValueError as exc:
        raise _CliError(str(exc)) from None


def _parse_cycle_text(text: str, n_points: int) -> Permutation:
    compact = text.replace(" ", "")
    candidates = [text]
    if compact.startswith("((") and compact.endswith("))"):
        inner = text.strip()[1:-1]
        candidates.insert(0, inner)
    last_error = None
    for candidate in candidates:
        try:
            return parse_cycles(candidate, n_points)
        except (CycleParseError, ValueError) as exc:
            last_error = exc
    raise _CliError(f"bad cycle notation {text!r}: {last_error}") from None


def _parse_cost_model(text: str | None) -> CostModel:
    if text is None:
        return DEFAULT_COST_MODEL
    try:
        costs = tuple(int(t) for t in text.split(","))
        return CostModel(costs)
    except ValueError as exc:
        raise _CliError(f"bad cost model {text!r}: {exc}") from None


def _library_from_args(args) -> GateLibrary:
    text = args.gates if getattr(args, "gates", None) else args.library
    if not text:
        raise _CliError("a library is required (--library or --gates)")
    try:
        return parse_library(text)
    except ValueError as exc:
        raise _CliError(str(exc)) from None


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_synth(args) -> int:
    library = _library_from_args(args)
    cost_model = _parse_cost_model(args.cost_model)
    perm = parse_spec_text(args.spec, args.spec_format)
    spec = perm_to_spec(perm)
    method = args.method
    if method is None:
        method = "bfs" if args.objective == "length" else "dijkstra"
    if method == "bfs" and args.objective != "length":
        raise _CliError("--method bfs optimizes length; use --objective length")
    if method == "dijkstra" and args.objective != "cost":
        raise _CliError("--method dijkstra optimizes cost; use --objective cost")

    payload = {
        "schema": SYNTH_SCHEMA,
        "spec": list(spec.outputs),
        "library": format_library(library),
        "mask": library_mask(library),
        "objective": args.objective,
        "method": method,
    }
    if method == "schreier-sims":
        result = ss_synthesize(library, spec)
        if not result.member:
            payload.update(member=False, value=None, companion=None,
                           witness=None, witness_length=None, witness_cost=None)
            _emit(payload)
            print(f"spec {format_cycles(perm)} is not realizable by "
                  f"{format_library(library)}", file=sys.stderr)
            return 2
        witness = result.circuit
        payload.update(
            member=True, value=None, companion=None,
            witness=format_circuit(witness),
            witness_length=len(witness),
            witness_cost=circuit_cost(witness, cost_model))
        _emit(payload)
        return 0
    try:
        result = synthesize(spec, library, objective=args.objective,
                            cost_model=cost_model)
    except UnreachableError:
        payload.update(member=False, value=None, companion=None,
                       witness=None, witness_length=None, witness_cost=None)
        _emit(payload)
        print(f"spec {format_cycles(perm)} is not realizable by "
              f"{format_library(library)}", file=sys.stderr)
        return 2
    except StateSpaceError as exc:
        raise _CliError(str(exc)) from None
    witness = result.witness
    payload.update(
        member=True, value=result.value, companion=result.companion,
        witness=format_circuit(witness),
        witness_length=len(witness),
        witness_cost=circuit_cost(witness, cost_model))
    _emit(payload)
    return 0


def cmd_library(args) -> int:
    library = _library_from_args(args)
    cost_model = _parse_cost_model(args.cost_model)
    chain = build_chain(
        [(gate_perm(g, library.n_wires), format_gate(g)) for g in library.gates])
    order = group_order(chain)
    n_specs = math.factorial(2 ** library.n_wires)
    lengths = library_extremes(bfs_census(library, cost_model))
    costs = library_extremes(dijkstra_census(library, cost_model))
    payload = {
        "schema": LIBRARY_SCHEMA,
        "library": format_library(library),
        "mask": library_mask(library),
        "n_wires": library.n_wires,
        "order": order,
        "universal": order == n_specs,
        "coverage": order - 1,
        "max_len": lengths.value,
        "max_len_cost": lengths.companions[0],
        "max_cost": costs.value,
        "max_cost_len": costs.companions[0],
    }
    _emit(payload)
    return 0


def cmd_census(args) -> int:
    jobs = args.jobs
    if jobs is None:
        env = os.environ.get(JOBS_ENV)
        if env is not None:
            try:
                jobs = int(env)
            except ValueError:
                raise _CliError(f"bad {JOBS_ENV} value {env!r}") from None
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise _CliError("--jobs must be at least 1")
    out_dir = args.out

    def progress(done, total):
        if done % 8 == 0 or done == total:
            print(f"census: {done}/{total} chunks", file=sys.stderr)

    try:
        result = run_census(jobs=jobs, cache_dir=out_dir, strict=args.strict,
                            progress=progress)
        emit_report(result, out_dir, fmt=args.format,
                    figures=not args.no_figures)
    except (OSError, CacheError) as exc:
        print(f"census failed: {exc}", file=sys.stderr)
        return 1
    with open(os.path.join(out_dir, "summary.json")) as fh:
        sys.stdout.write(fh.read())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revsynth",
        description="Exact reversible-circuit synthesis over C^nNOT gate libraries.")
    parser.add_argument(
        "--version", action="version",
        version=(f"revsynth {__version__} (schemas: {SYNTH_SCHEMA}, "
                 f"{LIBRARY_SCHEMA}, {SUMMARY_SCHEMA}, {DISCREPANCY_SCHEMA}; "
                 f"cache: {CACHE_SCHEMA})"))
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize one specification")
    synth.add_argument("--spec", required=True,
                       help="0-based image list like (2,6,5,4,7,1,0,3) or "
                            "1-based cycles like ((1,7)(2,5)(3,6,8,4))")
    synth.add_argument("--spec-format", choices=("auto", "images", "cycles"),
                       default="auto")
    synth.add_argument("--library", default="NFT",
                       help="ALL/NFT, a hex mask like 0x9c1, or gate names")
    synth.add_argument("--gates", help="alias for --library")
    synth.add_argument("--objective", choices=("length", "cost"),
                       default="length")
    synth.add_argument("--method", choices=("bfs", "dijkstra", "schreier-sims"),
                       default=None,
                       help="default: the exact engine for the objective")
    synth.add_argument("--cost-model",
                       help="comma-separated costs by control count, default 0,1,5")
    synth.set_defaults(func=cmd_synth)

    library = sub.add_parser("library", help="analyze one gate library")
    library.add_argument("--library", help="ALL/NFT, hex mask, or gate names")
    library.add_argument("--gates", help="alias for --library")
    library.add_argument("--cost-model")
    library.set_defaults(func=cmd_library)

    census = sub.add_parser(
        "census", help="run the full 4095-library census and write reports")
    census.add_argument("--out", default="census_report",
                        help="output directory (also the resume cache)")
    census.add_argument("--jobs", type=int, default=None,
                        help=f"worker count (default: ${JOBS_ENV} or CPU count)")
    census.add_argument("--format", choices=("csv", "json"), default="csv")
    census.add_argument("--strict", action="store_true",
                        help="abort on corrupt cache lines instead of skipping")
    census.add_argument("--no-figures", action="store_true",
                        help="skip PNG figure rendering")
    census.set_defaults(func=cmd_census)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return 1 if code == 2 else int(code)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
