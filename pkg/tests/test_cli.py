"""Command-line behavior: spec parsing, golden outputs, exit codes."""

import json
import shutil
from pathlib import Path

import pytest

from revsynth.cli import _CliError, main, parse_spec_text
from revsynth.gates import circuit_cost, circuit_perm, parse_circuit
from revsynth.perms import identity, parse_cycles, perm_to_spec

GOLDEN = Path(__file__).parent / "golden"


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# -- specification parsing ---------------------------------------------------

def test_auto_prefers_image_lists():
    perm = parse_spec_text("(2,6,5,4,7,1,0,3)")
    assert perm.images == (3, 7, 6, 5, 8, 2, 1, 4)


def test_auto_double_parenthesis_is_cycles():
    assert parse_spec_text("((1,5)(2,6))") == parse_cycles("(1,5)(2,6)", 8)


def test_auto_falls_back_to_cycles():
    # 1..8 cannot be a 0-based image list, so this reads as one long cycle
    text = "(1,2,3,4,5,6,7,8)"
    assert parse_spec_text(text) == parse_cycles(text, 8)


def test_empty_cycles_mean_identity():
    assert parse_spec_text("()") == identity(8)


def test_explicit_format_is_not_second_guessed():
    with pytest.raises(_CliError):
        parse_spec_text("((1,5)(2,6))", "images")
    with pytest.raises(_CliError, match="cycle"):
        parse_spec_text("(2,6,5,4,7,1,0,3)", "cycles")


def test_bad_image_token():
    with pytest.raises(_CliError, match="bad image-list token"):
        parse_spec_text("(2,6,5,4,7,1,x,3)", "images")


def test_image_list_must_be_a_permutation():
    with pytest.raises(_CliError):
        parse_spec_text("(0,0,2,3,4,5,6,7)", "images")


# -- golden outputs ----------------------------------------------------------

GOLDEN_CASES = [
    ("synth_length.json", 0,
     ["synth", "--spec", "(2,6,5,4,7,1,0,3)"]),
    ("synth_cost.json", 0,
     ["synth", "--spec", "((1,8)(2,7)(3,6)(4,5))", "--objective", "cost"]),
    ("synth_identity.json", 0,
     ["synth", "--spec", "()"]),
    ("synth_nonmember.json", 2,
     ["synth", "--spec", "((1,2,3))", "--library", "T123"]),
    ("synth_factored.json", 0,
     ["synth", "--spec", "(2,6,5,4,7,1,0,3)", "--method", "schreier-sims"]),
    ("library_inverters.json", 0,
     ["library", "--library", "N1,N2,N3"]),
]


@pytest.mark.parametrize("golden,code,argv", GOLDEN_CASES,
                         ids=[case[0] for case in GOLDEN_CASES])
def test_golden_output(capsys, golden, code, argv):
    rc, out, _ = run_cli(capsys, *argv)
    assert rc == code
    assert out == (GOLDEN / golden).read_text()


def test_synth_witness_is_self_consistent(capsys):
    rc, out, _ = run_cli(capsys, "synth", "--spec", "(2,6,5,4,7,1,0,3)")
    assert rc == 0
    payload = json.loads(out)
    circuit = parse_circuit(payload["witness"])
    assert perm_to_spec(circuit_perm(circuit)).outputs == tuple(payload["spec"])
    assert len(circuit) == payload["witness_length"] == payload["value"]
    assert circuit_cost(circuit) == payload["witness_cost"]


def test_factored_witness_recomposes(capsys):
    rc, out, _ = run_cli(capsys, "synth", "--spec", "(2,6,5,4,7,1,0,3)",
                         "--method", "schreier-sims")
    assert rc == 0
    payload = json.loads(out)
    assert payload["value"] is None
    circuit = parse_circuit(payload["witness"])
    assert perm_to_spec(circuit_perm(circuit)).outputs == tuple(payload["spec"])


def test_nonmember_diagnostic_goes_to_stderr(capsys):
    rc, out, err = run_cli(capsys, "synth", "--spec", "((1,2,3))",
                           "--library", "T123")
    assert rc == 2
    assert json.loads(out)["member"] is False
    assert "not realizable" in err


def test_gates_is_an_alias_for_library(capsys):
    rc_a, out_a, _ = run_cli(capsys, "library", "--library", "N1,N2,N3")
    rc_b, out_b, _ = run_cli(capsys, "library", "--gates", "N1,N2,N3")
    assert rc_a == rc_b == 0
    assert out_a == out_b


# -- exit codes and argument validation --------------------------------------

def test_version_lists_schemas(capsys):
    rc, out, _ = run_cli(capsys, "--version")
    assert rc == 0
    for token in ("revsynth", "synth-result@1", "library-report@1",
                  "census-summary@1", "census-discrepancy@1", "census-cache@1"):
        assert token in out


def test_unknown_command_fails(capsys):
    rc, _, err = run_cli(capsys, "bogus")
    assert rc == 1
    assert err


def test_no_command_fails(capsys):
    rc, _, err = run_cli(capsys)
    assert rc == 1
    assert err


def test_method_objective_mismatch(capsys):
    rc, _, err = run_cli(capsys, "synth", "--spec", "()",
                         "--method", "bfs", "--objective", "cost")
    assert rc == 1
    assert "error:" in err
    rc, _, err = run_cli(capsys, "synth", "--spec", "()",
                         "--method", "dijkstra", "--objective", "length")
    assert rc == 1
    assert "error:" in err


def test_bad_gate_name(capsys):
    rc, _, err = run_cli(capsys, "library", "--library", "N9")
    assert rc == 1
    assert "error:" in err


def test_bad_cost_model(capsys):
    rc, _, err = run_cli(capsys, "library", "--library", "N1", "--cost-model", "1,x")
    assert rc == 1
    assert "error:" in err


def test_bad_jobs_environment(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("REVSYNTH_JOBS", "many")
    rc, _, err = run_cli(capsys, "census", "--out", str(tmp_path))
    assert rc == 1
    assert "REVSYNTH_JOBS" in err


def test_zero_jobs_rejected(capsys, tmp_path):
    rc, _, err = run_cli(capsys, "census", "--out", str(tmp_path), "--jobs", "0")
    assert rc == 1
    assert "error:" in err


# -- census subcommand on a prebuilt cache -----------------------------------

@pytest.fixture()
def cache_copy(full_census, tmp_path):
    dst = tmp_path / "census_out"
    shutil.copytree(full_census.cache_dir, dst)
    return dst


def test_census_cli_reuses_cache(capsys, cache_copy):
    rc, out, _ = run_cli(capsys, "census", "--out", str(cache_copy),
                         "--jobs", "1", "--no-figures")
    assert rc == 0
    assert out == (cache_copy / "summary.json").read_text()
    assert json.loads(out)["universal_libraries"] == 1960
    assert (cache_copy / "min_len_hist.csv").exists()
    assert not (cache_copy / "figures").exists()


def test_census_cli_strict_rejects_corrupt_cache(capsys, cache_copy):
    path = cache_copy / "library_records.jsonl"
    lines = path.read_text().splitlines()
    lines[9] = "{broken"
    path.write_text("\n".join(lines) + "\n")
    rc, _, err = run_cli(capsys, "census", "--out", str(cache_copy),
                         "--jobs", "1", "--strict", "--no-figures")
    assert rc == 1
    assert "census failed" in err
    assert ":10:" in err
