import io
import json
import subprocess
import sys

import pytest

from archlogic.cli import read_config, run
from archlogic.corpora import ring_corpus
from archlogic.logic import L_VAL, parse_sentence, print_canonical

SQRT2 = "(exists (x K) (= (*.K x x) (+.K 1.K 1.K)))"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def _no_env_budget(monkeypatch):
    monkeypatch.delenv("FF_BUDGET", raising=False)


def test_decide_fp7_yes():
    code, out, _ = cli("decide", "--oracle", "fp:7", SQRT2)
    assert code == 0 and out.startswith("yes")


def test_decide_fp3_no_and_json():
    code, out, _ = cli("--json", "decide", "--oracle", "fp:3", SQRT2)
    assert code == 1
    obj = json.loads(out)
    assert obj["trace_v"] == 1 and obj["command"] == "decide"
    assert obj["verdict"] == "no" and obj["soundness"] == "exact" and "trace" in obj


def test_translate_residue():
    code, out, _ = cli("translate", "--map", "residue", "(exists (x K) (= x 0.K))")
    assert code == 0 and out.strip() == "(exists (x k) (= x 0.k))"


def test_translate_pipe_through():
    for s in ring_corpus(seed=7, count=60, depth=3, quantifiers=2):
        code, out, _ = cli("translate", "--map", "residue", print_canonical(s))
        assert code == 0
        assert print_canonical(parse_sentence(out.strip(), L_VAL)) == out.strip()


def test_translate_onesorted():
    code, out, _ = cli("translate", "--map", "onesorted", "(forall (x K) (O x))")
    assert code == 0 and out.strip() == "(forall (x K) (not (<.G (v x) 0.G)))"


def test_reduce_zero_trace():
    code, out, _ = cli("--json", "reduce", "--alg", "zero", "--oracle", "sigma=toy:4", "r1")
    assert code == 0
    obj = json.loads(out)
    steps = [(e["step"], e["oracle"], e["query"], e["verdict"]) for e in obj["trace"] if "oracle" in e]
    assert steps == [(1, "sigma>>0", "r1", "yes"), (2, "sigma>0", "r1", "no"),
                     (2, "sigma>0", "(or r1 (not r1))", "yes"),
                     (3, "sigma", "(or r1 (not r1))", "yes")]


def test_reduce_positive_no():
    code, out, _ = cli("reduce", "--alg", "positive", "--oracle", "gg0=toy:4", "(or r1 (not r2))")
    assert code == 1 and out.startswith("no")


def test_reduce_uniform():
    code, _, _ = cli("reduce", "--alg", "uniform", "--n", "1", "--oracle", "sigma=toy:4", "r2")
    assert code == 1
    code, _, _ = cli("reduce", "--alg", "uniform", "--n", "2", "--via", "sigma>0",
                     "--oracle", "pos=toy:4", "(not r2)")
    assert code == 0


def test_reduce_fields_split():
    split = ["reduce", "--alg", "split", "--oracle", "sigma0=q-exists1", "--oracle", "pos=bounded-primes:50"]
    # F_2 has no half
    assert cli(*split, "(exists (x K) (= (+.K x x) 1.K))")[0] == 1
    # true everywhere, but a prime bound never certifies that
    assert cli(*split, "(exists (x K) (= x 0.K))")[0] == 2


def test_eval_and_classify():
    assert cli("eval", "--model", "zmod:4", "(exists (x K) (and (= (*.K x x) 0.K) (not (= x 0.K))))")[0] == 0
    assert cli("eval", "--model", "fp:2", "(exists (x K) (and (= (*.K x x) 0.K) (not (= x 0.K))))")[0] == 1
    code, out, _ = cli("--json", "classify", "--sig", "ring", SQRT2)
    assert code == 0 and json.loads(out)["flags"]["exists"] is True


def test_parse_code_and_decode():
    code, out, _ = cli("parse", "--sig", "ring", "--code", "(true)")
    assert code == 0 and out.split() == ["(true)", str(0x01287472756529)]
    assert cli("parse", "--sig", "ring", "--decode", str(0x01287472756529))[1].strip() == "(true)"
    assert cli("parse", "--sig", "ring", "--decode", "5")[0] == 1


def test_eliminate_toy():
    code, out, _ = cli("--json", "eliminate", "--target", "(or s1 s2)", "--bridge", "toy:3")
    obj = json.loads(out)
    assert code == 0 and obj["status"] == "found"
    assert obj["candidate"] == "(or r1 r2)" and obj["pairs_visited"] == 22


def test_eliminate_budget_and_resume(tmp_path, monkeypatch):
    frontier = tmp_path / "f.json"
    code, out, _ = cli("--json", "--budget", "9", "eliminate", "--target", "(or s1 s2)",
                       "--bridge", "toy:3", "--save-frontier", str(frontier))
    assert code == 2 and json.loads(out)["status"] == "budget"
    code, out, _ = cli("--json", "eliminate", "--target", "(or s1 s2)", "--bridge", "toy:3",
                       "--resume", str(frontier))
    assert code == 0 and json.loads(out)["pairs_visited"] == 22
    monkeypatch.setenv("FF_BUDGET", "3")
    code, out, _ = cli("--json", "--budget", "1000", "eliminate", "--target", "(or s1 s2)", "--bridge", "toy:3")
    assert code == 2 and json.loads(out)["pairs_visited"] == 3


def test_eliminate_residue_fast_path():
    target = "(exists (x k) (= (*.k x x) (+.k 1.k 1.k)))"
    code, out, _ = cli("eliminate", "--target", target, "--bridge", "residue", "--prover", "ground",
                       "--fast-path", "--graded")
    assert code == 0 and out.splitlines()[0] == SQRT2


def test_verify():
    assert cli("verify", "--bridge", "toy:3")[0] == 0
    assert cli("verify", "--bridge", "residue", "--count", "60")[0] == 0


def test_config_file(tmp_path):
    cfg = tmp_path / "archlogic.conf"
    cfg.write_text("# defaults\nbudget = 5\nprime_bound=20\n")
    assert read_config(str(cfg)) == {"budget": 5, "prime_bound": 20}
    code, out, _ = cli("--config", str(cfg), "--json", "eliminate", "--target", "(or s1 s2)", "--bridge", "toy:3")
    assert code == 2 and json.loads(out)["pairs_visited"] == 5
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    assert cli("--config", str(bad), "parse", "(true)")[0] == 64


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["decide", "--oracle", "fp:7"],
    ["decide", "--oracle", "fp:7", "--bogus", SQRT2],
    ["decide", "--oracle", "fp:4", SQRT2],
    ["decide", "--oracle", "warp", SQRT2],
    ["parse", "(exists x)"],
    ["reduce", "--alg", "zero", "r1"],
    ["reduce", "--alg", "uniform", "--oracle", "sigma=toy:4", "r1"],
    ["decide", "--oracle", "q-exists1", "(exists (x K) (exists (y K) (= (*.K x y) 1.K)))"],
])
def test_usage_errors(argv):
    code, out, err = cli(*argv)
    assert code == 64
    assert out == "" and err


def test_global_flags_after_subcommand():
    a = cli("--json", "--seed", "3", "verify", "--bridge", "toy:2")
    b = cli("verify", "--bridge", "toy:2", "--json", "--seed", "3")
    assert a == b and a[0] == 0


def test_json_deterministic():
    argv = ["--json", "--seed", "11", "verify", "--bridge", "residue", "--count", "40"]
    assert cli(*argv) == cli(*argv)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "archlogic", "decide", "--oracle", "fp:7", SQRT2],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("yes")
