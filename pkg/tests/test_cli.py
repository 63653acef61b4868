import io
import json

import pytest

from invpi2.cli import main
from invpi2.store import ResultStore


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_frobenius():
    code, text = run("frobenius", "t3", "--order", "3")
    assert code == 0
    assert text.splitlines()[0] == "a0: 1 32 7776 3200000"


def test_invariants_closed_form():
    code, text = run("invariants", "t8")
    assert code == 0
    assert "e = 5\nh = 70\nf = 16/3" in text


def test_hunt_row(tmp_path):
    out = tmp_path / "h.jsonl"
    code, text = run("hunt", "t3", "--sign", "-", "--k-grid", "1", "--digits", "40", "--out", str(out))
    assert code == 0
    assert "j=25 z=-1/4096 tau2=5 a=1/8 b=1 c=5/2" in text
    assert "status=confirmed" in text
    [rec] = ResultStore(out).read()
    assert rec.j == 25


def test_hunt_empty_grid():
    assert run("hunt", "t3", "--k-grid", "") == (0, "")


def test_hunt_usage_errors():
    assert run("hunt", "nosuch")[0] == 2
    assert run("hunt", "t3", "--k-grid", "i/0:0..3")[0] == 2
    assert run("hunt", "t3", "--seq", "binom(2*n")[0] == 2
    assert run("hunt", "t3", "--digits", "5")[0] == 2
    assert run("bogus")[0] == 2


def test_verify_and_out(tmp_path):
    out = tmp_path / "v.jsonl"
    code, text = run("verify", "formulas.json", "--name", "eq1", "--name", "t3_1025", "--digits", "40", "--out", str(out))
    assert code == 0
    assert "eq1: verified 40 digits" in text
    assert "t3_1025: unverified" in text
    recs = {r.name: r for r in ResultStore(out).read()}
    assert recs["eq1"].status == "confirmed"
    assert recs["t3_1025"].status == "unverified"


def test_verify_failure_exit_code(tmp_path):
    bad = [{"type": "FormulaRecord", "seq": "binom(2*n,n)^5", "z": {"num": "-1", "den": "4096"},
            "a": {"num": "1", "den": "8"}, "b": 1, "c": {"num": "5", "den": "2"}, "r": 2, "name": "bad"}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, text = run("verify", str(path), "--digits", "30")
    assert code == 4
    assert "FAILED" in text


def test_verify_missing_file():
    assert run("verify", "no-such.json")[0] == 2


def test_congruence(tmp_path):
    code, text = run("congruence", "congruences.json", "--name", "eq1", "--primes", "5..19", "--mod-exp", "5")
    assert code == 0
    assert "eq1 p=5: skipped" in text
    assert "eq1 p=19 mod p^5: pass" in text
    code, _ = run("congruence", "congruences.json", "--name", "eq1", "--primes", "7..19", "--mod-exp", "6")
    assert code == 4


def test_congruence_bad_range():
    assert run("congruence", "congruences.json", "--primes", "5-50")[0] == 2
