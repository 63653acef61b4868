import json
from fractions import Fraction

import pytest

from invpi2.cyode import check_mum
from invpi2.registry import HYPERGEOMETRIC, UserCase, bundled_operator, load_case_file, resolve_case, user_cases
from invpi2.seqlang import evaluate
from invpi2.series import PowerSeries


def test_fourteen_hypergeometric_cases():
    assert sorted(HYPERGEOMETRIC, key=lambda s: int(s[1:])) == [f"t{i}" for i in range(1, 15)]


@pytest.mark.parametrize("cid", sorted(user_cases()))
def test_user_case_sequence_solves_operator(cid):
    case = user_cases()[cid]
    if case.seq is None or case.operator.order != 5:
        pytest.skip("sequence belongs to a different operator")
    y = PowerSeries([Fraction(evaluate(case.seq, n)) for n in range(15)])
    assert all(c == 0 for c in case.operator.apply(y).coeffs)
    assert check_mum(case.operator)


def test_resolve_case():
    assert resolve_case("t8") is HYPERGEOMETRIC["t8"]
    assert isinstance(resolve_case("a_alpha"), UserCase)
    with pytest.raises(KeyError):
        resolve_case("nope")
    with pytest.raises(FileNotFoundError):
        resolve_case("missing.op")


def test_load_case_files(tmp_path):
    op = bundled_operator("a_beta.op")
    (tmp_path / "x.op").write_text(op.to_text())
    c = load_case_file(tmp_path / "x.op")
    assert c.id == "x" and c.operator == op and c.seq is None
    entry = {"id": "y", "operator": "x.op", "seq": "binom(2*n,n)", "invariants": {"e": 1, "h": 2, "f": {"num": "1", "den": "3"}}}
    (tmp_path / "y.json").write_text(json.dumps(entry))
    c = resolve_case(str(tmp_path / "y.json"))
    assert c.operator == op and c.invariants == (1, 2, Fraction(1, 3))
