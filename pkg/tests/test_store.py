import json
from fractions import Fraction

from hypothesis import given, strategies as st

from invpi2.hunter import HuntCandidate, Invariants
from invpi2.numkernel import QuadExt, Real, const_pi
from invpi2.registry import _data_path
from invpi2.store import ResultStore, decode, dumps, encode, load_records, loads
from invpi2.verifier import CongruenceReport, CongruenceSpec, FormulaRecord

fracs = st.fractions(max_denominator=10**30)
quads = st.builds(QuadExt, fracs, fracs, st.sampled_from([2, 3, 5, 7, 41]))


@given(fracs)
def test_fraction_roundtrip(x):
    assert loads(dumps(x)) == x


@given(quads)
def test_quadext_roundtrip(x):
    y = loads(dumps(x))
    assert QuadExt.coerce(y) == x


@given(st.integers(-(10**60), 10**60))
def test_big_ints_stay_json_ints(n):
    assert json.loads(dumps(n)) == n
    assert loads(dumps(n)) == n


def test_real_roundtrip():
    r = const_pi(40)
    back = loads(dumps(r))
    assert back.digits == 40 and back.close_to(r, 39)


def test_records_roundtrip(tmp_path):
    cand = HuntCandidate("t3", Fraction(1), -1, t=const_pi(30), j=Fraction(25), z=Fraction(-1, 4096),
                         a=QuadExt(0, Fraction(15, 256), 3), flags=["slow"], status="unverified")
    recs = [
        cand,
        Invariants(Fraction(5, 3), Fraction(10), Fraction(1)),
        FormulaRecord("binom(2*n,n)^5", Fraction(-1, 4096), Fraction(1, 8), 1, Fraction(5, 2), 1, name="x"),
        CongruenceSpec("binom(2*n,n)", Fraction(1, 4), 1, 0, 0, 3, 1, excluded=[41]),
        CongruenceReport("x", 7, 3, 5, 5, True),
    ]
    path = tmp_path / "out.jsonl"
    store = ResultStore(path)
    assert store.append(recs) == 5
    back = store.read()
    assert [type(r) for r in back] == [type(r) for r in recs]
    assert back[0].z == cand.z and back[0].a == cand.a and back[0].t.close_to(cand.t, 29)
    # writing what was read gives the same bytes
    path2 = tmp_path / "again.jsonl"
    ResultStore(path2).append(back)
    assert path.read_bytes() == path2.read_bytes()


def test_append_only(tmp_path):
    path = tmp_path / "s.jsonl"
    store = ResultStore(path)
    store.append([Fraction(1, 2)])
    store.append([Fraction(1, 3)])
    assert store.read() == [Fraction(1, 2), Fraction(1, 3)]
    assert store.append([]) == 0


def test_bundled_files_load():
    recs = load_records(_data_path("formulas.json"))
    assert all(isinstance(r, FormulaRecord) for r in recs)
    assert len({r.name for r in recs}) == len(recs)
    specs = load_records(_data_path("congruences.json"))
    assert all(isinstance(s, CongruenceSpec) for s in specs)


def test_unknown_type_rejected():
    import pytest

    with pytest.raises(ValueError):
        decode({"type": "Nope"})
    with pytest.raises(TypeError):
        encode(object())
