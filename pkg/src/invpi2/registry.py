"""Case registry: the built-in hypergeometric cases, operator-defined user
cases, and the bundled data files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction as F
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType

from .cyode import CaseSpec, ThetaOperator, parse_operator

_B = "binom"

HYPERGEOMETRIC = MappingProxyType(
    {
        c.id: c
        for c in [
            CaseSpec("t1", F(1, 5), F(2, 5), 4 * 5**5, f"{_B}(2*n,n)^3*{_B}(3*n,n)*{_B}(5*n,2*n)"),
            CaseSpec("t2", F(1, 10), F(3, 10), 4 * 8 * 10**5, f"{_B}(2*n,n)^2*{_B}(3*n,n)*{_B}(5*n,2*n)*{_B}(10*n,5*n)"),
            CaseSpec("t3", F(1, 2), F(1, 2), 4 * 2**8, f"{_B}(2*n,n)^5"),
            CaseSpec("t4", F(1, 3), F(1, 3), 4 * 3**6, f"{_B}(2*n,n)^3*{_B}(3*n,n)^2"),
            CaseSpec("t5", F(1, 2), F(1, 3), 4 * 2**4 * 3**3, f"{_B}(2*n,n)^4*{_B}(3*n,n)"),
            CaseSpec("t6", F(1, 2), F(1, 4), 4 * 2**10, f"{_B}(2*n,n)^4*{_B}(4*n,2*n)"),
            CaseSpec("t7", F(1, 8), F(3, 8), 4 * 2**16, f"{_B}(2*n,n)^3*{_B}(4*n,2*n)*{_B}(8*n,4*n)"),
            CaseSpec("t8", F(1, 6), F(1, 3), 4 * 2**4 * 3**6, f"{_B}(2*n,n)^3*{_B}(4*n,2*n)*{_B}(6*n,2*n)"),
            CaseSpec("t9", F(1, 12), F(5, 12), 4 * 12**6, f"{_B}(2*n,n)^3*{_B}(6*n,2*n)*{_B}(12*n,6*n)"),
            CaseSpec("t10", F(1, 4), F(1, 4), 4 * 2**12, f"{_B}(2*n,n)^3*{_B}(4*n,2*n)^2"),
            CaseSpec("t11", F(1, 4), F(1, 3), 4 * 12**3, f"{_B}(2*n,n)^3*{_B}(3*n,n)*{_B}(4*n,2*n)"),
            CaseSpec("t12", F(1, 6), F(1, 4), 4 * 2**10 * 3**3, f"{_B}(2*n,n)^2*{_B}(3*n,n)*{_B}(4*n,2*n)*{_B}(6*n,3*n)"),
            CaseSpec("t13", F(1, 6), F(1, 6), 4 * 2**8 * 3**6, f"{_B}(2*n,n)*{_B}(3*n,n)^2*{_B}(6*n,3*n)^2"),
            CaseSpec("t14", F(1, 2), F(1, 6), 4 * 2**8 * 3**3, f"{_B}(2*n,n)^3*{_B}(3*n,n)*{_B}(6*n,3*n)"),
        ]
    }
)


def _data_path(name: str):
    return resources.files("invpi2") / "data" / name


def bundled_operator(name: str) -> ThetaOperator:
    """Operator shipped in the package data directory, e.g. ``"t8_yy.op"``."""
    return parse_operator(_data_path(name).read_text())


def bundled_json(name: str):
    return json.loads(_data_path(name).read_text())


def bundled_names(suffix: str) -> list[str]:
    return sorted(p.name for p in (resources.files("invpi2") / "data").iterdir() if p.name.endswith(suffix))


@dataclass(frozen=True)
class UserCase:
    """A family given by an operator rather than by (s1, s2): the operator,
    the A_n expression, and optionally invariants and the e3 series."""

    id: str
    operator: ThetaOperator
    seq: str | None = None
    invariants: tuple | None = None  # (e, h, f)
    e3: tuple | None = None  # coefficients of e3(z), e3(0) = 0
    description: str = ""


def _case_from_json(entry: dict, base=None) -> UserCase:
    from .store import decode

    op = entry["operator"]
    if "\n" in op:
        L = parse_operator(op)
    elif base is None:
        L = bundled_operator(op)
    else:
        L = parse_operator((base / op).read_text())
    inv = entry.get("invariants")
    if inv is not None:
        inv = tuple(F(decode(inv[k])) for k in ("e", "h", "f"))
    e3 = entry.get("e3")
    if e3 is not None:
        e3 = tuple(F(decode(c)) for c in e3)
    return UserCase(entry["id"], L, entry.get("seq"), inv, e3, entry.get("description", ""))


@lru_cache(maxsize=1)
def user_cases() -> MappingProxyType:
    """Bundled operator-defined families, keyed by id."""
    cases = [_case_from_json(e) for e in bundled_json("cases.json")]
    out = {c.id: c for c in cases}
    if len(out) != len(cases) or set(out) & set(HYPERGEOMETRIC):
        raise ValueError("duplicate case ids in cases.json")
    return MappingProxyType(out)


def load_case_file(path) -> UserCase:
    """A user case from a ``.op`` operator file or a ``.json`` case file.

    A JSON case file holds one object with the keys of ``cases.json``; its
    ``operator`` entry is either operator text or a path relative to the
    JSON file.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such case file: {path}")
    if path.suffix == ".json":
        entry = json.loads(path.read_text())
        return _case_from_json(entry, path.parent)
    return UserCase(path.stem, parse_operator(path.read_text()))


def resolve_case(name: str) -> CaseSpec | UserCase:
    """Look up a built-in id, a bundled user case, or a case file path."""
    if name in HYPERGEOMETRIC:
        return HYPERGEOMETRIC[name]
    if name in user_cases():
        return user_cases()[name]
    if Path(name).suffix in (".op", ".json") or Path(name).exists():
        return load_case_file(name)
    raise KeyError(f"unknown case {name!r}")
