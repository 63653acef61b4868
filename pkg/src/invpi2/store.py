"""JSON encoding of exact results and an append-only record file.

Exact rationals are written as {"num": "...", "den": "..."} with decimal
strings and quadratic surds as {"rat": ..., "coef": ..., "disc": d}, so no
exact quantity ever passes through a float.  Numeric values (Real) are
written as decimal strings together with their digit count; integers stay
plain JSON integers.  Records are
one JSON object per line, with sorted keys, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .numkernel import QuadExt, Real, context


def _record_types() -> dict[str, type]:
    from .hunter import HuntCandidate, Invariants
    from .verifier import CongruenceReport, CongruenceSpec, FormulaRecord

    return {c.__name__: c for c in (HuntCandidate, Invariants, FormulaRecord, CongruenceSpec, CongruenceReport)}


def encode(x):
    # ints stay JSON integers (exact at any size); bool is an int subclass
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return {"num": str(x.numerator), "den": str(x.denominator)}
    if isinstance(x, QuadExt):
        return {"rat": encode(x.rat), "coef": encode(x.coef), "disc": x.disc}
    if isinstance(x, Real):
        return {"real": context(x.digits).nstr(x.value, x.digits, strip_zeros=False), "digits": x.digits}
    if dataclasses.is_dataclass(x):
        out = {"type": type(x).__name__}
        for f in dataclasses.fields(x):
            out[f.name] = encode(getattr(x, f.name))
        return out
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode(obj):
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    if not isinstance(obj, dict):
        return obj
    keys = set(obj)
    if keys == {"num", "den"}:
        return Fraction(int(obj["num"]), int(obj["den"]))
    if keys == {"rat", "coef", "disc"}:
        q = QuadExt(decode(obj["rat"]), decode(obj["coef"]), int(obj["disc"]))
        return q.rat if q.is_rational else q
    if keys == {"real", "digits"}:
        d = int(obj["digits"])
        return Real(context(d).mpf(obj["real"]), d)
    if "type" in obj:
        cls = _record_types().get(obj["type"])
        if cls is None:
            raise ValueError(f"unknown record type {obj['type']!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: decode(v) for k, v in obj.items() if k in names})
    return {k: decode(v) for k, v in obj.items()}


def dumps(x) -> str:
    return json.dumps(encode(x), sort_keys=True, separators=(",", ":"))


def loads(text: str):
    return decode(json.loads(text))


class ResultStore:
    """Append-only JSON-lines file of records."""

    def __init__(self, path):
        self.path = Path(path)

    def append(self, records: Iterable) -> int:
        lines = [dumps(r) + "\n" for r in records]
        if not lines:
            return 0
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.writelines(lines)
            fh.flush()
            os.fsync(fh.fileno())
        return len(lines)

    def __iter__(self) -> Iterator:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield loads(line)
                except (ValueError, TypeError) as exc:
                    raise ValueError(f"{self.path}:{lineno}: {exc}") from None

    def read(self) -> list:
        return list(self)


def load_records(path) -> list:
    """Read a record file: a JSON array (hand-written inputs) or JSON lines."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        return decode(json.loads(text))
    return [loads(line) for line in text.splitlines() if line.strip()]
