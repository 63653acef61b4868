"""A small language for binomial-sum sequences, with exact and modular
evaluation.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' unsigned)?
    atom   := integer | ident | '(' expr ')' | '-' atom
            | 'binom(' expr ',' expr ')' | 'fact(' expr ')'
            | 'pow(' expr ',' expr ')' | 'sum(' ident ',' expr ',' expr ',' expr ')'

``n`` is the only free variable; ``sum`` binds its identifier over the
inclusive range.  ``binom(a, b)`` is zero unless 0 <= b <= a.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

FUNCTIONS = {"binom": 2, "fact": 1, "pow": 2, "sum": 4}
ALIASES = {"factorial": "fact", "C": "binom"}


class SeqError(ValueError):
    """Parse or evaluation error; carries the source position when known."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(msg + where)


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class IntPow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Binom:
    top: "Node"
    bottom: "Node"


@dataclass(frozen=True)
class Fact:
    arg: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: "Node"


@dataclass(frozen=True)
class Sum:
    var: str
    lo: "Node"
    hi: "Node"
    body: "Node"


Node = Union[Num, Var, Neg, BinOp, IntPow, Binom, Fact, Pow, Sum]


# -- lexer / parser ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _position(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _tokenize(text: str):
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.lastindex is None:
            break
        line, col = _position(text, m.start(m.lastindex))
        kind = ("int", "ident", "op")[m.lastindex - 1]
        toks.append((kind, m.group(m.lastindex), line, col))
        pos = m.end()
    toks.append(("end", "", *_position(text, len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise SeqError(msg, tok[2], tok[3])

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            self.error(f"expected '{want}', found '{got}'")
        self.i += 1
        return tok

    def accept(self, value):
        if self.peek()[0] == "op" and self.peek()[1] == value:
            self.i += 1
            return True
        return False

    def expr(self, scope):
        node = self.term(scope)
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term(scope))
        return node

    def term(self, scope):
        node = self.factor(scope)
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor(scope))
        return node

    def factor(self, scope):
        node = self.atom(scope)
        if self.accept("^"):
            tok = self.peek()
            if tok[0] != "int":
                self.error("exponent after '^' must be an unsigned integer; use pow(b, e) otherwise")
            node = IntPow(node, int(self.take()[1]))
        return node

    def atom(self, scope):
        tok = self.peek()
        if tok[0] == "int":
            self.i += 1
            return Num(int(tok[1]))
        if tok[0] == "op" and tok[1] == "(":
            self.i += 1
            node = self.expr(scope)
            self.take("op", ")")
            return node
        if tok[0] == "op" and tok[1] == "-":
            self.i += 1
            return Neg(self.atom(scope))
        if tok[0] == "ident":
            name = ALIASES.get(tok[1], tok[1])
            self.i += 1
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if name not in FUNCTIONS:
                    self.error(f"unknown function '{tok[1]}'", tok)
                self.take("op", "(")
                if name == "sum":
                    var = self.take("ident")[1]
                    if var in FUNCTIONS:
                        self.error(f"'{var}' cannot be a summation variable", tok)
                    self.take("op", ",")
                    lo = self.expr(scope)
                    self.take("op", ",")
                    hi = self.expr(scope)
                    self.take("op", ",")
                    body = self.expr(scope | {var})
                    self.take("op", ")")
                    return Sum(var, lo, hi, body)
                args = [self.expr(scope)]
                while self.accept(","):
                    args.append(self.expr(scope))
                self.take("op", ")")
                if len(args) != FUNCTIONS[name]:
                    self.error(f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}", tok)
                return {"binom": Binom, "fact": Fact, "pow": Pow}[name](*args)
            if name not in scope:
                self.error(f"unbound variable '{tok[1]}'", tok)
            return Var(name)
        self.error(f"unexpected '{tok[1] or 'end of input'}'")


def parse(text: str) -> Node:
    """Parse a sequence expression; ``n`` is the only free variable."""
    p = _Parser(text)
    node = p.expr(frozenset({"n"}))
    if p.peek()[0] != "end":
        p.error(f"unexpected '{p.peek()[1]}'")
    return node


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def pretty(node: Node) -> str:
    """Text that parses back to the same AST."""
    return _pp(node, 0)


def _pp(node, ctx_prec):
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _pp(node.arg, 4)
        if isinstance(node.arg, (IntPow, BinOp)):
            inner = f"({_pp(node.arg, 0)})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = _pp(node.left, p)
        right = _pp(node.right, p + 1)
        s = f"{left} {node.op} {right}" if p == 1 else f"{left}{node.op}{right}"
        return f"({s})" if p < ctx_prec else s
    if isinstance(node, IntPow):
        base = _pp(node.base, 4)
        if isinstance(node.base, IntPow):
            base = f"({base})"
        return f"{base}^{node.exp}"
    if isinstance(node, Binom):
        return f"binom({_pp(node.top, 0)}, {_pp(node.bottom, 0)})"
    if isinstance(node, Fact):
        return f"fact({_pp(node.arg, 0)})"
    if isinstance(node, Pow):
        return f"pow({_pp(node.base, 0)}, {_pp(node.exp, 0)})"
    if isinstance(node, Sum):
        return f"sum({node.var}, {_pp(node.lo, 0)}, {_pp(node.hi, 0)}, {_pp(node.body, 0)})"
    raise TypeError(f"not a sequence node: {node!r}")


# -- exact evaluation -------------------------------------------------------------


def _as_index(x, what: str) -> int:
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise SeqError(f"{what} must be an integer, got {x}")
        x = x.numerator
    return int(x)


@functools.lru_cache(maxsize=1 << 16)
def _comb(a: int, b: int) -> int:
    return math.comb(a, b)


def _exact(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_exact(node.arg, env)
    if isinstance(node, BinOp):
        a, b = _exact(node.left, env), _exact(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0:
            raise SeqError("division by zero")
        r = Fraction(a, 1) / b
        return r.numerator if r.denominator == 1 else r
    if isinstance(node, IntPow):
        return _exact(node.base, env) ** node.exp
    if isinstance(node, Pow):
        b = _exact(node.base, env)
        e = _as_index(_exact(node.exp, env), "exponent")
        if e < 0:
            if b == 0:
                raise SeqError("zero to a negative power")
            return Fraction(1) / Fraction(b) ** (-e)
        return b**e
    if isinstance(node, Binom):
        top = _as_index(_exact(node.top, env), "binom argument")
        bot = _as_index(_exact(node.bottom, env), "binom argument")
        if top < 0:
            raise SeqError(f"binom with negative top argument {top}")
        return _comb(top, bot) if 0 <= bot <= top else 0
    if isinstance(node, Fact):
        k = _as_index(_exact(node.arg, env), "factorial argument")
        if k < 0:
            raise SeqError(f"factorial of negative number {k}")
        return math.factorial(k)
    if isinstance(node, Sum):
        lo = _as_index(_exact(node.lo, env), "sum bound")
        hi = _as_index(_exact(node.hi, env), "sum bound")
        acc = 0
        inner = dict(env)
        for k in range(lo, hi + 1):
            inner[node.var] = k
            acc += _exact(node.body, inner)
        return acc
    raise TypeError(f"not a sequence node: {node!r}")


def evaluate(e: Node | str, n: int) -> int:
    """Exact A_n; an error if it is not an integer."""
    if isinstance(e, str):
        e = parse(e)
    if n < 0:
        raise SeqError("n must be nonnegative")
    v = _exact(e, {"n": n})
    if isinstance(v, Fraction):
        if v.denominator != 1:
            raise SeqError(f"A_{n} = {v} is not an integer")
        v = v.numerator
    return v


# evaluation is the public name used elsewhere; eval mirrors the grammar docs
eval_exact = evaluate


# -- modular evaluation ---------------------------------------------------------


class _LostPrecision(ArithmeticError):
    pass


class _PAdic:
    """p^v * u with u a unit known modulo p^prec (relative precision);
    prec = 0 means the value is only known to be divisible by p^v."""

    __slots__ = ("v", "u", "prec")

    def __init__(self, v, u, prec):
        self.v, self.u, self.prec = v, u, prec


@functools.lru_cache(maxsize=None)
def _unit_factorials(p: int, K: int, size: int) -> tuple:
    """u(k) = k! with all factors of p removed, mod p^K, for k < size."""
    mod = p**K
    out = [1]
    acc = 1
    for k in range(1, size):
        while k % p == 0:
            k //= p
        acc = acc * k % mod
        out.append(acc)
    return tuple(out)


def _legendre_val(k: int, p: int) -> int:
    v = 0
    while k:
        k //= p
        v += k
    return v


class _ModEval:
    def __init__(self, p: int, K: int):
        self.p, self.K = p, K
        self.mod = p**K
        self.size = 0
        self.table: tuple = ()

    def from_int(self, x) -> _PAdic:
        if isinstance(x, Fraction):
            a, b = self.from_int(x.numerator), self.from_int(x.denominator)
            return self.div(a, b)
        if x == 0:
            return self.zero()
        v = 0
        p = self.p
        while x % p == 0:
            x //= p
            v += 1
        return _PAdic(v, x % self.mod, self.K)

    def zero(self):
        return _PAdic(10**9, 0, 0)

    def fact(self, k: int) -> _PAdic:
        if k >= self.size:
            self.size = max(2 * self.size, k + 1, 64)
            self.table = _unit_factorials(self.p, self.K, self.size)
        return _PAdic(_legendre_val(k, self.p), self.table[k], self.K)

    def mul(self, a, b):
        if a.prec == 0 and a.u == 0 or b.prec == 0 and b.u == 0:
            return _PAdic(a.v + b.v, 0, 0)
        prec = min(a.prec, b.prec)
        return _PAdic(a.v + b.v, a.u * b.u % self.mod, prec)

    def inv(self, a):
        if a.prec == 0:
            raise _LostPrecision
        return _PAdic(-a.v, pow(a.u, -1, self.mod), a.prec)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def neg(self, a):
        return _PAdic(a.v, (-a.u) % self.mod, a.prec)

    def add(self, a, b):
        # absolute precisions v + prec
        if a.prec == 0 and a.u == 0 and a.v >= 10**8:
            return b
        if b.prec == 0 and b.u == 0 and b.v >= 10**8:
            return a
        absp = min(a.v + a.prec, b.v + b.prec)
        v = min(a.v, b.v)
        rel = absp - v
        if rel <= 0:
            return _PAdic(absp, 0, 0)
        mod = self.p**rel
        s = (a.u * self.p ** (a.v - v) + b.u * self.p ** (b.v - v)) % mod
        if s == 0:
            return _PAdic(absp, 0, 0)
        w = 0
        while s % self.p == 0:
            s //= self.p
            w += 1
        return _PAdic(v + w, s % self.mod, rel - w)

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return _PAdic(0, 1, self.K)
        if a.prec == 0:
            return _PAdic(a.v * e, 0, 0)
        return _PAdic(a.v * e, pow(a.u, e, self.mod), a.prec)

    def run(self, node, env):
        if isinstance(node, Num):
            return self.from_int(node.value)
        if isinstance(node, Var):
            return self.from_int(env[node.name])
        if isinstance(node, Neg):
            return self.neg(self.run(node.arg, env))
        if isinstance(node, BinOp):
            a, b = self.run(node.left, env), self.run(node.right, env)
            if node.op == "+":
                return self.add(a, b)
            if node.op == "-":
                return self.add(a, self.neg(b))
            if node.op == "*":
                return self.mul(a, b)
            return self.div(a, b)
        if isinstance(node, IntPow):
            return self.pow(self.run(node.base, env), node.exp)
        if isinstance(node, Pow):
            e = _as_index(_exact(node.exp, env), "exponent")
            return self.pow(self.run(node.base, env), e)
        if isinstance(node, Binom):
            top = _as_index(_exact(node.top, env), "binom argument")
            bot = _as_index(_exact(node.bottom, env), "binom argument")
            if top < 0:
                raise SeqError(f"binom with negative top argument {top}")
            if not 0 <= bot <= top:
                return self.zero()
            return self.div(self.fact(top), self.mul(self.fact(bot), self.fact(top - bot)))
        if isinstance(node, Fact):
            k = _as_index(_exact(node.arg, env), "factorial argument")
            if k < 0:
                raise SeqError(f"factorial of negative number {k}")
            return self.fact(k)
        if isinstance(node, Sum):
            lo = _as_index(_exact(node.lo, env), "sum bound")
            hi = _as_index(_exact(node.hi, env), "sum bound")
            acc = self.zero()
            inner = dict(env)
            for k in range(lo, hi + 1):
                inner[node.var] = k
                acc = self.add(acc, self.run(node.body, inner))
            return acc
        raise TypeError(f"not a sequence node: {node!r}")


def _factor(m: int) -> dict[int, int] | None:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
        if d > 10**6:
            return None
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _residue_prime_power(node, n: int, p: int, m: int) -> int:
    K = m + 8
    for _ in range(6):
        ev = _ModEval(p, K)
        try:
            val = ev.run(node, {"n": n})
        except _LostPrecision:
            K *= 2
            continue
        if val.prec == 0 and val.u == 0:
            if val.v >= m:
                return 0
        elif val.v + val.prec >= m:
            if val.v < 0:
                raise SeqError(f"A_{n} is not an integer (negative {p}-adic valuation)")
            return val.u * p**val.v % p**m
        K *= 2
    raise SeqError(f"could not reach modulus {p}^{m}; cancellation exceeds working precision")


def eval_mod(e: Node | str, n: int, modulus: int) -> int:
    """A_n mod ``modulus`` without forming A_n, via p-adic factorial tables
    and the Chinese remainder theorem."""
    if isinstance(e, str):
        e = parse(e)
    if modulus < 2:
        raise SeqError("modulus must be at least 2")
    if n < 0:
        raise SeqError("n must be nonnegative")
    fac = _factor(modulus)
    if fac is None:
        return evaluate(e, n) % modulus
    res, mod = 0, 1
    for p, m in fac.items():
        r = _residue_prime_power(e, n, p, m)
        pm = p**m
        # CRT merge
        t = (r - res) * pow(mod, -1, pm) % pm
        res += mod * t
        mod *= pm
    return res % modulus
