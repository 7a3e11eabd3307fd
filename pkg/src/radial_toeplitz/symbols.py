"""Radial symbols V(r): parsing, evaluation, support and decay analysis.

The closed grammar (whitespace insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' number)?
    atom   := number | 'r' | func '(' expr ')'
            | 'chi' '(' number ',' number ')' | '(' expr ')'
    func   := exp | sin | cos | abs | pos

``chi(a,b)`` is the indicator of [a, b] with 0 <= a < b.  ``abs`` and ``pos``
(positive part) extend the base grammar so that sign decompositions are again
symbols; every document in the base grammar parses unchanged.

Symbols compile to flat stack programs evaluated in the signed-log domain
(see ``_ops``), which keeps factors like exp(-exp(r)) meaningful far below
double underflow.  RadialSymbol values are immutable after construction and
safe to share across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import backend
from ._ops import (
    OP_NUM, OP_R, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_NEG,
    OP_EXP, OP_SIN, OP_COS, OP_CHI, OP_ABS, OP_POS,
)
from .errors import SupportUnknownError, SymbolSyntaxError

R_MAX_DEFAULT = 50.0

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Chi:
    a: float
    b: float


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/'
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float


@dataclass(frozen=True)
class Call:
    fn: str  # exp, sin, cos, abs, pos
    arg: object


@dataclass(frozen=True)
class Neg:
    arg: object


_FUNCS = ("exp", "sin", "cos", "abs", "pos")

# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise SymbolSyntaxError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise SymbolSyntaxError(f"trailing input {val!r}", pos)
        return node

    def expr(self):
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        node = self.term()
        if negate:
            node = Neg(node)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = Bin(val, node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.factor()
                node = Bin(val, node, rhs)
            else:
                return node

    def factor(self):
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            node = Pow(node, self.number("exponent"))
        return node

    def number(self, what):
        kind, val, pos = self.next()
        if kind != "num":
            raise SymbolSyntaxError(f"expected {what} number, found {val or 'end of input'!r}", pos)
        return float(val)

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val == "r":
                return Var()
            if val == "chi":
                self.expect_op("(")
                a = self.number("chi lower bound")
                self.expect_op(",")
                b = self.number("chi upper bound")
                self.expect_op(")")
                if not (0.0 <= a < b):
                    raise SymbolSyntaxError(f"chi requires 0 <= a < b, got ({a:g},{b:g})", pos)
                return Chi(a, b)
            if val in _FUNCS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            raise SymbolSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise SymbolSyntaxError(f"expected value, found {val or 'end of input'!r}", pos)


# ---------------------------------------------------------------------------
# Canonical text

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _num_text(v: float) -> str:
    return repr(float(v))


def _to_text(node, prec=0) -> str:
    if isinstance(node, Num):
        s, p = _num_text(node.value), _PREC_ATOM
    elif isinstance(node, Var):
        s, p = "r", _PREC_ATOM
    elif isinstance(node, Chi):
        s, p = f"chi({_num_text(node.a)},{_num_text(node.b)})", _PREC_ATOM
    elif isinstance(node, Call):
        s, p = f"{node.fn}({_to_text(node.arg)})", _PREC_ATOM
    elif isinstance(node, Neg):
        s, p = "-" + _to_text(node.arg, _PREC_MUL), _PREC_ADD
    elif isinstance(node, Pow):
        s, p = _to_text(node.base, _PREC_ATOM) + "^" + _num_text(node.exponent), _PREC_POW
    elif isinstance(node, Bin):
        if node.op in "+-":
            p = _PREC_ADD
            rhs = _to_text(node.rhs, _PREC_ADD + 1)
        else:
            p = _PREC_MUL
            rhs = _to_text(node.rhs, _PREC_MUL + 1)
        s = _to_text(node.lhs, p) + node.op + rhs
    else:
        raise TypeError(f"not an AST node: {node!r}")
    return f"({s})" if p < prec else s


# ---------------------------------------------------------------------------
# Compilation to stack programs


def _compile(node, ops, a1, a2):
    if isinstance(node, Num):
        ops.append(OP_NUM); a1.append(node.value); a2.append(0.0)
        return 1
    if isinstance(node, Var):
        ops.append(OP_R); a1.append(0.0); a2.append(0.0)
        return 1
    if isinstance(node, Chi):
        ops.append(OP_CHI); a1.append(node.a); a2.append(node.b)
        return 1
    if isinstance(node, Neg):
        d = _compile(node.arg, ops, a1, a2)
        ops.append(OP_NEG); a1.append(0.0); a2.append(0.0)
        return d
    if isinstance(node, Pow):
        d = _compile(node.base, ops, a1, a2)
        ops.append(OP_POW); a1.append(node.exponent); a2.append(0.0)
        return d
    if isinstance(node, Call):
        d = _compile(node.arg, ops, a1, a2)
        code = {"exp": OP_EXP, "sin": OP_SIN, "cos": OP_COS, "abs": OP_ABS, "pos": OP_POS}[node.fn]
        ops.append(code); a1.append(0.0); a2.append(0.0)
        return d
    if isinstance(node, Bin):
        dl = _compile(node.lhs, ops, a1, a2)
        dr = _compile(node.rhs, ops, a1, a2)
        code = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}[node.op]
        ops.append(code); a1.append(0.0); a2.append(0.0)
        return max(dl, 1 + dr)
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# RadialSymbol


class RadialSymbol:
    """A parsed radial symbol; immutable, shareable across threads."""

    __slots__ = ("ast", "text", "breakpoints", "_ops", "_arg1", "_arg2", "_nstack")

    def __init__(self, ast):
        self.ast = ast
        self.text = _to_text(ast)
        ops, a1, a2 = [], [], []
        self._nstack = _compile(ast, ops, a1, a2)
        self._ops = np.asarray(ops, dtype=np.int64)
        self._arg1 = np.asarray(a1, dtype=np.float64)
        self._arg2 = np.asarray(a2, dtype=np.float64)
        pts = set()
        _collect_chi(ast, pts)
        self.breakpoints = tuple(sorted(pts))

    def signed_log(self, r):
        """(sign, log|V|) arrays at radii r (ndarray, r >= 0)."""
        r = np.ascontiguousarray(r, dtype=np.float64)
        return backend.kernels().eval_program(
            self._ops, self._arg1, self._arg2, r, self._nstack)

    def __call__(self, r):
        sign, logabs = self.signed_log(np.atleast_1d(np.asarray(r, dtype=float)))
        with np.errstate(over="ignore"):
            vals = sign * np.exp(logabs)
        return vals if np.ndim(r) else float(vals[0])

    def __eq__(self, other):
        return isinstance(other, RadialSymbol) and self.ast == other.ast

    def __hash__(self):
        return hash(self.text)

    def __repr__(self):
        return f"RadialSymbol({self.text!r})"


def _collect_chi(node, out):
    if isinstance(node, Chi):
        out.add(node.a)
        out.add(node.b)
    elif isinstance(node, (Neg, Call)):
        _collect_chi(node.arg, out)
    elif isinstance(node, Pow):
        _collect_chi(node.base, out)
    elif isinstance(node, Bin):
        _collect_chi(node.lhs, out)
        _collect_chi(node.rhs, out)


# ---------------------------------------------------------------------------
# Public operations


def parse_symbol(text: str) -> RadialSymbol:
    """Parse symbol text into a RadialSymbol.

    Raises SymbolSyntaxError (with position) on bad input, including unknown
    identifiers and chi bounds violating 0 <= a < b.
    """
    if not text or not text.strip():
        raise SymbolSyntaxError("empty symbol text", 0)
    return RadialSymbol(_Parser(text).parse())


def evaluate(V: RadialSymbol, r: float) -> float:
    """V(r) at a single radius r >= 0."""
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    return V(float(r))


def decompose_signs(V: RadialSymbol):
    """Pointwise (V_plus, V_minus, V_abs) as clamped wrappers around V."""
    return (
        RadialSymbol(Call("pos", V.ast)),
        RadialSymbol(Call("pos", Neg(V.ast))),
        RadialSymbol(Call("abs", V.ast)),
    )


# --- constant folding and structural support analysis ---------------------


def _fold(node):
    if isinstance(node, (Num, Var, Chi)):
        return node
    if isinstance(node, Neg):
        a = _fold(node.arg)
        if isinstance(a, Num):
            return Num(-a.value)
        return Neg(a)
    if isinstance(node, Pow):
        b = _fold(node.base)
        if isinstance(b, Num):
            if b.value == 0.0 and node.exponent > 0:
                return Num(0.0)
            if b.value > 0.0 or node.exponent == round(node.exponent):
                return Num(float(b.value ** node.exponent))
        return Pow(b, node.exponent)
    if isinstance(node, Call):
        a = _fold(node.arg)
        if isinstance(a, Num):
            fns = {"exp": math.exp, "sin": math.sin, "cos": math.cos,
                   "abs": abs, "pos": lambda v: max(v, 0.0)}
            return Num(float(fns[node.fn](a.value)))
        return Call(node.fn, a)
    if isinstance(node, Bin):
        lhs, rhs = _fold(node.lhs), _fold(node.rhs)
        lz = isinstance(lhs, Num) and lhs.value == 0.0
        rz = isinstance(rhs, Num) and rhs.value == 0.0
        if node.op == "*" and (lz or rz):
            return Num(0.0)
        if node.op == "+" and lz:
            return rhs
        if node.op in "+-" and rz:
            return lhs
        if node.op == "-" and lz:
            return _fold(Neg(rhs))
        if node.op == "/" and lz:
            return Num(0.0)
        if isinstance(lhs, Num) and isinstance(rhs, Num):
            v = {"+": lhs.value + rhs.value, "-": lhs.value - rhs.value,
                 "*": lhs.value * rhs.value,
                 "/": lhs.value / rhs.value if rhs.value != 0 else math.inf}[node.op]
            return Num(float(v))
        return Bin(node.op, lhs, rhs)
    raise TypeError(node)


def _support_ub(node) -> float:
    """Structural upper bound b with node(r) = 0 for all r > b (inf if none)."""
    if isinstance(node, Num):
        return 0.0 if node.value == 0.0 else math.inf
    if isinstance(node, Var):
        return math.inf
    if isinstance(node, Chi):
        return node.b
    if isinstance(node, Neg):
        return _support_ub(node.arg)
    if isinstance(node, Call):
        if node.fn in ("abs", "pos"):
            return _support_ub(node.arg)
        return math.inf  # exp never vanishes; sin/cos zeros are isolated
    if isinstance(node, Pow):
        if node.exponent > 0:
            return _support_ub(node.base)
        return math.inf
    if isinstance(node, Bin):
        ul, ur = _support_ub(node.lhs), _support_ub(node.rhs)
        if node.op in "+-":
            return max(ul, ur)
        if node.op == "*":
            return min(ul, ur)
        return ul  # division: support of the numerator
    raise TypeError(node)


def _drop_chi(node):
    if isinstance(node, Chi):
        return Num(0.0)
    if isinstance(node, Neg):
        return Neg(_drop_chi(node.arg))
    if isinstance(node, Pow):
        return Pow(_drop_chi(node.base), node.exponent)
    if isinstance(node, Call):
        return Call(node.fn, _drop_chi(node.arg))
    if isinstance(node, Bin):
        return Bin(node.op, _drop_chi(node.lhs), _drop_chi(node.rhs))
    return node


def _sample_points(lo, hi, n):
    # golden-ratio stride avoids hitting lattice-aligned zeros
    g = (math.sqrt(5.0) - 1.0) / 2.0
    u = (np.arange(1, n + 1) * g) % 1.0
    return lo + (hi - lo) * np.sort(u)


def _has_mass(sym: RadialSymbol, lo, hi, n=64) -> bool:
    pts = _sample_points(lo, hi, n)
    sign, logabs = sym.signed_log(pts)
    finite = sign != 0
    return bool(np.any(finite & ~np.isnan(logabs)))


def exact_support_radius(V: RadialSymbol) -> float:
    """Smallest b with V = 0 on (b, inf) and |V| mass reaching up to b.

    Computed structurally from the indicator pieces and analytic factors,
    confirmed by sampling.  Returns math.inf for symbols with an analytic
    nonvanishing tail; 0.0 for the zero symbol.  Raises SupportUnknownError
    when an analytic tail samples to zero everywhere (cannot be certified).
    """
    folded = _fold(V.ast)
    ub = _support_ub(folded)
    max_b = max(V.breakpoints) if V.breakpoints else 0.0

    if math.isinf(ub):
        tail = _fold(_drop_chi(folded))
        if isinstance(tail, Num) and tail.value == 0.0:
            ub = max_b  # beyond the last indicator everything cancels exactly
        else:
            tail_sym = RadialSymbol(tail)
            lo = max_b if max_b > 0 else 0.1
            if _has_mass(tail_sym, lo, lo + 5.0) or _has_mass(tail_sym, lo + 5.0, R_MAX_DEFAULT):
                return math.inf
            raise SupportUnknownError(
                f"analytic tail of {V.text!r} samples to zero beyond r={lo:g}; "
                "support cannot be certified by sampling")

    if ub == 0.0:
        return 0.0
    cuts = sorted({0.0, ub} | {p for p in V.breakpoints if p < ub})
    for lo, hi in zip(cuts[-2::-1], cuts[::-1]):
        if _has_mass(V, lo, hi):
            return hi
    return 0.0


# --- decay classification ---------------------------------------------------


@dataclass(frozen=True)
class DecayClass:
    """Tail class of a symbol.

    tag is one of CompactSupport (parameter = exact support radius),
    StretchedExp (parameter = p, dominant tail factor exp(-c r^(2p))),
    RapidDecay, Unknown.
    """

    tag: str
    parameter: float | None = None

    def __post_init__(self):
        if self.tag not in ("CompactSupport", "RapidDecay", "StretchedExp", "Unknown"):
            raise ValueError(f"bad decay tag {self.tag!r}")
        if self.tag == "StretchedExp" and not (self.parameter and self.parameter > 0):
            raise ValueError("StretchedExp requires p > 0")


class _Indeterminate(Exception):
    pass


def _value_poly(node):
    """node(r) as a polynomial {degree: coeff}; raises _Indeterminate otherwise."""
    if isinstance(node, Num):
        return {0.0: node.value}
    if isinstance(node, Var):
        return {1.0: 1.0}
    if isinstance(node, Neg):
        return {d: -c for d, c in _value_poly(node.arg).items()}
    if isinstance(node, Bin):
        if node.op in "+-":
            a, b = _value_poly(node.lhs), _value_poly(node.rhs)
            out = dict(a)
            for d, c in b.items():
                out[d] = out.get(d, 0.0) + (c if node.op == "+" else -c)
            return {d: c for d, c in out.items() if c != 0.0}
        if node.op == "*":
            a, b = _value_poly(node.lhs), _value_poly(node.rhs)
            out = {}
            for da, ca in a.items():
                for db, cb in b.items():
                    d = da + db
                    out[d] = out.get(d, 0.0) + ca * cb
            return {d: c for d, c in out.items() if c != 0.0}
        raise _Indeterminate
    if isinstance(node, Pow):
        base = _value_poly(node.base)
        if len(base) == 1:
            (d, c), = base.items()
            if c >= 0 or node.exponent == round(node.exponent):
                return {d * node.exponent: float(c ** node.exponent)}
        raise _Indeterminate
    raise _Indeterminate


def _log_tail_profile(node):
    """Leading behavior of log|node(r)|, r -> inf.

    Returns (super, powers) where super in {-1, 0, +1} flags super-polynomial
    log terms (exp of a growing exponential) and powers maps alpha -> coeff
    for contributions coeff * r^alpha, alpha > 0.  Bounded factors (sin, cos,
    constants) contribute nothing.  Raises _Indeterminate when inconclusive.
    """
    if isinstance(node, Num):
        if node.value == 0.0:
            raise _Indeterminate  # structural zero handled by caller
        return 0, {}
    if isinstance(node, Var):
        return 0, {}
    if isinstance(node, Chi):
        raise _Indeterminate
    if isinstance(node, Neg):
        return _log_tail_profile(node.arg)
    if isinstance(node, Call):
        if node.fn in ("abs", "pos"):
            return _log_tail_profile(node.arg)
        if node.fn in ("sin", "cos"):
            return 0, {}
        # exp(f): log|exp f| = f, so f's value profile feeds in directly
        try:
            poly = _value_poly(node.arg)
        except _Indeterminate:
            sup, powers = _log_tail_profile_inner_exp(node.arg)
            return sup, powers
        return 0, {d: c for d, c in poly.items() if d > 0}
    if isinstance(node, Pow):
        sup, powers = _log_tail_profile(node.base)
        return (sup if node.exponent > 0 else -sup), \
            {d: c * node.exponent for d, c in powers.items()}
    if isinstance(node, Bin):
        if node.op in ("*", "/"):
            s1, p1 = _log_tail_profile(node.lhs)
            s2, p2 = _log_tail_profile(node.rhs)
            if node.op == "/":
                s2, p2 = -s2, {d: -c for d, c in p2.items()}
            sup = s1 + s2
            if abs(sup) > 1:
                sup = int(math.copysign(1, sup))
            elif s1 != 0 and s2 != 0 and sup == 0:
                raise _Indeterminate  # opposing super-exponential factors
            out = dict(p1)
            for d, c in p2.items():
                out[d] = out.get(d, 0.0) + c
            return sup, {d: c for d, c in out.items() if c != 0.0}
        # sums: dominant side wins; equal leading terms add
        l, r = node.lhs, node.rhs
        try:
            s1, p1 = _log_tail_profile(l)
        except _Indeterminate:
            s1, p1 = None, None
        try:
            s2, p2 = _log_tail_profile(r)
            if node.op == "-":
                pass  # magnitude profile unchanged by negation
        except _Indeterminate:
            s2, p2 = None, None
        if s1 is None and s2 is None:
            raise _Indeterminate
        if s1 is None:
            return s2, p2
        if s2 is None:
            return s1, p1
        k1, k2 = _growth_key(s1, p1), _growth_key(s2, p2)
        if k1 > k2:
            return s1, p1
        if k2 > k1:
            return s2, p2
        if (s1, sorted(p1.items())) == (s2, sorted(p2.items())):
            return s1, p1
        raise _Indeterminate
    raise _Indeterminate


def _log_tail_profile_inner_exp(arg):
    """exp(f) where f is not polynomial: detect super-exponential growth."""
    sup, powers = _log_tail_profile(arg)
    lead = _leading(powers)
    if sup > 0 or (lead is not None and lead[1] > 0):
        # f itself grows like exp(...): sign of f at large r decides
        sgn, logabs = RadialSymbol(arg).signed_log(np.array([20.0, 30.0, 40.0]))
        if np.all(sgn < 0):
            return -1, {}
        if np.all(sgn > 0):
            return 1, {}
    raise _Indeterminate


def _leading(powers):
    live = [(d, c) for d, c in powers.items() if c != 0.0]
    if not live:
        return None
    return max(live)


def _growth_key(sup, powers):
    lead = _leading(powers)
    if sup != 0:
        return (sup, math.inf, 0.0)
    if lead is None:
        return (0, 0.0, 0.0)
    d, c = lead
    return (int(math.copysign(1, c)), d * math.copysign(1, c), c)


def classify_decay(V: RadialSymbol) -> DecayClass:
    """Classify the tail of V; Unknown is a valid outcome, never an error."""
    try:
        esr = exact_support_radius(V)
    except SupportUnknownError:
        return DecayClass("Unknown")
    if math.isfinite(esr):
        return DecayClass("CompactSupport", esr)
    try:
        sup, powers = _log_tail_profile(_fold(_drop_chi(V.ast)))
    except _Indeterminate:
        return DecayClass("Unknown")
    if sup < 0:
        return DecayClass("RapidDecay")
    if sup > 0:
        return DecayClass("Unknown")
    lead = _leading(powers)
    if lead is None:
        return DecayClass("Unknown")
    alpha, coeff = lead
    if coeff < 0 and alpha > 0:
        return DecayClass("StretchedExp", alpha / 2.0)
    return DecayClass("Unknown")


def tail_truncation_radius(V: RadialSymbol, target_log: float,
                           r_max: float = R_MAX_DEFAULT) -> float:
    """Smallest sampled radius beyond which log|V| stays below target_log."""
    esr = None
    try:
        esr = exact_support_radius(V)
    except SupportUnknownError:
        pass
    if esr is not None and math.isfinite(esr):
        return esr
    lo = max(V.breakpoints) if V.breakpoints else 0.0
    grid = np.linspace(lo + 1e-3, r_max, 2048)
    sign, logabs = V.signed_log(grid)
    level = np.where(sign == 0, -np.inf, logabs)
    run_max = np.maximum.accumulate(level[::-1])[::-1]  # sup over [r, r_max]
    ok = run_max <= target_log
    if not np.any(ok):
        return r_max
    return float(grid[int(np.argmax(ok))])


def check_bounded(V: RadialSymbol, r_max: float = R_MAX_DEFAULT, n: int = 4096) -> float:
    """Sampled sup of |V| on [0, r_max]; boundedness is checked, not proved."""
    pts = np.concatenate([np.array([0.0]), _sample_points(0.0, r_max, n)])
    sign, logabs = V.signed_log(pts)
    live = sign != 0
    if not np.any(live):
        return 0.0
    top = float(np.max(logabs[live]))
    return math.inf if top > 709.0 else math.exp(top)
