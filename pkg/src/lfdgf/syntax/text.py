"""Concrete syntax for both languages.

LFD::

    P(x,y)   D[x y] u   D[x y][u w]   (f & g)   (f | g)   (f -> g)   ~f   E[x y] f   E[] f

First-order / GF::

    P(x,y)   x = y   true   ~f   (f & g)   (f | g)   (f -> g)
    exists y z . (G(x,y,z) & f)      forall y . (G(x,y) -> f)

Binary connectives associate to the left; quantifier and modality bodies
extend over a single unary formula, so ``exists x . P(x) & Q(x)`` is a
conjunction whose left conjunct is the quantified formula.
"""
from __future__ import annotations

import re

from ..errors import ParseError
from . import fo, lfd
from .signature import Signature

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>R_\{[^}]*\}_\{[^}]*\}|[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<arrow>->)
  | (?P<punct>[()\[\],&|~.=])
""", re.VERBOSE)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, value, offset=0):
        return self.peek(offset)[1] == value and self.peek(offset)[0] != "eof"

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def ident(self):
        tok = self.next()
        if tok[0] != "ident":
            raise ParseError(f"expected an identifier, found {tok[1] or 'end of input'!r}", tok[2])
        return tok[1]

    def done(self, result):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return result

    def formula(self):
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return self.implies(left, self.formula())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.at("|"):
            self.next()
            f = self.lor(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.at("&"):
            self.next()
            f = self.land(f, self.unary())
        return f

    def args(self):
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.ident())
            while self.at(","):
                self.next()
                out.append(self.ident())
        self.expect(")")
        return tuple(out)


class _LfdParser(_Parser):
    def __init__(self, text, sig):
        super().__init__(text)
        self.sig = sig

    land = staticmethod(lfd.And)
    lor = staticmethod(lfd.lor)

    @staticmethod
    def implies(a, b):
        return lfd.Not(lfd.And(a, lfd.Not(b)))

    def varset(self):
        self.expect("[")
        out = []
        while not self.at("]"):
            if self.at(","):
                self.next()
                continue
            out.append(self.ident())
        self.expect("]")
        return frozenset(out)

    def unary(self):
        tok = self.peek()
        if tok[1] == "~":
            self.next()
            return lfd.Not(self.unary())
        if tok[1] == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if tok[0] == "ident" and tok[1] == "E" and self.at("[", 1):
            self.next()
            V = self.varset()
            return lfd.E(V, self.unary())
        if tok[0] == "ident" and tok[1] == "D" and self.at("[", 1):
            self.next()
            V = self.varset()
            if self.at("["):
                return lfd.dep_set(V, self.sig.ordered(self.varset()) if self.sig else sorted(self.varset()))
            return lfd.Dep(V, self.ident())
        if tok[0] == "ident":
            name = self.ident()
            return lfd.Atom(name, self.args())
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


class _FoParser(_Parser):
    def __init__(self, text, equality):
        super().__init__(text)
        self.equality = equality

    land = staticmethod(fo.And)
    lor = staticmethod(fo.lor)
    implies = staticmethod(fo.implies)

    def unary(self):
        tok = self.peek()
        if tok[1] == "~":
            self.next()
            return fo.Not(self.unary())
        if tok[1] == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if tok[0] == "ident" and tok[1] in ("exists", "forall"):
            self.next()
            ys = []
            while not self.at("."):
                ys.append(self.ident())
            self.expect(".")
            if not ys:
                raise ParseError("quantifier binds no variables", tok[2])
            body = self.unary()
            return fo.exists(ys, body) if tok[1] == "exists" else fo.forall(ys, body)
        if tok[0] == "ident" and tok[1] == "true":
            self.next()
            return fo.Verum()
        if tok[0] == "ident":
            if self.at("=", 1):
                if not self.equality:
                    raise ParseError("equality atoms need equality mode", tok[2])
                left = self.ident()
                self.expect("=")
                return fo.Eq(left, self.ident())
            name = self.ident()
            return fo.Atom(name, self.args())
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse_lfd(text: str, sig: Signature | None = None) -> lfd.Formula:
    """Parse an LFD formula; with ``sig`` it is also checked against the signature."""
    p = _LfdParser(text, sig)
    f = p.done(p.formula())
    if sig is not None:
        lfd.check(f, sig)
    return f


def parse_fo(text: str, equality: bool = False) -> fo.Formula:
    p = _FoParser(text, equality)
    return p.done(p.formula())


# printing


def _vars(vs, sig):
    return " ".join(sig.ordered(vs) if sig is not None else sorted(vs))


def lfd_to_text(f: lfd.Formula, sig: Signature | None = None) -> str:
    memo: dict = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key][1]
        pair = lfd.as_disjunction(g)
        if pair is not None:
            s = f"({go(pair[0])} | {go(pair[1])})"
        elif isinstance(g, lfd.Atom):
            s = f"{g.pred}({','.join(g.args)})"
        elif isinstance(g, lfd.Dep):
            s = f"D[{_vars(g.vars, sig)}] {g.target}"
        elif isinstance(g, lfd.And):
            s = f"({go(g.left)} & {go(g.right)})"
        elif isinstance(g, lfd.Not):
            s = "~" + go(g.sub)
        elif isinstance(g, lfd.E):
            s = f"E[{_vars(g.vars, sig)}] {go(g.body)}"
        else:
            raise TypeError(f"not an LFD formula: {g!r}")
        memo[key] = (g, s)
        return s

    return go(f)


def fo_to_text(f: fo.Formula) -> str:
    memo: dict = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key][1]
        if isinstance(g, fo.Not) and isinstance(g.sub, fo.GuardedExists) \
                and isinstance(g.sub.body, fo.Not):
            q = g.sub
            s = f"forall {' '.join(q.vars)} . ({go(q.guard)} -> {go(q.body.sub)})"
        elif isinstance(g, fo.Not) and isinstance(g.sub, fo.And) \
                and isinstance(g.sub.left, fo.Not) and isinstance(g.sub.right, fo.Not):
            s = f"({go(g.sub.left.sub)} | {go(g.sub.right.sub)})"
        elif isinstance(g, fo.Atom):
            s = f"{g.pred}({','.join(g.args)})"
        elif isinstance(g, fo.Eq):
            s = f"{g.left} = {g.right}"
        elif isinstance(g, fo.Verum):
            s = "true"
        elif isinstance(g, fo.And):
            s = f"({go(g.left)} & {go(g.right)})"
        elif isinstance(g, fo.Not):
            s = "~" + go(g.sub)
        elif isinstance(g, fo.GuardedExists):
            inner = go(g.guard) if g.body is None else f"({go(g.guard)} & {go(g.body)})"
            s = f"exists {' '.join(g.vars)} . {inner}"
        elif isinstance(g, fo.Exists):
            s = f"exists {' '.join(g.vars)} . {go(g.body)}"
        else:
            raise TypeError(f"not a first-order formula: {g!r}")
        memo[key] = (g, s)
        return s

    return go(f)
