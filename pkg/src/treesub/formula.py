"""Syntax of Sigma-formulas over the tree languages.

Three languages share one AST.  ``LT-`` only has the subtree relation, ``LT``
adds the leaf and pairing, and ``LBT`` swaps the subtree relation for the
substitution operator (``x sub t`` is then sugar for ``t[x->xx] != t``).
Formulas are kept in negation normal form and there is no unbounded forall.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .trees import LEAF, Tree, node


class Language(enum.Enum):
    LT_MINUS = "LT-"
    LT = "LT"
    LBT = "LBT"

    def __str__(self) -> str:
        return self.value


class FormulaError(ValueError):
    """Semantic problem with a formula (bad binding, wrong language)."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


# ------------------------------------------------------------------- terms

@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class PairT:
    l: "Term"
    r: "Term"


@dataclass(frozen=True, slots=True)
class SubstT:
    body: "Term"
    src: "Term"
    dst: "Term"


Term = Union[Var, Bot, PairT, SubstT]
BOT = Bot()


def const(t: Tree) -> Term:
    """The closed term naming ``t``."""
    memo: dict = {}

    def go(u):
        if u.left is None:
            return BOT
        v = memo.get(u)
        if v is None:
            v = PairT(go(u.left), go(u.right))
            memo[u] = v
        return v

    return go(t)


def as_term(x) -> Term:
    if isinstance(x, str):
        return Var(x)
    if isinstance(x, Tree):
        return const(x)
    return x


def pair(a, b) -> Term:
    return PairT(as_term(a), as_term(b))


def subst(body, src, dst) -> Term:
    return SubstT(as_term(body), as_term(src), as_term(dst))


def subst_chain(body, pairs) -> Term:
    out = as_term(body)
    for r, s in pairs:
        out = SubstT(out, as_term(r), as_term(s))
    return out


def ttuple(xs) -> Term:
    xs = [as_term(x) for x in xs]
    if not xs:
        raise ValueError("tuple of an empty list")
    out = xs[0]
    for x in xs[1:]:
        out = PairT(out, x)
    return out


def tpower(x, n: int) -> Term:
    if n < 1:
        raise ValueError("power exponent must be >= 1")
    x = as_term(x)
    out = x
    for _ in range(n - 1):
        out = PairT(out, x)
    return out


def term_vars(t: Term) -> set:
    out: set = set()
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, PairT):
            if id(u) in seen:
                continue
            seen.add(id(u))
            stack += (u.l, u.r)
        elif isinstance(u, SubstT):
            stack += (u.body, u.src, u.dst)
    return out


def term_tree(t: Term) -> Tree:
    """Value of a closed term."""
    from .trees import substitute

    if isinstance(t, Bot):
        return LEAF
    if isinstance(t, PairT):
        return node(term_tree(t.l), term_tree(t.r))
    if isinstance(t, SubstT):
        return substitute(term_tree(t.body), term_tree(t.src), term_tree(t.dst))
    raise FormulaError(f"term is not closed: variable {t.name}")


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True, slots=True)
class Eq:
    s: Term
    t: Term


@dataclass(frozen=True, slots=True)
class Neq:
    s: Term
    t: Term


@dataclass(frozen=True, slots=True)
class Sub:
    s: Term
    t: Term


@dataclass(frozen=True, slots=True)
class NotSub:
    s: Term
    t: Term


@dataclass(frozen=True, slots=True)
class And:
    items: tuple


@dataclass(frozen=True, slots=True)
class Or:
    items: tuple


@dataclass(frozen=True, slots=True)
class ExistsB:
    var: str
    bound: Term
    body: "Formula"


@dataclass(frozen=True, slots=True)
class ForallB:
    var: str
    bound: Term
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Eq, Neq, Sub, NotSub, And, Or, ExistsB, ForallB, Exists]
LITERALS = (Eq, Neq, Sub, NotSub)


def eq(a, b) -> Eq:
    return Eq(as_term(a), as_term(b))


def neq(a, b) -> Neq:
    return Neq(as_term(a), as_term(b))


def sub(a, b) -> Sub:
    return Sub(as_term(a), as_term(b))


def notsub(a, b) -> NotSub:
    return NotSub(as_term(a), as_term(b))


def proper_sub(a, b) -> Formula:
    """``a`` is a proper subtree of ``b``."""
    return conj(sub(a, b), neq(a, b))


def _flatten(kind, fs: Iterable[Formula]) -> tuple:
    out = []
    for f in fs:
        if isinstance(f, kind):
            out.extend(f.items)
        else:
            out.append(f)
    return tuple(out)


def conj(*fs: Formula) -> Formula:
    items = _flatten(And, fs)
    if len(items) == 1:
        return items[0]
    if not items:
        raise FormulaError("empty conjunction")
    return And(items)


def disj(*fs: Formula) -> Formula:
    items = _flatten(Or, fs)
    if len(items) == 1:
        return items[0]
    if not items:
        raise FormulaError("empty disjunction")
    return Or(items)


def exists(names: Union[str, Sequence[str]], body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def exists_b(names, bound, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for n in reversed(list(names)):
        body = ExistsB(n, as_term(bound), body)
    return body


def forall_b(names, bound, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for n in reversed(list(names)):
        body = ForallB(n, as_term(bound), body)
    return body


def negate(f: Formula) -> Formula:
    """NNF negation; bounded quantifiers dualise.  Unbounded exists has no dual."""
    if isinstance(f, Eq):
        return Neq(f.s, f.t)
    if isinstance(f, Neq):
        return Eq(f.s, f.t)
    if isinstance(f, Sub):
        return NotSub(f.s, f.t)
    if isinstance(f, NotSub):
        return Sub(f.s, f.t)
    if isinstance(f, And):
        return Or(tuple(negate(g) for g in f.items))
    if isinstance(f, Or):
        return And(tuple(negate(g) for g in f.items))
    if isinstance(f, ExistsB):
        return ForallB(f.var, f.bound, negate(f.body))
    if isinstance(f, ForallB):
        return ExistsB(f.var, f.bound, negate(f.body))
    raise FormulaError("cannot negate an unbounded existential (no unbounded forall)")


nnf_negate = negate


def implies(a: Formula, b: Formula) -> Formula:
    return disj(negate(a), b)


# ---------------------------------------------------------------- analysis

@dataclass(frozen=True)
class SigmaProfile:
    n: int = 0
    m: int = 0
    k: int = 0

    def __add__(self, o: "SigmaProfile") -> "SigmaProfile":
        return SigmaProfile(self.n + o.n, self.m + o.m, self.k + o.k)

    def __str__(self) -> str:
        return f"({self.n},{self.m},{self.k})"


@dataclass(frozen=True)
class Classification:
    is_existential: bool
    is_sigma: bool
    profile: SigmaProfile
    language: Language


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (And, Or)):
            stack.extend(reversed(g.items))
        elif isinstance(g, (ExistsB, ForallB, Exists)):
            stack.append(g.body)


def _terms_of(g: Formula) -> tuple:
    if isinstance(g, LITERALS):
        return (g.s, g.t)
    if isinstance(g, (ExistsB, ForallB)):
        return (g.bound,)
    return ()


def _term_symbols(t: Term, acc: set, seen: set) -> None:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Bot):
            acc.add("bot")
        elif isinstance(u, PairT):
            acc.add("pair")
            if id(u) in seen:
                continue
            seen.add(id(u))
            stack += (u.l, u.r)
        elif isinstance(u, SubstT):
            acc.add("subst")
            stack += (u.body, u.src, u.dst)


def symbols(f: Formula) -> set:
    acc: set = set()
    seen: set = set()
    for g in walk(f):
        for t in _terms_of(g):
            _term_symbols(t, acc, seen)
        if isinstance(g, (Sub, NotSub)):
            acc.add("sub")
    return acc


def profile(f: Formula) -> SigmaProfile:
    n = m = k = 0
    for g in walk(f):
        if isinstance(g, Exists):
            n += 1
        elif isinstance(g, ExistsB):
            m += 1
        elif isinstance(g, ForallB):
            k += 1
    return SigmaProfile(n, m, k)


def minimal_language(f: Formula) -> Language:
    syms = symbols(f)
    if "subst" in syms:
        return Language.LBT
    if syms & {"bot", "pair"}:
        return Language.LT
    return Language.LT_MINUS


def classify(f: Formula) -> Classification:
    p = profile(f)
    return Classification(p.m == 0 and p.k == 0, True, p, minimal_language(f))


def free_vars(f: Formula) -> set:
    out: set = set()

    def go(g, bound: frozenset):
        if isinstance(g, LITERALS):
            out.update(term_vars(g.s) - bound)
            out.update(term_vars(g.t) - bound)
        elif isinstance(g, (And, Or)):
            for h in g.items:
                go(h, bound)
        elif isinstance(g, (ExistsB, ForallB)):
            out.update(term_vars(g.bound) - bound)
            go(g.body, bound | {g.var})
        elif isinstance(g, Exists):
            go(g.body, bound | {g.var})

    go(f, frozenset())
    return out


_ALLOWED = {
    Language.LT_MINUS: {"sub"},
    Language.LT: {"sub", "bot", "pair"},
    Language.LBT: {"sub", "bot", "pair", "subst"},
}


def validate(f: Formula, language: Language | None = None) -> list:
    """Return diagnostics (an empty list means the formula is well formed)."""
    diags = []
    for g in walk(f):
        if isinstance(g, (ExistsB, ForallB)) and g.var in term_vars(g.bound):
            q = "exists" if isinstance(g, ExistsB) else "forall"
            diags.append(f"{q} {g.var}: bound variable occurs in its bound term")
        if isinstance(g, (And, Or)) and not g.items:
            diags.append("empty and/or")
    if language is not None:
        extra = symbols(f) - _ALLOWED[language]
        for s in sorted(extra):
            diags.append(f"symbol '{s}' not in language {language}")
    return diags


def check_valid(f: Formula, language: Language | None = None) -> None:
    diags = validate(f, language)
    if diags:
        raise FormulaError("; ".join(diags))


def desugar_sub_BT(f: Formula, language: Language = Language.LBT) -> Formula:
    """Replace subtree literals by their substitution definitions."""
    if language is not Language.LBT:
        raise FormulaError(f"subtree desugaring needs language LBT, got {language}")

    def grow(x):
        return PairT(x, x)

    def go(g):
        if isinstance(g, Sub):
            return Neq(SubstT(g.t, g.s, grow(g.s)), g.t)
        if isinstance(g, NotSub):
            return Eq(SubstT(g.t, g.s, grow(g.s)), g.t)
        if isinstance(g, (Eq, Neq)):
            return g
        if isinstance(g, And):
            return And(tuple(go(h) for h in g.items))
        if isinstance(g, Or):
            return Or(tuple(go(h) for h in g.items))
        if isinstance(g, ExistsB):
            return ExistsB(g.var, g.bound, go(g.body))
        if isinstance(g, ForallB):
            return ForallB(g.var, g.bound, go(g.body))
        return Exists(g.var, go(g.body))

    return go(f)


def in_alpha(x, alpha, y) -> Formula:
    """Set membership: <x,alpha> sub y and alpha not sub x."""
    return And((Sub(pair(x, alpha), as_term(y)), NotSub(as_term(alpha), as_term(x))))


# ---------------------------------------------------------------- text

KEYWORDS = {"exists", "forall", "sub", "and", "or", "subst"}
_TOKEN = re.compile(
    r"\s*(?:(?P<id>[A-Za-z][A-Za-z0-9_]*(?:\.[A-Za-z][A-Za-z0-9_]*)*)"
    r"|(?P<op>!sub\b|!=|[<>,().=_]))"
)


def _tokenize(text: str) -> list:
    toks = []
    i, n = 0, len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        if text[i] == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = "id" if m.group("id") else "op"
        val = m.group(kind)
        toks.append((kind, val, m.start(kind)))
        i = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        k, v, p = self.next()
        if v != val or k == "eof":
            raise FormulaSyntaxError(f"expected {val!r}, found {v or 'end of input'!r}", p)

    def ident(self):
        k, v, p = self.next()
        if k != "id" or v in KEYWORDS:
            raise FormulaSyntaxError(f"expected identifier, found {v or 'end of input'!r}", p)
        return v

    def term(self) -> Term:
        k, v, p = self.next()
        if v == "_" and k == "op":
            return BOT
        if v == "<":
            l = self.term()
            self.expect(",")
            r = self.term()
            self.expect(">")
            return PairT(l, r)
        if k == "id" and v == "subst":
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(",")
            c = self.term()
            self.expect(")")
            return SubstT(a, b, c)
        if k == "id" and v not in KEYWORDS:
            return Var(v)
        raise FormulaSyntaxError(f"expected term, found {v or 'end of input'!r}", p)

    def formula(self) -> Formula:
        k, v, p = self.peek()
        if k == "id" and v in ("and", "or"):
            self.next()
            self.expect("(")
            items = [self.formula()]
            while self.peek()[1] == ",":
                self.next()
                items.append(self.formula())
            self.expect(")")
            return And(tuple(items)) if v == "and" else Or(tuple(items))
        if k == "id" and v in ("exists", "forall"):
            self.next()
            name = self.ident()
            nk, nv, np_ = self.peek()
            if nv == "sub" and nk == "id":
                self.next()
                bound = self.term()
                if name in term_vars(bound):
                    raise FormulaSyntaxError(
                        f"bound variable {name} occurs in its bound term", np_
                    )
                self.expect(".")
                body = self.formula()
                return ExistsB(name, bound, body) if v == "exists" else ForallB(name, bound, body)
            if v == "forall":
                raise FormulaSyntaxError("unbounded forall is not a Sigma-formula", np_)
            self.expect(".")
            return Exists(name, self.formula())
        s = self.term()
        k, v, p = self.next()
        if v == "=":
            return Eq(s, self.term())
        if v == "!=":
            return Neq(s, self.term())
        if v == "sub" and k == "id":
            return Sub(s, self.term())
        if v == "!sub":
            return NotSub(s, self.term())
        raise FormulaSyntaxError(f"expected relation, found {v or 'end of input'!r}", p)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    k, v, pos = p.peek()
    if k != "eof":
        raise FormulaSyntaxError(f"trailing input {v!r}", pos)
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    k, v, pos = p.peek()
    if k != "eof":
        raise FormulaSyntaxError(f"trailing input {v!r}", pos)
    return t


def render_term(t: Term) -> str:
    out: list = []
    memo: dict = {}

    def go(u):
        if isinstance(u, Var):
            out.append(u.name)
        elif isinstance(u, Bot):
            out.append("_")
        elif isinstance(u, PairT):
            key = id(u)
            cached = memo.get(key)
            if cached is not None:
                out.append(cached)
                return
            start = len(out)
            out.append("<")
            go(u.l)
            out.append(",")
            go(u.r)
            out.append(">")
            memo[key] = "".join(out[start:])
            del out[start + 1:]
            out[start] = memo[key]
        else:
            out.append("subst(")
            go(u.body)
            out.append(",")
            go(u.src)
            out.append(",")
            go(u.dst)
            out.append(")")

    go(t)
    return "".join(out)


_REL = {Eq: "=", Neq: "!=", Sub: "sub", NotSub: "!sub"}


def render_formula(f: Formula) -> str:
    out: list = []

    def go(g):
        if isinstance(g, LITERALS):
            out.append(f"{render_term(g.s)} {_REL[type(g)]} {render_term(g.t)}")
        elif isinstance(g, (And, Or)):
            out.append("and(" if isinstance(g, And) else "or(")
            for i, h in enumerate(g.items):
                if i:
                    out.append(", ")
                go(h)
            out.append(")")
        elif isinstance(g, Exists):
            out.append(f"exists {g.var} . ")
            go(g.body)
        else:
            q = "exists" if isinstance(g, ExistsB) else "forall"
            out.append(f"{q} {g.var} sub {render_term(g.bound)} . ")
            go(g.body)

    go(f)
    return "".join(out)


# ---------------------------------------------------------------- sentences

@dataclass(frozen=True)
class Sentence:
    formula: Formula
    language: Language
    profile: SigmaProfile
    provenance: str

    @classmethod
    def build(cls, f: Formula, language: Language, provenance: str) -> "Sentence":
        fv = free_vars(f)
        if fv:
            raise FormulaError(f"sentence has free variables: {sorted(fv)}")
        check_valid(f, language)
        return cls(f, language, profile(f), provenance)

    def render(self) -> str:
        return (
            f"# provenance: {self.provenance}\n"
            f"# language: {self.language}\n"
            f"{render_formula(self.formula)}\n"
        )


def parse_sentence(text: str) -> Sentence:
    """Parse a rendered sentence, reading the optional header comments."""
    prov, lang = "unknown", None
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("# provenance:"):
            prov = s.split(":", 1)[1].strip()
        elif s.startswith("# language:"):
            lang = Language(s.split(":", 1)[1].strip())
    f = parse_formula(text)
    if lang is None:
        lang = minimal_language(f)
    return Sentence.build(f, lang, prov)
