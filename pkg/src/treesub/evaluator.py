"""Semantics over the standard model of trees.

Formulas are compiled once into closures over a mutable environment, with
closed subterms folded to constants.  Bounded quantifiers range over the
distinct subtrees of their bound; unbounded existentials either read a given
witness or are searched over all trees up to a size budget.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .formula import (
    And,
    Bot,
    Eq,
    Exists,
    ExistsB,
    ForallB,
    Formula,
    FormulaError,
    Neq,
    NotSub,
    Or,
    PairT,
    Sub,
    SubstT,
    Term,
    Var,
    free_vars,
    profile,
    walk,
)
from .trees import LEAF, Tree, enumerate_trees, node, substitute, subterm, subtree_set, subtrees


class EvaluationError(ValueError):
    pass


class WitnessError(EvaluationError):
    pass


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


Assignment = Mapping[str, Tree]

# Subtree tests against large trees go through a cached subtree set.
_BIG = 48


def _sub(s: Tree, t: Tree) -> bool:
    if t._set is None and t.size > _BIG:
        return s in subtree_set(t)
    return subterm(s, t)


# ------------------------------------------------------------------ terms

def compile_term(t: Term) -> Callable[[dict], Tree]:
    memo: dict = {}

    def closed(u) -> Optional[Tree]:
        # value of u if it has no variables, else None
        key = id(u)
        if key in memo:
            return memo[key]
        if isinstance(u, Bot):
            v = LEAF
        elif isinstance(u, Var):
            v = None
        elif isinstance(u, PairT):
            a, b = closed(u.l), closed(u.r)
            v = node(a, b) if a is not None and b is not None else None
        else:
            a, b, c = closed(u.body), closed(u.src), closed(u.dst)
            v = substitute(a, b, c) if None not in (a, b, c) else None
        memo[key] = v
        return v

    def build(u):
        v = closed(u)
        if v is not None:
            return lambda env, v=v: v
        if isinstance(u, Var):
            name = u.name

            def look(env, name=name):
                try:
                    return env[name]
                except KeyError:
                    raise EvaluationError(f"unbound variable {name}") from None

            return look
        if isinstance(u, PairT):
            fl, fr = build(u.l), build(u.r)
            return lambda env: node(fl(env), fr(env))
        fb, fs, fd = build(u.body), build(u.src), build(u.dst)
        return lambda env: substitute(fb(env), fs(env), fd(env))

    return build(t)


def eval_term(t: Term, a: Assignment) -> Tree:
    return compile_term(t)(dict(a))


# --------------------------------------------------------------- formulas

def _items(g, cls):
    return g.items if isinstance(g, cls) else (g,)


def _mk(cls, items):
    items = tuple(items)
    return items[0] if len(items) == 1 else cls(items)


def _cost(g) -> int:
    if isinstance(g, (And, Or)):
        return sum(_cost(h) for h in g.items)
    if isinstance(g, (ExistsB, ForallB)):
        return 40 * _cost(g.body)
    if isinstance(g, Exists):
        return 10**6
    return 1


def optimize(f: Formula) -> Formula:
    """Equivalence-preserving rewrite used before compilation.

    Bounded quantifiers are pushed inward past conjuncts (for ``exists``) or
    disjuncts (for ``forall``) that do not mention the bound variable, and
    distribute over the dual connective.  Connective children are then
    stably ordered by a rough cost estimate so literals run first."""
    memo: dict = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key][1]
        out = _go(g)
        memo[key] = (g, out)
        return out

    def quant(cls, var, bound, body):
        inner, outer = (And, Or) if cls is ExistsB else (Or, And)
        if isinstance(body, outer):
            return _mk(outer, sorted((quant(cls, var, bound, h) for h in body.items), key=_cost))
        keep, lift = [], []
        for h in _items(body, inner):
            (keep if var in free_vars(h) else lift).append(h)
        if not keep:
            return body
        q = cls(var, bound, _mk(inner, sorted(keep, key=_cost)))
        return _mk(inner, sorted(lift + [q], key=_cost))

    def _go(g):
        if isinstance(g, (And, Or)):
            cls = type(g)
            flat = []
            for h in g.items:
                flat.extend(_items(go(h), cls))
            return _mk(cls, sorted(flat, key=_cost))
        if isinstance(g, (ExistsB, ForallB)):
            return quant(type(g), g.var, g.bound, go(g.body))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        return g

    return go(f)


_MEMO_CAP = 200_000


def _compile(f: Formula, search_budget: Optional[int]) -> Callable[[dict], bool]:
    """Compile ``f``.  Unbounded existentials read the environment when
    ``search_budget`` is None, otherwise they search trees of size 1..budget."""
    f = optimize(f)

    def go(g):
        if isinstance(g, Eq):
            a, b = compile_term(g.s), compile_term(g.t)
            return lambda env: a(env) is b(env)
        if isinstance(g, Neq):
            a, b = compile_term(g.s), compile_term(g.t)
            return lambda env: a(env) is not b(env)
        if isinstance(g, Sub):
            a, b = compile_term(g.s), compile_term(g.t)
            return lambda env: _sub(a(env), b(env))
        if isinstance(g, NotSub):
            a, b = compile_term(g.s), compile_term(g.t)
            return lambda env: not _sub(a(env), b(env))
        if isinstance(g, And):
            parts = tuple(go(h) for h in g.items)
            return lambda env: all(p(env) for p in parts)
        if isinstance(g, Or):
            parts = tuple(go(h) for h in g.items)
            return lambda env: any(p(env) for p in parts)
        if isinstance(g, (ExistsB, ForallB)):
            bound, body, var = compile_term(g.bound), go(g.body), g.var
            want = isinstance(g, ExistsB)
            fvs = tuple(sorted(free_vars(g)))
            cache: dict = {}

            def quant(env):
                key = tuple(env.get(v) for v in fvs)
                hit = cache.get(key)
                if hit is not None:
                    return hit
                old = env.get(var, _MISSING)
                try:
                    res = not want
                    for s in subtrees(bound(env)):
                        env[var] = s
                        if body(env) is want:
                            res = want
                            break
                finally:
                    _restore(env, var, old)
                if len(cache) > _MEMO_CAP:
                    cache.clear()
                cache[key] = res
                return res

            return quant
        if isinstance(g, Exists):
            body, var = go(g.body), g.var
            if search_budget is None:
                def given(env):
                    if var not in env:
                        raise WitnessError(f"no witness for existential variable {var}")
                    return body(env)

                return given
            budget = search_budget

            def search(env):
                old = env.get(var, _MISSING)
                try:
                    for n in range(1, budget + 1):
                        for s in enumerate_trees(n):
                            env[var] = s
                            if body(env):
                                return True
                    return False
                finally:
                    _restore(env, var, old)

            return search
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


_MISSING = object()


def _restore(env, var, old):
    if old is _MISSING:
        env.pop(var, None)
    else:
        env[var] = old


def eval_decidable(f: Formula, a: Assignment | None = None) -> bool:
    """Evaluate ``f`` with every unbounded existential taken from ``a``."""
    env = dict(a or {})
    for g in walk(f):
        if isinstance(g, Exists) and g.var not in env:
            raise EvaluationError(f"unbounded existential {g.var} is not instantiated")
    return _compile(f, None)(env)


def _prefix(f: Formula):
    names = []
    while isinstance(f, Exists):
        names.append(f.var)
        f = f.body
    return names, f


@dataclass
class SearchResult:
    verdict: Verdict
    witness: Optional[dict]


def search(f: Formula, budget: int) -> SearchResult:
    """Budgeted semi-decision.  The leading block of existentials is searched
    jointly: size tuples in lexicographic order, then enumeration order."""
    if budget < 1:
        raise EvaluationError("budget must be at least 1")
    fv = free_vars(f)
    if fv:
        raise EvaluationError(f"not a sentence; free variables {sorted(fv)}")
    names, matrix = _prefix(f)
    body = _compile(matrix, budget)
    env: dict = {}
    if not names:
        ok = body(env)
        if ok:
            return SearchResult(Verdict.TRUE, {})
        if profile(f).n == 0:
            return SearchResult(Verdict.FALSE, None)
        return SearchResult(Verdict.UNKNOWN, None)
    sizes = range(1, budget + 1)
    for shape in itertools.product(sizes, repeat=len(names)):
        pools = [enumerate_trees(n) for n in shape]
        for combo in itertools.product(*pools):
            env.clear()
            env.update(zip(names, combo))
            if body(env):
                return SearchResult(Verdict.TRUE, dict(zip(names, combo)))
    return SearchResult(Verdict.UNKNOWN, None)


def check(f: Formula, budget: int) -> Verdict:
    return search(f, budget).verdict


def existential_names(f: Formula) -> list:
    """Names bound by unbounded existentials, in syntactic order."""
    return [g.var for g in walk(f) if isinstance(g, Exists)]


def verify_witness(f: Formula, w: Assignment) -> bool:
    """True iff the named trees witness every unbounded existential of ``f``."""
    names = existential_names(f)
    seen: set = set()
    for n in names:
        if n in seen:
            raise WitnessError(f"name collision: existential variable {n} is bound twice")
        seen.add(n)
    bounded = {g.var for g in walk(f) if isinstance(g, (ExistsB, ForallB))}
    clash = seen & bounded
    if clash:
        raise WitnessError(f"name collision with bounded variables: {sorted(clash)}")
    missing = [n for n in names if n not in w]
    if missing:
        raise WitnessError(f"missing witness for {', '.join(missing)}")
    extra = sorted(set(w) - seen)
    if extra:
        raise WitnessError(f"witness binds unknown variables: {', '.join(extra)}")
    fv = free_vars(f)
    if fv:
        raise EvaluationError(f"not a sentence; free variables {sorted(fv)}")
    return _compile(f, None)(dict(w))


def compile_formula(f: Formula) -> Callable[[dict], bool]:
    """Compiled predicate over an environment; unbounded existentials read it."""
    return _compile(f, None)
