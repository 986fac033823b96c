"""Seeded random formula generators shared by the test modules."""

import random

from treesub import formula as F
from treesub.trees import trees_up_to

VARS = ("x", "y")


def term(rng, depth, names=VARS, subst=True):
    r = rng.random()
    if depth <= 0 or r < 0.3:
        return F.Var(rng.choice(names)) if names and rng.random() < 0.6 else F.BOT
    if not subst or r < 0.7:
        return F.PairT(term(rng, depth - 1, names, subst), term(rng, depth - 1, names, subst))
    return F.SubstT(*(term(rng, depth - 1, names, subst) for _ in range(3)))


def literal(rng, names=VARS, subst=True, kinds=(F.Eq, F.Neq, F.Sub, F.NotSub)):
    return rng.choice(kinds)(term(rng, 2, names, subst), term(rng, 2, names, subst))


def matrix(rng, depth=2, names=VARS, kinds=(F.Eq, F.Neq)):
    """Quantifier-free formula."""
    if depth <= 0 or rng.random() < 0.3:
        return literal(rng, names, True, kinds)
    cls = rng.choice((F.And, F.Or))
    return cls(tuple(matrix(rng, depth - 1, names, kinds) for _ in range(rng.randint(2, 3))))


def formula(rng, depth=3, names=("x",), fresh=iter(range(10**9))):
    """Formula with bounded quantifiers whose free variables lie in ``names``."""
    r = rng.random()
    if depth <= 0 or r < 0.25:
        return literal(rng, names)
    if r < 0.6:
        cls = rng.choice((F.And, F.Or))
        return cls(tuple(formula(rng, depth - 1, names, fresh) for _ in range(2)))
    v = f"v{next(fresh)}"
    cls = F.ExistsB if r < 0.8 else F.ForallB
    return cls(v, term(rng, 1, names), formula(rng, depth - 1, names + (v,), fresh))


def sentence(rng, depth=3):
    """Closed formula, possibly with a leading unbounded existential."""
    body = formula(rng, depth, ("x",))
    return F.Exists("x", body) if rng.random() < 0.5 else F.ForallB("x", term(rng, 2, ()), body)


def small_trees(n):
    return trees_up_to(n)
