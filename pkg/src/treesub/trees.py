"""The ground model: finite full binary trees.

``_`` is the leaf and ``<l,r>`` a node.  Size always means leaf count.  The
kernel (interning, ``subterm``, ``substitute``, ``subtree_set``) comes from the
compiled extension when it was built and from ``_pytree`` otherwise; set
``TREESUB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
import sys
from functools import lru_cache
from typing import Iterable, Sequence

if os.environ.get("TREESUB_PURE"):
    from . import _pytree as _k
else:
    try:
        from . import _ctree as _k  # type: ignore[attr-defined]
    except ImportError:
        from . import _pytree as _k

Tree = _k.Tree
LEAF: Tree = _k.LEAF
BACKEND: str = _k.BACKEND
node = _k.node
subterm = _k.subterm
substitute = _k.substitute
subtree_set = _k.subtree_set

# Deep left-nested chains are common (numerals, tuples).
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class TreeSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def size(t: Tree) -> int:
    return t.size


def substitute_many(t: Tree, pairs: Iterable[tuple[Tree, Tree]]) -> Tree:
    """Sequential substitution ``t[r1->s1][r2->s2]...``."""
    for r, s in pairs:
        t = substitute(t, r, s)
    return t


# ---------------------------------------------------------------- ordering

def _ek(t: Tree):
    k = t._ek
    if k is None:
        k = () if t.left is None else (t.left.size, _ek(t.left), _ek(t.right))
        t._ek = k
    return k


def order_key(t: Tree):
    """Sort key: size first, then position in ``enumerate_trees(size)``."""
    return (t.size, _ek(t))


def subtrees(t: Tree) -> tuple:
    """Distinct subtrees of ``t`` ordered by ``order_key``."""
    o = t._ord
    if o is None:
        o = tuple(sorted(subtree_set(t), key=order_key))
        t._ord = o
    return o


@lru_cache(maxsize=None)
def enumerate_trees(n: int) -> tuple:
    """All trees with exactly ``n`` leaves (Catalan(n-1) of them)."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"tree size must be a positive integer, got {n!r}")
    if n == 1:
        return (LEAF,)
    out = []
    for i in range(1, n):
        rights = enumerate_trees(n - i)
        for l in enumerate_trees(i):
            for r in rights:
                out.append(node(l, r))
    return tuple(out)


def trees_up_to(n: int) -> list:
    out = []
    for k in range(1, n + 1):
        out.extend(enumerate_trees(k))
    return out


# ---------------------------------------------------------------- notation

def tup(xs: Sequence[Tree]) -> Tree:
    """Left-nested tuple: <x> = x, <x1..xk+1> = <<x1..xk>, xk+1>."""
    if not xs:
        raise ValueError("tuple of an empty list")
    t = xs[0]
    for x in xs[1:]:
        t = node(t, x)
    return t


def power(t: Tree, n: int) -> Tree:
    """t^1 = t, t^(n+1) = <t^n, t>."""
    if n < 1:
        raise ValueError(f"power exponent must be >= 1, got {n}")
    out = t
    for _ in range(n - 1):
        out = node(out, t)
    return out


def tconcat(a: Tree, bs: Sequence[Tree]) -> Tree:
    """Append the items of ``bs`` on the right of the tuple ``a``."""
    for b in bs:
        a = node(a, b)
    return a


def bot_power(n: int) -> Tree:
    return power(LEAF, n)


def pair(a: Tree, b: Tree) -> Tree:
    return node(a, b)


# ---------------------------------------------------------------- text

def render_tree(t: Tree) -> str:
    parts: list[str] = []
    stack: list = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            parts.append(u)
        elif u.left is None:
            parts.append("_")
        else:
            stack.extend((">", u.right, ",", u.left))
            parts.append("<")
    return "".join(parts)


def parse_tree(text: str) -> Tree:
    """Parse ``tree := "_" | "<" tree "," tree ">"`` (whitespace ignored)."""
    n = len(text)
    i = 0
    stack: list = []  # partially built nodes: [left or None]
    result = None

    def skip(j):
        while j < n and text[j].isspace():
            j += 1
        return j

    while True:
        i = skip(i)
        if i >= n:
            raise TreeSyntaxError("unexpected end of input", i)
        c = text[i]
        if c == "<":
            stack.append([None])
            i += 1
            continue
        if c != "_":
            raise TreeSyntaxError(f"expected '_' or '<', found {c!r}", i)
        i += 1
        val = LEAF
        # close as many frames as possible
        while True:
            if not stack:
                result = val
                break
            frame = stack[-1]
            i = skip(i)
            if frame[0] is None:
                if i >= n or text[i] != ",":
                    raise TreeSyntaxError("expected ','", i)
                frame[0] = val
                i += 1
                val = None
                break
            if i >= n or text[i] != ">":
                raise TreeSyntaxError("expected '>'", i)
            i += 1
            stack.pop()
            val = node(frame[0], val)
        if result is not None:
            break
    i = skip(i)
    if i != n:
        raise TreeSyntaxError("trailing input", i)
    return result


def pretty(t: Tree) -> str:
    """Compact rendering that abbreviates left chains of leaves as ``_^k``."""
    if t.left is None:
        return "_"
    k, u = 1, t
    while u.left is not None and u.right is LEAF:
        k += 1
        u = u.left
    if u is LEAF and k > 1:
        return f"_^{k}"
    return f"<{pretty(t.left)},{pretty(t.right)}>"
