"""Pure-Python tree kernel.

Trees are hash-consed: ``node(l, r)`` returns the unique object for that
shape, so structural equality coincides with identity and substitution can
be memoised per distinct subtree.  The compiled twin lives in ``_ctree.pyx``
and exposes the same names.
"""

from __future__ import annotations

import threading

BACKEND = "python"

_lock = threading.Lock()
_table: dict[tuple[int, int], "Tree"] = {}


class Tree:
    """A finite full binary tree.  Build with ``LEAF`` and ``node``."""

    __slots__ = ("left", "right", "size", "uid", "_set", "_ord", "_ek", "__weakref__")

    def __init__(self, left, right, size, uid):
        sa = object.__setattr__
        sa(self, "left", left)
        sa(self, "right", right)
        sa(self, "size", size)
        sa(self, "uid", uid)
        sa(self, "_set", None)
        sa(self, "_ord", None)
        sa(self, "_ek", None)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def __repr__(self):
        return f"Tree({_text(self, 60)})"

    def __reduce__(self):
        if self.left is None:
            return (_leaf, ())
        return (node, (self.left, self.right))

    def __setattr__(self, name, value):
        if not name.startswith("_"):
            raise AttributeError("Tree is immutable")
        object.__setattr__(self, name, value)


LEAF = Tree(None, None, 1, 0)
_next_uid = [1]


def _leaf():
    return LEAF


def node(left: Tree, right: Tree) -> Tree:
    key = (left.uid, right.uid)
    t = _table.get(key)
    if t is not None:
        return t
    with _lock:
        t = _table.get(key)
        if t is None:
            t = Tree(left, right, left.size + right.size, _next_uid[0])
            _next_uid[0] += 1
            _table[key] = t
    return t


def subtree_set(t: Tree) -> frozenset:
    """Distinct subtrees of ``t`` (cached on the node)."""
    cached = t._set
    if cached is not None:
        return cached
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if u.left is not None:
            stack.append(u.left)
            stack.append(u.right)
    out = frozenset(seen)
    t._set = out
    return out


def subterm(s: Tree, t: Tree) -> bool:
    if s is t:
        return True
    if s.size >= t.size:
        return False
    if t._set is not None:
        return s in t._set
    seen = set()
    stack = [t.left, t.right]
    target = s.size
    while stack:
        u = stack.pop()
        if u is s:
            return True
        if u.size <= target or u in seen:
            continue
        seen.add(u)
        stack.append(u.left)
        stack.append(u.right)
    return False


def substitute(t: Tree, r: Tree, s: Tree) -> Tree:
    """``t[r -> s]``: replace every outermost occurrence of ``r`` by ``s``."""
    if r is s or t.size < r.size:
        return t
    memo: dict = {}
    rsize = r.size

    def go(u):
        if u is r:
            return s
        if u.size <= rsize:
            return u
        v = memo.get(u)
        if v is None:
            v = node(go(u.left), go(u.right))
            memo[u] = v
        return v

    return go(t)


def _text(t, limit):
    """Tree text, cut after ``limit`` characters."""
    out = []
    n = 0
    stack = [t]
    while stack and n < limit:
        u = stack.pop()
        if isinstance(u, str):
            out.append(u)
        elif u.left is None:
            out.append("_")
        else:
            out.append("<")
            stack.extend((">", u.right, ",", u.left))
        n += 1
    s = "".join(out)
    return s + "..." if stack else s
