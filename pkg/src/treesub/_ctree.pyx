# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tree kernel; same surface as ``_pytree``."""

import threading

BACKEND = "cython"

cdef object _lock = threading.Lock()
cdef dict _table = {}
cdef Py_ssize_t _next_uid = 1


cdef class Tree:
    """A finite full binary tree.  Build with ``LEAF`` and ``node``."""

    cdef readonly Tree left
    cdef readonly Tree right
    cdef readonly Py_ssize_t size
    cdef readonly Py_ssize_t uid
    cdef public object _set
    cdef public object _ord
    cdef public object _ek
    cdef object __weakref__

    @property
    def is_leaf(self):
        return self.left is None

    def __repr__(self):
        return f"Tree({_text(self, 60)})"

    def __reduce__(self):
        if self.left is None:
            return (_leaf, ())
        return (node, (self.left, self.right))


cdef Tree _make(Tree left, Tree right, Py_ssize_t size, Py_ssize_t uid):
    cdef Tree t = Tree.__new__(Tree)
    t.left = left
    t.right = right
    t.size = size
    t.uid = uid
    return t


LEAF = _make(None, None, 1, 0)
cdef Tree _LEAF = LEAF


def _leaf():
    return _LEAF


cpdef Tree node(Tree left, Tree right):
    global _next_uid
    cdef tuple key = (left.uid, right.uid)
    cdef object t = _table.get(key)
    if t is not None:
        return <Tree>t
    with _lock:
        t = _table.get(key)
        if t is None:
            t = _make(left, right, left.size + right.size, _next_uid)
            _next_uid += 1
            _table[key] = t
    return <Tree>t


cpdef frozenset subtree_set(Tree t):
    if t._set is not None:
        return <frozenset>t._set
    cdef set seen = set()
    cdef list stack = [t]
    cdef Tree u
    while stack:
        u = <Tree>stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if u.left is not None:
            stack.append(u.left)
            stack.append(u.right)
    out = frozenset(seen)
    t._set = out
    return out


cpdef bint subterm(Tree s, Tree t):
    if s is t:
        return True
    if s.size >= t.size:
        return False
    if t._set is not None:
        return s in <frozenset>t._set
    cdef set seen = set()
    cdef list stack = [t.left, t.right]
    cdef Py_ssize_t target = s.size
    cdef Tree u
    while stack:
        u = <Tree>stack.pop()
        if u is s:
            return True
        if u.size <= target or u in seen:
            continue
        seen.add(u)
        stack.append(u.left)
        stack.append(u.right)
    return False


cdef Tree _subst(Tree u, Tree r, Tree s, dict memo):
    if u is r:
        return s
    if u.size <= r.size:
        return u
    cdef object v = memo.get(u)
    if v is None:
        v = node(_subst(u.left, r, s, memo), _subst(u.right, r, s, memo))
        memo[u] = v
    return <Tree>v


cpdef Tree substitute(Tree t, Tree r, Tree s):
    """``t[r -> s]``: replace every outermost occurrence of ``r`` by ``s``."""
    if r is s or t.size < r.size:
        return t
    return _subst(t, r, s, {})


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
