"""Tree codings used by the reductions.

Numerals, finite sets via ``in_alpha``, the fraction classes ``m/(alpha,s)``,
word codecs built from letter trees ``g_i = <_^(3+i), _^(3+i)>``, the
multiplication class, the prefix-sequence classes P and P2 with the
operators Gamma and Theta, and the linear-polynomial encodings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import formula as F
from .formula import Formula, Language, Term
from .trees import (
    LEAF,
    Tree,
    bot_power,
    node,
    order_key,
    power,
    substitute,
    substitute_many,
    subterm,
    subtree_set,
    tup,
)


class EncodingError(ValueError):
    pass


# Membership parameter shared by the set encodings.
ALPHA = node(LEAF, bot_power(2))


def sub_lit(a, b, language: Language = Language.LBT) -> Formula:
    """``a`` is a subtree of ``b``; spelled with substitution under LBT."""
    a, b = F.as_term(a), F.as_term(b)
    if language is Language.LBT:
        return F.Neq(F.SubstT(b, a, F.PairT(a, a)), b)
    return F.Sub(a, b)


def notsub_lit(a, b, language: Language = Language.LBT) -> Formula:
    return F.negate(sub_lit(a, b, language))


def member(x, alpha, y, language: Language = Language.LT) -> Formula:
    """``x in_alpha y`` in the requested language."""
    x, alpha, y = F.as_term(x), F.as_term(alpha), F.as_term(y)
    return F.conj(sub_lit(F.PairT(x, alpha), y, language), notsub_lit(alpha, x, language))


# ------------------------------------------------------------ numerals

class NumeralScheme(enum.Enum):
    MOD = "mod"  # n -> _^(n+2)
    PCP = "pcp"  # n -> _^(n+1)


def numeral(scheme: NumeralScheme, n: int) -> Tree:
    if n < 0:
        raise EncodingError("numerals are for natural numbers")
    return bot_power(n + (2 if scheme is NumeralScheme.MOD else 1))


def numeral_value(scheme: NumeralScheme, t: Tree) -> Optional[int]:
    k, u = 1, t
    while u.left is not None:
        if u.right is not LEAF:
            return None
        k += 1
        u = u.left
    v = k - (2 if scheme is NumeralScheme.MOD else 1)
    return v if v >= 0 else None


# ------------------------------------------------------------ sets

def encode_set(members: Iterable[Tree], alpha: Tree = ALPHA) -> Tree:
    ms = sorted(set(members), key=order_key)
    for x in ms:
        if subterm(alpha, x):
            raise EncodingError("set member contains the membership parameter")
    if not ms:
        return LEAF
    return tup([node(x, alpha) for x in ms])


def decode_set(t: Tree, alpha: Tree = ALPHA) -> set:
    out = set()
    for u in subtree_set(t):
        if u.left is not None and u.right is alpha and not subterm(alpha, u.left):
            out.add(u.left)
    return out


# ------------------------------------------------------------ fractions

@dataclass(frozen=True)
class FractionParams:
    alpha: Tree
    s: tuple

    def __post_init__(self):
        s = tuple(self.s)
        object.__setattr__(self, "s", s)
        if not s:
            raise EncodingError("fraction parameters need at least one s")
        for x in s:
            if subterm(self.alpha, x):
                raise EncodingError("alpha must not be a subtree of any s_i")
        if s[-1] in s[:-1]:
            raise EncodingError("the last s must differ from the others")

    @property
    def one(self) -> Tree:
        return tup([self.alpha, *self.s])


def fraction(m: int, p: FractionParams) -> Tree:
    """``m/(alpha,s)``; ``0`` gives ``alpha``."""
    if m < 0:
        raise EncodingError("fraction index must be >= 0")
    one = p.one
    out = p.alpha
    for _ in range(m):
        out = substitute(one, p.alpha, out)
    return out


def fraction_index(t: Tree, p: FractionParams) -> Optional[int]:
    """The ``m >= 1`` with ``t = m/(alpha,s)``, if any."""
    a, step = p.alpha.size, p.one.size - p.alpha.size
    q, r = divmod(t.size - a, step)
    if r or q < 1:
        return None
    return q if fraction(q, p) is t else None


def n_class_member(t: Tree, p: FractionParams) -> bool:
    return fraction_index(t, p) is not None


def n_class_formula(x, p: FractionParams, language: Language = Language.LBT) -> Formula:
    """Quantifier-free characterisation of the class ``{m/(alpha,s) : m >= 1}``."""
    x = F.as_term(x)
    one, two = F.const(p.one), F.const(fraction(2, p))
    inner = F.SubstT(x, two, one)
    return F.disj(
        F.Eq(x, one),
        F.conj(sub_lit(two, x, language), F.Eq(x, F.SubstT(one, F.const(p.alpha), inner))),
    )


def n_class_or_base_formula(x, p: FractionParams, language: Language = Language.LBT) -> Formula:
    return F.disj(n_class_formula(x, p, language), F.eq(x, p.alpha))


# ------------------------------------------------------------ words

def letter(i: int) -> Tree:
    """Letter tree ``g_i``."""
    if i < 1:
        raise EncodingError("letter indices start at 1")
    c = bot_power(3 + i)
    return node(c, c)


def letter_index(t: Tree) -> Optional[int]:
    if t.left is None or t.left is not t.right:
        return None
    k, u = 1, t.left
    while u.left is not None:
        if u.right is not LEAF:
            return None
        k += 1
        u = u.left
    return k - 3 if k >= 4 else None


TAU_EPS = node(LEAF, bot_power(2))


def _index_word(word, alphabet) -> list:
    pos = {a: i + 1 for i, a in enumerate(alphabet)}
    try:
        return [pos[a] for a in word]
    except KeyError as e:
        raise EncodingError(f"letter {e.args[0]!r} outside the alphabet") from None


def tau(word, alphabet, base: Tree = TAU_EPS, direction: str = "lr") -> Tree:
    """Word code.  ``lr``: the bottom-up reading is left to right (concat is
    ``y[eps -> x]``).  ``rl``: the top letter is the first letter."""
    idx = _index_word(word, alphabet)
    if direction == "rl":
        idx = idx[::-1]
    elif direction != "lr":
        raise EncodingError(f"unknown direction {direction!r}")
    for i in range(1, len(alphabet) + 1):
        g = letter(i)
        if subterm(base, g) or subterm(g, base):
            raise EncodingError("base must be incomparable with every letter tree")
    return tup([base] + [letter(i) for i in idx])


def tau_decode(t: Tree, alphabet, base: Tree = TAU_EPS, direction: str = "lr") -> tuple:
    out = []
    u = t
    while u is not base:
        if u.left is None:
            raise EncodingError("not a word code")
        i = letter_index(u.right)
        if i is None or i > len(alphabet):
            raise EncodingError("not a word code")
        out.append(alphabet[i - 1])
        u = u.left
    out.reverse()
    if direction == "rl":
        out.reverse()
    return tuple(out)


def is_word_code(t: Tree, nletters: int, base: Tree) -> bool:
    u = t
    while u is not base:
        if u.left is None:
            return False
        i = letter_index(u.right)
        if i is None or i > nletters:
            return False
        u = u.left
    return True


def tau_domain_formula(x, letters: Sequence[Tree], base: Tree = TAU_EPS,
                       allow_empty: bool = True) -> Formula:
    """``x[l2->l1]...[lk->l1]`` lies in ``{m/(base,l1)}`` (or equals ``base``)."""
    letters = list(letters)
    first = letters[0]
    y = F.subst_chain(x, [(g, first) for g in letters[1:]])
    p = FractionParams(base, (first,))
    if allow_empty:
        return n_class_or_base_formula(y, p)
    return n_class_formula(y, p)


def concat_formula(x, y, z, base: Tree = TAU_EPS) -> Formula:
    """``x`` followed by ``y`` is ``z``: ``z = y[eps -> x]``."""
    return F.eq(z, F.subst(y, base, x))


def tally_formula(x, y, k: int, nletters: int) -> Formula:
    """``y`` is ``x`` with every letter replaced by letter ``k``."""
    return F.eq(y, F.subst_chain(x, [(letter(i), letter(k)) for i in range(1, nletters + 1)]))


# ------------------------------------------------------------ multiplication

@dataclass(frozen=True)
class MultParams:
    alpha: Tree
    beta: Tree
    gamma: Tree
    s: Tree
    t: Tree
    n: int = 1

    def __post_init__(self):
        trio = (self.alpha, self.beta, self.gamma)
        for a in trio:
            for b in trio:
                if a is not b and subterm(a, b):
                    raise EncodingError("alpha, beta, gamma must be pairwise incomparable")
        for a in (self.alpha, self.beta):
            for b in (self.s, self.t):
                if subterm(a, b):
                    raise EncodingError("alpha and beta must not be subtrees of s or t")
        if self.n < 1:
            raise EncodingError("n must be >= 1")

    @property
    def fa(self) -> FractionParams:
        return FractionParams(self.alpha, (self.s,))

    @property
    def fb(self) -> FractionParams:
        return FractionParams(self.beta, (self.t,))

    def base(self, nb: Optional[Tree] = None) -> Tree:
        nb = fraction(self.n, self.fb) if nb is None else nb
        return node(self.gamma, node(fraction(1, self.fa), nb))


ARITH_ZERO = node(LEAF, bot_power(2))
ARITH_S = bot_power(5)


def arith_params(n: int = 1) -> MultParams:
    return MultParams(
        alpha=node(LEAF, bot_power(4)),
        beta=node(LEAF, bot_power(5)),
        gamma=node(LEAF, bot_power(3)),
        s=ARITH_S,
        t=ARITH_S,
        n=n,
    )


def build_mult_tree(p: MultParams, k: int) -> Tree:
    """``<gamma, <1/a, n/b>, ..., <k/a, kn/b>>``."""
    if k < 1:
        raise EncodingError("k must be >= 1")
    fa, fb = p.fa, p.fb
    return tup([p.gamma] + [node(fraction(i, fa), fraction(i * p.n, fb)) for i in range(1, k + 1)])


def m_class_member(t: Tree, p: MultParams) -> bool:
    items = []
    u = t
    while u.left is not None and u is not p.gamma:
        items.append(u.right)
        u = u.left
    if u is not p.gamma or not items:
        return False
    items.reverse()
    return t is build_mult_tree(p, len(items))


def m_class_formula(x, p: MultParams, n_term=None, prefix: str = "M") -> Formula:
    """Existential characterisation of the multiplication class.

    ``n_term`` names ``n/(beta,t)``; it defaults to the closed tree for ``p.n``.
    The inner witnesses are ``prefix.L`` and ``prefix.R``."""
    x = F.as_term(x)
    nb = F.const(fraction(p.n, p.fb)) if n_term is None else F.as_term(n_term)
    one_a = F.const(fraction(1, p.fa))
    base = F.PairT(F.const(p.gamma), F.PairT(one_a, nb))
    L, R = f"{prefix}.L", f"{prefix}.R"
    stripped = F.subst_chain(x, [(base, p.gamma), (one_a, p.alpha), (nb, p.beta)])
    body = F.conj(
        sub_lit(base, x),
        n_class_or_base_formula(L, p.fa),
        n_class_or_base_formula(R, p.fb),
        F.Eq(x, F.PairT(stripped, F.PairT(F.Var(L), F.Var(R)))),
    )
    return F.exists([L, R], body)


def m_class_witness(t: Tree, prefix: str = "M") -> dict:
    return {f"{prefix}.L": t.right.left, f"{prefix}.R": t.right.right}


# ------------------------------------------------------------ sequences

@dataclass(frozen=True)
class SeqParams:
    """Codewords ``C`` with letters 0, 1, mu_1..mu_n and fresh mu_{n+1}..mu_{2n}."""

    C: tuple
    alpha: Tree = ALPHA
    gamma: Tree = field(default_factory=lambda: node(LEAF, bot_power(3)))

    def __post_init__(self):
        C = tuple(self.C)
        object.__setattr__(self, "C", C)
        if not C:
            raise EncodingError("need at least one codeword")
        for c in C:
            if not c or set(c) - {"0", "1"}:
                raise EncodingError(f"codewords must be nonempty binary strings, got {c!r}")
        if subterm(self.alpha, self.gamma) or subterm(self.gamma, self.alpha):
            raise EncodingError("alpha and gamma must be incomparable")
        for i in range(1, 2 * len(C) + 3):
            g = letter(i)
            if subterm(self.alpha, g) or subterm(g, self.alpha):
                raise EncodingError("alpha must be incomparable with the letter trees")
        for i in range(1, len(C) + 1):
            if subterm(self.gamma, self.mu(i)):
                raise EncodingError("gamma must not be a subtree of a mu letter")

    @property
    def n(self) -> int:
        return len(self.C)

    @property
    def zero(self) -> Tree:
        return letter(1)

    @property
    def one(self) -> Tree:
        return letter(2)

    def mu(self, i: int) -> Tree:
        return letter(2 + i)

    @property
    def alphabet(self) -> list:
        """Symbols of the word alphabet: ``0``, ``1``, ``m1``..``mn``."""
        return ["0", "1"] + [f"m{i}" for i in range(1, self.n + 1)]

    @property
    def letters(self) -> list:
        return [letter(i) for i in range(1, self.n + 3)]

    @property
    def delta(self) -> Tree:
        return node(self.alpha, self.alpha)


def codeword_symbols(C: Sequence[str], indices: Sequence[int]) -> list:
    """``w_i mu_i`` blocks for ``c_i = w_i d``, concatenated."""
    out = []
    for i in indices:
        if not 1 <= i <= len(C):
            raise EncodingError(f"codeword index {i} out of range")
        out.extend(C[i - 1][:-1])
        out.append(f"m{i}")
    return out


def encode_word(sp: SeqParams, indices: Sequence[int], base: Optional[Tree] = None) -> Tree:
    """``(c_{i1}...c_{im})/(C, base)``; the empty product is ``base``."""
    base = sp.alpha if base is None else base
    return tau(codeword_symbols(sp.C, indices), sp.alphabet, base, "rl")


def build_P_element(sp: SeqParams, indices: Sequence[int]) -> Tree:
    if not indices:
        raise EncodingError("need at least one index")
    return tup([sp.gamma] + [encode_word(sp, indices[: k + 1]) for k in range(len(indices))])


def p_class_indices(t: Tree, sp: SeqParams) -> Optional[list]:
    """Index sequence of a P-element, or None when ``t`` is not one."""
    items = []
    u = t
    while u.left is not None and u is not sp.gamma:
        items.append(u.right)
        u = u.left
    if u is not sp.gamma or not items:
        return None
    items.reverse()
    blocks = {i: codeword_symbols(sp.C, [i]) for i in range(1, sp.n + 1)}
    prev: list = []
    seq = []
    for e in items:
        try:
            w = list(tau_decode(e, sp.alphabet, sp.alpha, "rl"))
        except EncodingError:
            return None
        hit = None
        for i, b in blocks.items():
            if w == prev + b:
                hit = i
                break
        if hit is None:
            return None
        seq.append(hit)
        prev = w
    return seq


def p_class_member(t: Tree, sp: SeqParams) -> bool:
    return p_class_indices(t, sp) is not None


def p_class_formula(x, sp: SeqParams, prefix: str = "P") -> Formula:
    """Existential characterisation of the P class; inner witness ``prefix.S``."""
    x = F.as_term(x)
    S = F.Var(f"{prefix}.S")
    a, d, g = F.const(sp.alpha), F.const(sp.delta), F.const(sp.gamma)
    lifted = F.SubstT(x, a, d)
    pieces = [F.const(encode_word(sp, [i], sp.delta)) for i in range(1, sp.n + 1)]
    alts = []
    for m in range(1, sp.n + 1):
        head = F.PairT(g, F.const(encode_word(sp, [m])))
        head_d = F.PairT(g, pieces[m - 1])
        body = F.subst_chain(lifted, [(head_d, g)] + [(pc, a) for pc in pieces])
        alts.append(F.conj(sub_lit(head, x), F.Eq(x, F.PairT(body, S))))
    return F.exists(
        S.name,
        F.conj(
            notsub_lit(d, x),
            tau_domain_formula(S, sp.letters, sp.alpha),
            F.disj(*alts),
        ),
    )


def p_class_witness(t: Tree, prefix: str = "P") -> dict:
    return {f"{prefix}.S": t.right}


def gamma_op(t: Tree, sp: SeqParams) -> Tree:
    """Gamma as three staged substitution passes."""
    n = sp.n
    t0 = substitute_many(
        t, [(node(sp.alpha, sp.mu(i)), node(sp.mu(n + i), sp.mu(i))) for i in range(1, n + 1)]
    )
    t1 = substitute_many(t0, [(sp.one, sp.zero)] + [(sp.mu(i), sp.zero) for i in range(1, n + 1)])
    return substitute_many(t1, [(sp.mu(n + i), sp.mu(i)) for i in range(1, n + 1)])


def gamma_term(x, sp: SeqParams) -> Term:
    n = sp.n
    pairs = [(node(sp.alpha, sp.mu(i)), node(sp.mu(n + i), sp.mu(i))) for i in range(1, n + 1)]
    pairs += [(sp.one, sp.zero)] + [(sp.mu(i), sp.zero) for i in range(1, n + 1)]
    pairs += [(sp.mu(n + i), sp.mu(i)) for i in range(1, n + 1)]
    return F.subst_chain(x, pairs)


def gamma_direct(t: Tree, sp: SeqParams) -> Tree:
    """Gamma on P-elements by decoding: every word becomes ``<...<mu_last,0>...,0>``."""
    idx = p_class_indices(t, sp)
    if idx is None:
        raise EncodingError("gamma_direct expects a P-element")
    out = [sp.gamma]
    for k in range(1, len(idx) + 1):
        sym = codeword_symbols(sp.C, idx[:k])
        last = sp.mu(idx[k - 1])
        out.append(tup([last] + [sp.zero] * len(sym)))
    return tup(out)


def theta(u: Tree, last_letters: Sequence[Tree], sp: SeqParams) -> Tree:
    return substitute_many(u, [(sp.mu(i), d) for i, d in enumerate(last_letters, 1)])


def theta_term(x, last_letters: Sequence[Tree], sp: SeqParams) -> Term:
    return F.subst_chain(x, [(sp.mu(i), d) for i, d in enumerate(last_letters, 1)])


def last_letter_trees(C: Sequence[str], sp: SeqParams) -> list:
    return [sp.zero if c[-1] == "0" else sp.one for c in C]


def _p2_step_pairs(sp: SeqParams) -> list:
    return [(node(sp.mu(i), sp.zero), sp.mu(i)) for i in range(1, sp.n + 1)]


def p2_chain(t: Tree, sp: SeqParams, max_steps: int = 10000) -> list:
    """``W_1 = Gamma(t)``, ``W_{i+1} = W_i[<mu_j,0> -> mu_j]`` until stable."""
    w = gamma_op(t, sp)
    chain = [w]
    pairs = _p2_step_pairs(sp)
    for _ in range(max_steps):
        nxt = substitute_many(w, pairs)
        if nxt is w:
            break
        chain.append(nxt)
        w = nxt
    else:
        raise EncodingError("chain did not stabilise")
    if mu_word(w, sp) is None:
        raise EncodingError("chain does not end in a nonempty mu word")
    return chain


def mu_word(t: Tree, sp: SeqParams) -> Optional[list]:
    """Indices ``[i1..im]`` when ``t = <gamma, mu_i1, ..., mu_im>`` with ``m >= 1``."""
    mus = {sp.mu(i): i for i in range(1, sp.n + 1)}
    out = []
    u = t
    while u is not sp.gamma:
        if u.left is None or u.right not in mus:
            return None
        out.append(mus[u.right])
        u = u.left
    return out[::-1] or None


def build_P2_element(t: Tree, sp: SeqParams, repeat: int = 1) -> Tree:
    """``<alpha, W_k, ..., W_1>`` with ``W_k`` repeated ``repeat`` times."""
    chain = p2_chain(t, sp)
    items = [chain[-1]] * (repeat - 1) + chain[::-1]
    return tup([sp.alpha] + items)


def p2_class_formula(x, sp: SeqParams, prefix: str = "W") -> Formula:
    """Existential characterisation of the P2 class; witnesses ``prefix.X``, ``prefix.T``
    and the P-class witness under ``prefix.T``."""
    x = F.as_term(x)
    X, T = f"{prefix}.X", f"{prefix}.T"
    a = F.const(sp.alpha)
    mus = [sp.mu(i) for i in range(1, sp.n + 1)]
    V = F.subst_chain(x, [(F.PairT(a, F.Var(X)), a)] + _p2_step_pairs(sp))
    body = F.conj(
        tau_domain_formula(X, mus, sp.gamma, allow_empty=False),
        sub_lit(F.PairT(a, F.Var(X)), x),
        p_class_formula(T, sp, prefix=T),
        F.Eq(x, F.PairT(V, gamma_term(T, sp))),
    )
    return F.exists([X, T], body)


def p2_class_witness(w: Tree, t: Tree, sp: SeqParams, prefix: str = "W") -> dict:
    u = w
    while u.left is not sp.alpha:
        u = u.left
    out = {f"{prefix}.X": u.right, f"{prefix}.T": t}
    out.update(p_class_witness(t, f"{prefix}.T"))
    return out


# ------------------------------------------------------------ polynomials

def double_term(z) -> Term:
    """``L(z) = z[0 -> z]`` in the MOD numeral scheme."""
    z = F.as_term(z)
    return F.SubstT(z, F.const(numeral(NumeralScheme.MOD, 0)), z)


def times_term(n: int, z) -> Term:
    """A term worth ``n*q`` when ``z`` is the numeral of ``q`` (``n >= 1``).

    Built by repeated addition ``z[0 -> z][0 -> z]...`` (``n-1`` steps)."""
    z = F.as_term(z)
    zero = F.const(numeral(NumeralScheme.MOD, 0))
    out = z
    for _ in range(n - 1):
        out = F.SubstT(out, zero, z)
    return out


def linpoly_BT(n: int, z, m: int) -> Term:
    """``n z + m`` over MOD numerals."""
    mnum = F.const(numeral(NumeralScheme.MOD, m))
    if n == 0:
        return mnum
    return F.SubstT(mnum, F.const(numeral(NumeralScheme.MOD, 0)), times_term(n, z))


def plus_k(x, k: int) -> Term:
    """``x + k``: append ``k`` leaves to the tuple ``x``."""
    x = F.as_term(x)
    for _ in range(k):
        x = F.PairT(x, F.BOT)
    return x


def pnum(n: int) -> Term:
    return F.const(numeral(NumeralScheme.PCP, n))


def lin2(a: int, x, b: int, y, m: int) -> Term:
    """``A x (+) B y (+) m`` = ``x^A ^ y^B`` (then ``<., m>`` when ``m != 0``)."""
    if a < 1 or b < 0:
        raise EncodingError("lin2 needs A >= 1 and B >= 0")
    x, y = F.as_term(x), F.as_term(y)
    t = F.tpower(x, a)
    for _ in range(b):
        t = F.PairT(t, y)
    return F.PairT(t, pnum(m)) if m else t


@dataclass(frozen=True)
class Lin:
    """``n x (+) m`` with its case split on ``x = 0``."""

    n: int
    x: Term
    m: int

    def cases(self) -> list:
        """``[(guard or None, term)]``; exactly one guard holds."""
        x = self.x
        if self.n == 0:
            return [(None, pnum(self.m))]
        k = _closed_chain(x)
        if k is not None:
            return [(None, pnum(self.n * k + self.m))]
        big = F.tpower(x, self.n)
        if self.m:
            big = F.PairT(big, pnum(self.m))
        return [(F.Eq(x, pnum(0)), pnum(self.m)), (F.Neq(x, pnum(0)), big)]

    def expand(self, psi: Callable[[Term], Formula]) -> Formula:
        cs = self.cases()
        if len(cs) == 1:
            return psi(cs[0][1])
        return F.disj(*(F.conj(g, psi(t)) for g, t in cs))


def _closed_chain(x: Term) -> Optional[int]:
    """``k`` when ``x`` is the closed term ``_^(k+1)``."""
    if F.term_vars(x):
        return None
    try:
        v = F.term_tree(x)
    except F.FormulaError:
        return None
    return numeral_value(NumeralScheme.PCP, v)


def canonical_form(t: int, M: int) -> Tree:
    """``u~`` for the number ``t``: ``r``, ``w^M`` or ``<w^M, r>`` with ``w = _^(s+1)``."""
    s, r = divmod(t, M)
    if s == 0:
        return numeral(NumeralScheme.PCP, r)
    w = power(power(LEAF, s + 1), M)
    return node(w, numeral(NumeralScheme.PCP, r)) if r else w
