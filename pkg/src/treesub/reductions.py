"""Compilers from source problems to sentences about trees."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from . import formula as F
from .encodings import (
    ALPHA,
    ARITH_S,
    ARITH_ZERO,
    FractionParams,
    Lin,
    MultParams,
    NumeralScheme,
    SeqParams,
    arith_params,
    canonical_form,
    gamma_term,
    last_letter_trees,
    lin2,
    linpoly_BT,
    m_class_formula,
    member,
    n_class_formula,
    numeral,
    p2_class_formula,
    p_class_formula,
    plus_k,
    pnum,
    sub_lit,
    theta_term,
)
from .formula import Formula, Language, Sentence, Term
from .problems import ModuloInstance, PCPInstance
from .trees import LEAF, Tree, bot_power, node


class ReductionError(ValueError):
    pass


# ------------------------------------------------------------ PCP, LT

PCP_ZERO = bot_power(3)
PCP_ONE = bot_power(4)


def pcp_letter(c: str) -> Tree:
    return PCP_ZERO if c == "0" else PCP_ONE


def word_term(w: str) -> Term:
    return F.const(_word_tree(w))


def _word_tree(w: str) -> Tree:
    from .trees import tup

    return tup([pcp_letter(c) for c in w])


def append_word(x, w: str) -> Term:
    """``x`` followed by the letters of ``w``."""
    t = F.as_term(x)
    for c in w:
        t = F.PairT(t, F.const(pcp_letter(c)))
    return t


def pcp_to_sigma102(inst: PCPInstance) -> Sentence:
    T, L, R = F.Var("T"), F.Var("L"), F.Var("R")

    def mem(x):
        return member(x, ALPHA, T, Language.LT)

    start = F.disj(*(mem(F.PairT(word_term(a), word_term(b))) for a, b in inst.pairs))
    step = F.implies(
        F.conj(mem(F.PairT(L, R)), F.Neq(L, R)),
        F.disj(*(mem(F.PairT(append_word(L, a), append_word(R, b))) for a, b in inst.pairs)),
    )
    f = F.exists("T", F.forall_b(["L", "R"], T, F.conj(start, step)))
    return Sentence.build(f, Language.LT, "pcp-sigma102")


# ------------------------------------------------------------ modulo, LBT

def modulo_to_sigma101(inst: ModuloInstance) -> Sentence:
    T, z = F.Var("T"), F.Var("z")
    M = inst.M

    def mem(x):
        return member(x, ALPHA, T, Language.LBT)

    parts = [mem(F.const(numeral(NumeralScheme.MOD, 3)))]
    two = F.const(numeral(NumeralScheme.MOD, 2))
    for j, (a, b) in enumerate(inst.rules):
        lhs = linpoly_BT(M, z, j)
        parts.append(F.implies(F.conj(mem(lhs), F.Neq(lhs, two)), mem(linpoly_BT(a, z, b))))
    f = F.exists("T", F.forall_b("z", T, F.conj(*parts)))
    return Sentence.build(f, Language.LBT, "modulo-sigma101")


# ------------------------------------------------------------ modulo, LT

@dataclass(frozen=True)
class Clause:
    """``ante -> (some case term is a member)``; exactly one guard holds."""

    tag: str
    ante: Formula
    cases: tuple

    def formula(self, T) -> Formula:
        outs = []
        for guard, t in self.cases:
            m = member(t, ALPHA, T, Language.LT)
            outs.append(m if guard is None else F.conj(guard, m))
        return F.implies(self.ante, F.disj(*outs))


def _direct(t: Term) -> tuple:
    return ((None, t),)


def _psi_mem(lin: Lin, T, extra=()) -> Formula:
    return lin.expand(lambda t: F.conj(member(t, ALPHA, T, Language.LT), *extra(t)) if extra
                      else member(t, ALPHA, T, Language.LT))


def _mem(t, T) -> Formula:
    return member(t, ALPHA, T, Language.LT)


def _main_consequent(inst: ModuloInstance, a: int, b: int, R) -> tuple:
    M = inst.M
    if a == 0:
        return _direct(F.const(canonical_form(b, M)))
    if a == M:
        q, r = divmod(b, M)
        return tuple(Lin(M, plus_k(R, q), r).cases())
    return tuple(Lin(a, R, b).cases())


def modulo102_clauses(inst: ModuloInstance) -> list:
    """All implication conjuncts of the LT modulo sentence."""
    M = inst.M
    T, R, S = F.Var("T"), F.Var("R"), F.Var("S")
    one = pnum(1)
    out = []
    for j, (a, b) in enumerate(inst.rules):
        if a in (0, M):
            continue
        if a < M:
            k, r = divmod(M, a)
            for kk in range(k + 1):
                out.append(Clause(f"{j}.I.{kk}", F.conj(F.Eq(R, pnum(kk)), _psi_mem(Lin(a, R, b), T)),
                                  _direct(pnum(b + kk * a))))
            for m in range(M, b + 2 * M + 1):
                out.append(Clause(f"{j}.II.{m}", _mem(pnum(m), T),
                                  _direct(lin2(a, one, M - a, one, m - M))))
            out.append(Clause(f"{j}.III", F.conj(F.Sub(one, R), _psi_mem(Lin(a, plus_k(R, k), b), T)),
                              _direct(lin2(a, R, M - a, one, b + (a - r)))))
            for m in range(M, b + 2 * M + 1):
                out.append(Clause(f"{j}.IV.{m}", _mem(lin2(a, R, M - a, S, m), T),
                                  _direct(lin2(a, plus_k(R, 1), M - a, plus_k(S, 1), m - M))))
            for m in range(M):
                out.append(Clause(f"{j}.V.{m}",
                                  F.conj(F.proper_sub(S, R), _mem(lin2(a, plus_k(R, k), M - a, S, m), T)),
                                  _direct(lin2(a, R, M - a, plus_k(S, 1), m + (a - r)))))
            for m in range(M):
                for kk in range(1, k):
                    out.append(Clause(f"{j}.VI.{m}.{kk}",
                                      F.conj(F.Sub(one, R), _mem(lin2(a, plus_k(R, kk), M - a, R, m), T)),
                                      _direct(lin2(a, R, M - a, R, m + kk * a))))
        else:
            k, r = divmod(a, M)
            out.append(Clause(f"{j}.A", F.conj(F.Eq(R, one), _psi_mem(Lin(a, R, b), T)),
                              _direct(pnum(b + a))))
            for m in range(M, b + 2 * a + 1):
                out.append(Clause(f"{j}.B.{m}", _mem(pnum(m), T), tuple(Lin(M, one, m - M).cases())))
            out.append(Clause(f"{j}.C", F.conj(F.Sub(one, R), _psi_mem(Lin(a, plus_k(R, 1), b), T)),
                              _direct(lin2(M, plus_k(R, k), a - M, R, b + r))))
            for m in range(M, b + 2 * a + 1):
                out.append(Clause(f"{j}.D.{m}", _mem(lin2(M, R, a - M, S, m), T),
                                  _direct(lin2(M, plus_k(R, 1), a - M, S, m - M))))
            for m in range(M):
                out.append(Clause(f"{j}.E.{m}",
                                  F.conj(F.Sub(one, S), _mem(lin2(M, R, a - M, plus_k(S, 1), m), T)),
                                  _direct(lin2(M, plus_k(R, k - 1), a - M, S, m + r))))
            for m in range(M):
                out.append(Clause(f"{j}.F.{m}", _mem(lin2(M, R, a - M, one, m), T),
                                  tuple(Lin(M, plus_k(R, k - 1), m + r).cases())))
            for m in range(M, b + 2 * a + 1):
                out.append(Clause(f"{j}.G.{m}", _psi_mem(Lin(M, R, m), T),
                                  tuple(Lin(M, plus_k(R, 1), m - M).cases())))
    two = pnum(2)
    for j, (a, b) in enumerate(inst.rules):
        ante = Lin(M, R, j).expand(lambda t: F.conj(_mem(t, T), F.Neq(t, two)))
        out.append(Clause(f"{j}.main", ante, _main_consequent(inst, a, b, R)))
    return out


def modulo_to_sigma102_LT(inst: ModuloInstance) -> Sentence:
    T = F.Var("T")
    parts = [_mem(pnum(3), T)] + [c.formula(T) for c in modulo102_clauses(inst)]
    f = F.exists("T", F.forall_b(["R", "S"], T, F.conj(*parts)))
    return Sentence.build(f, Language.LT, "modulo-sigma102")


# ------------------------------------------------------------ subtree only

class Fresh:
    """Supplier of bounded-variable names that avoid a reserved set."""

    def __init__(self, reserved=()):
        self.used = set(reserved)
        self.k = 0

    def __call__(self, base: str) -> str:
        while True:
            self.k += 1
            name = f"{base}{self.k}"
            if name not in self.used:
                self.used.add(name)
                return name


def _v(x):
    return F.as_term(x)


def _fresh_for(fresh, *args):
    if fresh is None:
        fresh = Fresh(a for a in args if isinstance(a, str))
    return fresh


def zero_formula(x, y, fresh: Optional[Fresh] = None) -> Formula:
    fresh = _fresh_for(fresh, x, y)
    x, y = _v(x), _v(y)
    z, w, r = fresh("z"), fresh("w"), fresh("r")
    Z, W, Rr = F.Var(z), F.Var(w), F.Var(r)
    body = F.conj(
        F.Sub(x, Z), F.Sub(x, W), F.NotSub(Z, W), F.NotSub(W, Z),
        F.ForallB(r, y, F.disj(F.Eq(Rr, y), F.Eq(Rr, Z), F.Eq(Rr, W), F.Sub(Rr, x))),
    )
    return F.exists_b([z, w], y, body)


def one_formula(x, y, fresh: Optional[Fresh] = None) -> Formula:
    fresh = _fresh_for(fresh, x, y)
    xt, yt = _v(x), _v(y)
    s, t, r = fresh("s"), fresh("t"), fresh("r")
    Rr = F.Var(r)
    body = F.conj(
        zero_formula(x, s, fresh), zero_formula(x, t, fresh),
        F.NotSub(F.Var(s), F.Var(t)), F.NotSub(F.Var(t), F.Var(s)),
        F.ForallB(r, yt, F.disj(F.Eq(Rr, yt), F.Sub(Rr, F.Var(s)), F.Sub(Rr, F.Var(t)))),
    )
    return F.exists_b([s, t], yt, body)


def conc_formula(w: str, x, y, fresh: Optional[Fresh] = None) -> Formula:
    if not w or set(w) - {"0", "1"}:
        raise ReductionError("conc needs a nonempty binary string")
    fresh = _fresh_for(fresh, x, y)
    step = zero_formula if w[-1] == "0" else one_formula
    if len(w) == 1:
        return step(x, y, fresh)
    z = fresh("c")
    return F.ExistsB(z, _v(y), F.conj(conc_formula(w[:-1], x, z, fresh), step(z, y, fresh)))


def pair_formula(beta, gamma, x, y, z, fresh: Optional[Fresh] = None,
                 as_displayed: bool = False) -> Formula:
    """Multivalued pairing.  Unless ``as_displayed``, ``beta`` and ``gamma`` are
    also required below ``s0`` and ``t0``; without that, ``s0 = s`` and
    ``t0 = t`` satisfy the block and bare ``<Zero(x), Zero(y)>`` shapes count
    as pairs."""
    fresh = _fresh_for(fresh, beta, gamma, x, y, z)
    B, G, Z = _v(beta), _v(gamma), _v(z)
    s, t, s0, t0 = fresh("s"), fresh("t"), fresh("p"), fresh("q")
    S, Tt, S0, T0 = (F.Var(n) for n in (s, t, s0, t0))
    r1, r2, r3 = fresh("r"), fresh("r"), fresh("r")
    R1, R2, R3 = F.Var(r1), F.Var(r2), F.Var(r3)
    body = F.conj(
        zero_formula(x, s, fresh), zero_formula(y, t, fresh),
        F.NotSub(B, S), F.NotSub(S, B),
        F.ForallB(r1, S0, F.disj(F.Eq(R1, S0), F.Sub(R1, B), F.Sub(R1, S))),
        F.NotSub(G, Tt), F.NotSub(Tt, G),
        F.ForallB(r2, T0, F.disj(F.Eq(R2, T0), F.Sub(R2, G), F.Sub(R2, Tt))),
        F.ForallB(r3, Z, F.disj(F.Eq(R3, Z), F.Sub(R3, S0), F.Sub(R3, T0))),
    )
    if not as_displayed:
        body = F.conj(body, F.Sub(B, S0), F.Sub(G, T0))
    return F.conj(F.NotSub(B, G), F.NotSub(G, B), F.exists_b([s, t, s0, t0], Z, body))


def in_alpha_sigma(x, alpha, y, fresh: Optional[Fresh] = None,
                   as_displayed: bool = False) -> Formula:
    """Membership using only the subtree relation.  Unless ``as_displayed``,
    the witness ``z`` must contain both ``x`` and ``alpha``; otherwise
    ``z = x`` makes every ``x`` below ``y`` a member."""
    fresh = _fresh_for(fresh, x, alpha, y)
    X, A, Y = _v(x), _v(alpha), _v(y)
    z, u = fresh("m"), fresh("u")
    Zt, U = F.Var(z), F.Var(u)
    inner = F.ForallB(u, Zt, F.disj(F.Eq(U, Zt), F.Sub(U, X), F.Sub(U, A)))
    if not as_displayed:
        inner = F.conj(F.Sub(X, Zt), F.Sub(A, Zt), inner)
    return F.conj(F.NotSub(X, A), F.NotSub(A, X), F.ExistsB(z, Y, inner))


SUBTREE_PARAMS = ("alpha", "beta", "gamma", "delta")


def pcp_to_sigma_subtree(inst: PCPInstance, as_displayed: bool = False) -> Sentence:
    fresh = Fresh({"alpha", "beta", "gamma", "delta", "T", "L", "R", "S", "x", "y", "z", "u", "v", "w"})
    T = F.Var("T")
    start = []
    for a, b in inst.pairs:
        start.append(F.exists_b(["x", "y", "z"], T, F.conj(
            conc_formula(a, "delta", "x", fresh), conc_formula(b, "delta", "y", fresh),
            pair_formula("beta", "gamma", "x", "y", "z", fresh, as_displayed),
            in_alpha_sigma("z", "alpha", "T", fresh, as_displayed),
        )))
    ante = F.conj(
        pair_formula("beta", "gamma", "L", "R", "S", fresh, as_displayed),
        in_alpha_sigma("S", "alpha", "T", fresh, as_displayed),
        F.Neq(F.Var("L"), F.Var("R")),
    )
    steps = []
    for a, b in inst.pairs:
        steps.append(F.exists_b(["u", "v", "w"], T, F.conj(
            conc_formula(a, "L", "u", fresh), conc_formula(b, "R", "v", fresh),
            pair_formula("beta", "gamma", "u", "v", "w", fresh, as_displayed),
            in_alpha_sigma("w", "alpha", "T", fresh, as_displayed),
        )))
    matrix = F.conj(F.disj(*start), F.implies(ante, F.disj(*steps)))
    f = F.exists([*SUBTREE_PARAMS, "T"], F.forall_b(["L", "R", "S"], T, matrix))
    prov = "pcp-subtree-literal" if as_displayed else "pcp-subtree"
    return Sentence.build(f, Language.LT_MINUS, prov)


# ------------------------------------------------------------ arithmetic

ARITH_FRACTION = FractionParams(ARITH_ZERO, (ARITH_S,))


def arith_numeral(n: int) -> Tree:
    from .encodings import fraction

    return fraction(n, ARITH_FRACTION)


def arith_domain(x) -> Formula:
    return F.disj(n_class_formula(x, ARITH_FRACTION), F.eq(x, ARITH_ZERO))


def arith_plus(x, y, z) -> Formula:
    zero = F.const(ARITH_ZERO)
    return F.conj(arith_domain(x), arith_domain(y), arith_domain(z),
                  F.Eq(F.as_term(z), F.SubstT(F.as_term(y), zero, F.as_term(x))))


def arith_times(x, y, z, prefix: str = "times") -> Formula:
    """Product relation; the inner witnesses are ``prefix.n``, ``prefix.v``,
    ``prefix.w``, ``prefix.w.L`` and ``prefix.w.R``."""
    p = arith_params()
    X, Y, Z = F.as_term(x), F.as_term(y), F.as_term(z)
    zero = F.const(ARITH_ZERO)
    n, v, w = (f"{prefix}.{c}" for c in "nvw")
    phi = F.exists([n, v, w], F.conj(
        F.Eq(F.Var(n), F.SubstT(X, zero, F.const(p.beta))),
        m_class_formula(w, p, n_term=F.Var(n), prefix=w),
        F.Eq(F.Var(w), F.PairT(F.Var(v), F.PairT(F.SubstT(Y, zero, F.const(p.alpha)),
                                                 F.SubstT(Z, zero, F.const(p.beta))))),
    ))
    return F.conj(
        arith_domain(X), arith_domain(Y), arith_domain(Z),
        F.disj(
            F.conj(F.Eq(X, zero), F.Eq(Z, zero)),
            F.conj(F.Eq(Y, zero), F.Eq(Z, zero)),
            F.conj(F.Neq(X, zero), F.Neq(Y, zero), phi),
        ),
    )


@dataclass(frozen=True)
class ArithAtom:
    kind: str  # plus | times | zero | one | eq
    args: tuple


@dataclass(frozen=True)
class Diophantine:
    variables: tuple
    atoms: tuple

    def holds(self, values: dict) -> bool:
        for at in self.atoms:
            v = [values[a] for a in at.args]
            ok = {
                "plus": lambda: v[0] + v[1] == v[2],
                "times": lambda: v[0] * v[1] == v[2],
                "zero": lambda: v[0] == 0,
                "one": lambda: v[0] == 1,
                "eq": lambda: v[0] == v[1],
            }[at.kind]()
            if not ok:
                return False
        return True


_IDENT = r"[A-Za-z][A-Za-z0-9_]*"
_ATOM_RES = [
    ("plus", re.compile(rf"^({_IDENT})\s*\+\s*({_IDENT})\s*=\s*({_IDENT})$")),
    ("times", re.compile(rf"^({_IDENT})\s*\*\s*({_IDENT})\s*=\s*({_IDENT})$")),
    ("zero", re.compile(rf"^({_IDENT})\s*=\s*0$")),
    ("one", re.compile(rf"^({_IDENT})\s*=\s*1$")),
    ("eq", re.compile(rf"^({_IDENT})\s*=\s*({_IDENT})$")),
]


def parse_diophantine(text: str) -> Diophantine:
    """``exists x, y, z : x + y = z & x * y = z & x = 1``."""
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    m = re.match(r"^exists\s+(.*?)\s*:\s*(.*)$", body)
    if not m:
        raise ReductionError("expected 'exists VARS : ATOM & ...'")
    names = tuple(v.strip() for v in m.group(1).split(",") if v.strip())
    atoms = []
    for raw in m.group(2).split("&"):
        raw = raw.strip()
        for kind, rx in _ATOM_RES:
            hit = rx.match(raw)
            if hit:
                atoms.append(ArithAtom(kind, hit.groups()))
                break
        else:
            raise ReductionError(f"unsupported atom {raw!r}")
    return _check_dioph(Diophantine(names, tuple(atoms)))


def _check_dioph(d: Diophantine) -> Diophantine:
    if len(set(d.variables)) != len(d.variables):
        raise ReductionError("duplicate variable")
    for at in d.atoms:
        arity = {"plus": 3, "times": 3, "zero": 1, "one": 1, "eq": 2}.get(at.kind)
        if arity is None or len(at.args) != arity:
            raise ReductionError(f"unsupported atom shape {at}")
        for a in at.args:
            if a not in d.variables:
                raise ReductionError(f"unquantified variable {a}")
    return d


def diophantine_to_existential(d: Diophantine) -> Sentence:
    d = _check_dioph(d)
    parts = [arith_domain(v) for v in d.variables]
    for i, at in enumerate(d.atoms, 1):
        a = at.args
        if at.kind == "plus":
            parts.append(arith_plus(*a))
        elif at.kind == "times":
            parts.append(arith_times(*a, prefix=f"times{i}"))
        elif at.kind == "zero":
            parts.append(F.eq(a[0], ARITH_ZERO))
        elif at.kind == "one":
            parts.append(F.eq(a[0], arith_numeral(1)))
        else:
            parts.append(F.eq(a[0], a[1]))
    if not parts:
        raise ReductionError("empty arithmetic sentence")
    f = F.exists(list(d.variables), F.conj(*parts))
    return Sentence.build(f, Language.LBT, "diophantine-exist")


# ------------------------------------------------------------ PCP, existential

EXIST_ALPHA = node(LEAF, bot_power(2))
EXIST_GAMMA = node(LEAF, bot_power(3))


def exist_params(inst: PCPInstance) -> tuple:
    a = SeqParams(tuple(inst.tops), EXIST_ALPHA, EXIST_GAMMA)
    b = SeqParams(tuple(inst.bottoms), EXIST_ALPHA, EXIST_GAMMA)
    return a, b


def pcp_to_existential(inst: PCPInstance) -> Sentence:
    spA, spB = exist_params(inst)
    alpha = F.const(EXIST_ALPHA)

    def side(P, U, Up, W, X, S, sp):
        return F.conj(
            p_class_formula(P, sp, prefix=P),
            F.Eq(F.Var(P), F.PairT(F.Var(Up), F.Var(U))),
            p2_class_formula(W, sp, prefix=W),
            sub_lit(F.PairT(alpha, F.Var(X)), W),
            F.Eq(F.Var(W), F.PairT(F.Var(S), gamma_term(F.Var(P), sp))),
        )

    body = F.conj(
        side("L", "U", "U_prime", "W_L", "X_L", "S_L", spA),
        side("R", "V", "V_prime", "W_R", "X_R", "S_R", spB),
        F.Eq(theta_term(F.Var("U"), last_letter_trees(spA.C, spA), spA),
             theta_term(F.Var("V"), last_letter_trees(spB.C, spB), spB)),
        F.Eq(F.Var("X_L"), F.Var("X_R")),
    )
    names = ["L", "U", "U_prime", "R", "V", "V_prime", "W_L", "X_L", "S_L", "W_R", "X_R", "S_R"]
    return Sentence.build(F.exists(names, body), Language.LBT, "pcp-exist")


# ------------------------------------------------------------ H10 normal form

def _neq_split(s: Term, t: Term) -> Formula:
    return F.disj(
        F.Eq(F.SubstT(t, s, F.PairT(s, s)), t),
        F.Eq(F.SubstT(s, t, F.PairT(t, t)), s),
    )


def _dnf(f: Formula) -> list:
    """Disjuncts as lists of equations; disequalities are split first."""
    if isinstance(f, F.Eq):
        return [[f]]
    if isinstance(f, F.Neq):
        return _dnf(_neq_split(f.s, f.t))
    if isinstance(f, F.Or):
        return [d for g in f.items for d in _dnf(g)]
    if isinstance(f, F.And):
        out = [[]]
        for g in f.items:
            out = [a + b for a in out for b in _dnf(g)]
        return out
    raise ReductionError(f"unsupported matrix node {type(f).__name__}; desugar subtree literals first")


def merge_equations(eqs: Sequence[F.Eq]) -> F.Eq:
    s, t = eqs[0].s, eqs[0].t
    for e in eqs[1:]:
        s, t = F.PairT(s, e.s), F.PairT(t, e.t)
    return F.Eq(s, t)


def h10_normalize_matrix(matrix: Formula) -> list:
    """One equation per disjunct of the normal form."""
    return [merge_equations(d) for d in _dnf(matrix)]


def _strip_exists(f: Formula, names: list) -> Formula:
    if isinstance(f, F.Exists):
        if f.var in names:
            raise ReductionError(f"existential variable {f.var} bound twice")
        names.append(f.var)
        return _strip_exists(f.body, names)
    if isinstance(f, (F.And, F.Or)):
        return type(f)(tuple(_strip_exists(g, names) for g in f.items))
    if isinstance(f, (F.ExistsB, F.ForallB)):
        raise ReductionError("input is not existential (bounded quantifier found)")
    return f


def h10_normalize(s: Sentence) -> list:
    f = s.formula
    if not F.classify(f).is_existential:
        raise ReductionError("input is not an existential sentence")
    if any(isinstance(g, (F.Sub, F.NotSub)) for g in F.walk(f)):
        f = F.desugar_sub_BT(f)
    names: list = []
    matrix = _strip_exists(f, names)
    out = []
    for eq in h10_normalize_matrix(matrix):
        g = F.exists(names, eq) if names else eq
        out.append(Sentence.build(g, Language.LBT, "h10"))
    return out
