import itertools
import random

import pytest

from mutate import mutate
from treesub import encodings as E
from treesub import formula as F
from treesub.evaluator import compile_formula, eval_decidable, eval_term
from treesub.trees import (
    LEAF, bot_power, node, parse_tree, substitute, substitute_many, subterm, subtrees, trees_up_to, tup,
)

P = parse_tree
MOD, PCP = E.NumeralScheme.MOD, E.NumeralScheme.PCP


def holds(f, **env):
    return compile_formula(f)({k.replace("__", "."): v for k, v in env.items()})


# ------------------------------------------------------------ numerals, sets

def test_numerals():
    assert E.numeral(MOD, 0) is P("<_,_>")
    assert E.numeral(PCP, 0) is LEAF
    for n in range(12):
        for s in (MOD, PCP):
            assert E.numeral_value(s, E.numeral(s, n)) == n
    assert E.numeral_value(MOD, LEAF) is None
    assert E.numeral_value(MOD, P("<_,<_,_>>")) is None


def test_sets():
    a = E.ALPHA
    for t in trees_up_to(6):
        assert E.decode_set(t, LEAF) == set()
    s = {bot_power(3), bot_power(4)}
    assert E.decode_set(E.encode_set(s, a), a) == s
    assert E.encode_set(set(), a) is LEAF
    with pytest.raises(E.EncodingError):
        E.encode_set({node(LEAF, a)}, a)


def test_set_round_trip_exhaustive():
    a = E.ALPHA
    free = [t for t in trees_up_to(4) if not subterm(a, t)]
    for k in range(4):
        for ms in itertools.combinations(free, k):
            assert E.decode_set(E.encode_set(ms, a), a) == set(ms)


def test_member_formula_matches_decode():
    a = E.ALPHA
    f = E.member(F.Var("x"), F.const(a), F.Var("y"))
    g = E.member(F.Var("x"), F.const(a), F.Var("y"), F.Language.LBT)
    y = E.encode_set({bot_power(3), bot_power(5)}, a)
    for x in trees_up_to(5):
        want = x in E.decode_set(y, a)
        assert eval_decidable(f, {"x": x, "y": y}) == want == eval_decidable(g, {"x": x, "y": y})


# ------------------------------------------------------------ fractions

def test_fraction_examples():
    p = E.FractionParams(bot_power(2), (LEAF,))
    assert E.fraction(1, p) is bot_power(3)
    assert E.n_class_member(bot_power(4), p)
    assert not E.n_class_member(P("<_,<_,_>>"), p)
    with pytest.raises(E.EncodingError):
        E.FractionParams(LEAF, (bot_power(2),))
    with pytest.raises(E.EncodingError):
        E.FractionParams(bot_power(2), (LEAF, LEAF))


@pytest.mark.parametrize("p", [
    E.FractionParams(bot_power(2), (LEAF,)),
    E.FractionParams(E.ALPHA, (bot_power(3), bot_power(4))),
])
def test_fraction_recursion(p):
    one = E.fraction(1, p)
    for m in range(1, 8):
        fm = E.fraction(m, p)
        assert E.fraction(m + 1, p) is substitute(one, p.alpha, fm)
        assert fm.size == p.alpha.size + m * (one.size - p.alpha.size)
        assert E.fraction_index(fm, p) == m


def test_fraction_five_shape():
    # five nested frames <<alpha, s>...>: peel them back to alpha
    p = E.FractionParams(P("<_,<_,_>>"), (bot_power(3),))
    u = E.fraction(5, p)
    for _ in range(5):
        assert u.right is bot_power(3)
        u = u.left
    assert u is p.alpha


def test_n_class_formula_small():
    p = E.FractionParams(E.ALPHA, (bot_power(3), bot_power(4)))
    f = E.n_class_formula(F.Var("x"), p)
    for t in trees_up_to(8):
        assert eval_decidable(f, {"x": t}) == E.n_class_member(t, p)
    for m in range(1, 5):
        assert eval_decidable(f, {"x": E.fraction(m, p)})


# ------------------------------------------------------------ words

AB = ["a", "b"]


def test_tau_examples():
    eps = E.tau([], AB)
    assert eps is P("<_,<_,_>>")
    assert E.tau(["a", "b"], AB) is node(node(eps, E.letter(1)), E.letter(2))
    assert E.tau(["a", "b"], AB, direction="rl") is node(node(eps, E.letter(2)), E.letter(1))
    with pytest.raises(E.EncodingError):
        E.tau(["c"], AB)
    with pytest.raises(E.EncodingError):
        E.tau([], AB, base=LEAF)


def test_tau_round_trip():
    abc = ["a", "b", "c"]
    for n in range(6):
        for w in itertools.product(abc, repeat=n):
            for d in ("lr", "rl"):
                t = E.tau(w, abc, direction=d)
                assert E.tau_decode(t, abc, direction=d) == w
                assert E.is_word_code(t, 3, E.TAU_EPS)


def test_letters():
    assert E.letter(1) is node(bot_power(4), bot_power(4))
    for i in range(1, 9):
        assert E.letter_index(E.letter(i)) == i
    for i, j in itertools.permutations(range(1, 6), 2):
        assert not subterm(E.letter(i), E.letter(j))


def test_concat_and_tally_examples():
    x, y, z = F.Var("x"), F.Var("y"), F.Var("z")
    eps = E.TAU_EPS
    c = E.concat_formula(x, y, z)
    u = E.tau(["a", "b", "a"], AB)
    assert eval_decidable(c, {"x": eps, "y": u, "z": u})
    assert eval_decidable(c, {"x": E.tau(["a"], AB), "y": E.tau(["b"], AB), "z": E.tau(["a", "b"], AB)})
    assert not eval_decidable(c, {"x": E.tau(["a"], AB), "y": E.tau(["b"], AB), "z": E.tau(["b", "a"], AB)})
    t = E.tally_formula(x, y, 1, 2)
    assert eval_decidable(t, {"x": E.tau(["a", "b"], AB), "y": E.tau(["a", "a"], AB)})
    assert not eval_decidable(t, {"x": E.tau(["a", "b"], AB), "y": E.tau(["a", "b"], AB)})


# ------------------------------------------------------------ multiplication

def test_mult_examples():
    p = E.arith_params(5)
    assert E.build_mult_tree(p, 1) is p.base()
    t53 = E.build_mult_tree(p, 3)
    last = t53.right
    assert E.fraction_index(last.left, p.fa) == 3
    assert E.fraction_index(last.right, p.fb) == 15
    with pytest.raises(E.EncodingError):
        E.build_mult_tree(p, 0)
    with pytest.raises(E.EncodingError):
        E.MultParams(LEAF, p.beta, p.gamma, p.s, p.t)


def _m_holds(t, p):
    # x = <..., <L,R>> pins the inner witnesses, so this decides the formula
    f = E.m_class_formula(F.Var("x"), p)
    if t.left is None or t.right.left is None:
        return False
    return holds(f, x=t, **{k.replace(".", "__"): v for k, v in E.m_class_witness(t).items()})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mult_characterisation(n):
    p = E.arith_params(n)
    rng = random.Random(n)
    for k in range(1, 4):
        t = E.build_mult_tree(p, k)
        assert E.m_class_member(t, p) and _m_holds(t, p)
    tried = 0
    while tried < 70:
        t = E.build_mult_tree(p, rng.randint(1, 3))
        u = mutate(t, rng)
        if E.m_class_member(u, p):
            continue
        tried += 1
        assert not _m_holds(u, p)


def test_mult_with_symbolic_n():
    p = E.arith_params(2)
    f = E.m_class_formula(F.Var("x"), p, n_term=F.Var("n"))
    t = E.build_mult_tree(p, 3)
    nb = E.fraction(2, p.fb)
    assert holds(f, x=t, n=nb, M__L=t.right.left, M__R=t.right.right)
    assert not holds(f, x=t, n=E.fraction(3, p.fb), M__L=t.right.left, M__R=t.right.right)


# ------------------------------------------------------------ P, Gamma, P2

SP = E.SeqParams(("01", "00", "10"))


def test_encode_word_examples():
    sp = E.SeqParams(("110", "0"))
    w = E.encode_word(sp, [1])
    assert w is tup([sp.alpha, sp.mu(1), sp.one, sp.one])
    assert E.encode_word(sp, []) is sp.alpha
    w12 = E.encode_word(sp, [1, 2])
    assert w12 is tup([sp.alpha, sp.mu(2), sp.mu(1), sp.one, sp.one])
    with pytest.raises(E.EncodingError):
        E.SeqParams(("",))


def test_encode_word_concatenates():
    # (uv)/alpha is u/alpha with alpha replaced by v/alpha
    for i, j in itertools.product(range(1, 4), repeat=2):
        assert E.encode_word(SP, [i, j]) is substitute(E.encode_word(SP, [i]), SP.alpha, E.encode_word(SP, [j]))


def test_P_elements():
    t = E.build_P_element(SP, [2, 3, 1])
    assert t is tup([SP.gamma, E.encode_word(SP, [2]), E.encode_word(SP, [2, 3]), E.encode_word(SP, [2, 3, 1])])
    assert E.build_P_element(SP, [2]) is node(SP.gamma, E.encode_word(SP, [2]))
    assert E.p_class_indices(t, SP) == [2, 3, 1]
    with pytest.raises(E.EncodingError):
        E.build_P_element(SP, [])
    with pytest.raises(E.EncodingError):
        E.build_P_element(SP, [4])


def _p_holds(t, sp):
    f = E.p_class_formula(F.Var("x"), sp)
    return t.left is not None and holds(f, x=t, P__S=t.right)


def test_P_class_and_delta_graft():
    for n in range(1, 4):
        for idx in itertools.product(range(1, 4), repeat=n):
            t = E.build_P_element(SP, idx)
            assert _p_holds(t, SP)
            grafted = substitute(t, SP.alpha, SP.delta)
            assert not _p_holds(grafted, SP)


def test_P_class_mutations():
    rng = random.Random(4)
    tried = 0
    while tried < 60:
        idx = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
        u = mutate(E.build_P_element(SP, idx), rng)
        if E.p_class_member(u, SP):
            continue
        tried += 1
        assert not _p_holds(u, SP)


def test_gamma_two_ways():
    for n in range(1, 4):
        for idx in itertools.product(range(1, 4), repeat=n):
            t = E.build_P_element(SP, idx)
            assert E.gamma_op(t, SP) is E.gamma_direct(t, SP)
            assert eval_term(E.gamma_term(F.Var("t"), SP), {"t": t}) is E.gamma_op(t, SP)


def test_theta():
    t = E.build_P_element(SP, [2, 3, 1])
    same = E.theta(t, [SP.zero] * 3, SP)
    for i in range(1, 4):
        assert not subterm(SP.mu(i), same)
    assert E.last_letter_trees(SP.C, SP) == [SP.one, SP.zero, SP.zero]
    d = E.last_letter_trees(SP.C, SP)
    assert eval_term(E.theta_term(F.Var("u"), d, SP), {"u": t}) is E.theta(t, d, SP)


def test_P2_chain_three_codewords():
    t = E.build_P_element(SP, [2, 3, 1])
    chain = E.p2_chain(t, SP)
    assert len(chain) == 7
    assert chain[0] is E.gamma_op(t, SP)
    assert E.mu_word(chain[-1], SP) == [2, 3, 1]
    for a, b in zip(chain, chain[1:]):
        assert b is substitute_many(a, [(node(SP.mu(i), SP.zero), SP.mu(i)) for i in range(1, 4)])
    w = E.build_P2_element(t, SP)
    assert w is tup([SP.alpha] + chain[::-1])
    w2 = E.build_P2_element(t, SP, repeat=2)
    assert w2 is tup([SP.alpha, chain[-1]] + chain[::-1])


def _p2_holds(w, t, sp):
    f = E.p2_class_formula(F.Var("x"), sp)
    env = {"x": w}
    env.update(E.p2_class_witness(w, t, sp))
    return compile_formula(f)(env)


def test_P2_class():
    for idx in ([1], [2, 3, 1], [3, 3], [1, 2]):
        t = E.build_P_element(SP, idx)
        for rep in (1, 2):
            assert _p2_holds(E.build_P2_element(t, SP, rep), t, SP)


def test_P2_corrupted_step_fails():
    t = E.build_P_element(SP, [2, 3, 1])
    chain = E.p2_chain(t, SP)
    f = compile_formula(E.p2_class_formula(F.Var("x"), SP))
    cands = [E.build_P_element(SP, idx) for n in range(1, 4) for idx in itertools.product(range(1, 4), repeat=n)]
    for i in range(1, len(chain) - 1):
        bad = list(chain)
        bad[i] = chain[i + 1]  # skip a step by duplicating its successor
        w = tup([SP.alpha] + bad[::-1])
        # bounded witness search: X over subtrees of w, T over short P-elements
        for X in subtrees(w):
            for T in cands:
                env = {"x": w, "W.X": X, "W.T": T, "W.T.S": T.right}
                assert not f(env)


# ------------------------------------------------------------ polynomials

def test_linpoly_examples():
    z = F.Var("z")
    got = eval_term(E.linpoly_BT(2, z, 1), {"z": E.numeral(MOD, 5)})
    assert got is E.numeral(MOD, 11)
    assert E.linpoly_BT(0, z, 4) == F.const(E.numeral(MOD, 4))
    for n in range(4):
        for m in range(4):
            for q in range(5):
                v = eval_term(E.linpoly_BT(n, z, m), {"z": E.numeral(MOD, q)})
                assert E.numeral_value(MOD, v) == n * q + m


def test_canonical_form():
    w = bot_power(3)
    assert E.canonical_form(7, 3) is node(node(node(w, w), w), bot_power(2))
    assert E.canonical_form(2, 3) is bot_power(3)
    assert E.canonical_form(6, 3) is tup([w, w, w])


def test_plus_k_and_lin_cases():
    x = F.Var("x")
    assert eval_term(E.plus_k(x, 2), {"x": bot_power(3)}) is bot_power(5)
    lin = E.Lin(2, x, 1)
    cases = lin.cases()
    assert len(cases) == 2
    for q in range(4):
        env = {"x": E.numeral(PCP, q)}
        live = [t for g, t in cases if eval_decidable(g, env)]
        assert len(live) == 1
    assert E.Lin(2, E.pnum(3), 1).cases() == [(None, E.pnum(7))]
