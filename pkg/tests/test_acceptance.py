"""Acceptance criteria; each prints one PASS/FAIL line with its timing.

Run under pytest (lines go straight to the terminal) or as a script.
"""

import itertools
import random
import time

import pytest

from gen import matrix
from mutate import mutate
from treesub import encodings as E
from treesub import formula as F
from treesub import problems as P
from treesub import reductions as RD
from treesub.evaluator import Verdict, check, compile_formula, eval_decidable, verify_witness
from treesub.trees import LEAF, bot_power, node, substitute, subterm, trees_up_to

COLLATZ = P.ModuloInstance(2, ((1, 0), (6, 4)))
CLASSIC = P.PCPInstance((("1", "111"), ("10111", "10"), ("10", "0")))
UNIT = P.PCPInstance((("0", "0"),))
UNSOLVABLE = P.PCPInstance((("0", "00"),))


def definable_subterm():
    ts = trees_up_to(6)
    assert len(ts) == 65
    bad = sum(subterm(x, y) != (substitute(y, x, node(x, x)) is not y) for x in ts for y in ts)
    return bad == 0, f"{len(ts) ** 2} pairs, {bad} discrepancies", 1


def modulo_pipeline():
    n = P.modulo_iterate(COLLATZ, 3, 100)
    traj = P.modulo_trajectory(COLLATZ, n)
    s = RD.modulo_to_sigma101(COLLATZ)
    ok = verify_witness(s.formula, P.witness_modulo101(COLLATZ, traj))
    mutated = E.encode_set([E.numeral(E.NumeralScheme.MOD, x) for x in traj if x != 4])
    rejected = not verify_witness(s.formula, {"T": mutated})
    good = n == 6 and ok and rejected and s.profile == F.SigmaProfile(1, 0, 1)
    return good, f"N={n}, witness {ok}, without 4 rejected {rejected}", 5


def pcp_sigma102_pipeline():
    sol = P.pcp_solve(CLASSIC, 4)
    s = RD.pcp_to_sigma102(CLASSIC)
    ok = sol == [2, 1, 1, 3] and verify_witness(s.formula, P.witness_sigma102(CLASSIC, sol))
    v = check(RD.pcp_to_sigma102(UNSOLVABLE).formula, 8)
    none = P.pcp_solve(UNSOLVABLE, 10)
    good = ok and v is Verdict.UNKNOWN and none is None
    return good, f"solution {sol}, witness {ok}, unsolvable: {v} at budget 8, solver {none}", 30


def _n_class_sweep(p, max_leaves):
    f = compile_formula(E.n_class_formula(F.Var("x"), p))
    bad = 0
    count = 0
    for t in trees_up_to(max_leaves):
        count += 1
        bad += f({"x": t}) != E.n_class_member(t, p)
    return count, bad


def n_class_characterisation():
    c1, b1 = _n_class_sweep(E.FractionParams(bot_power(2), (LEAF,)), 12)
    c2, b2 = _n_class_sweep(E.FractionParams(E.ALPHA, (bot_power(3), bot_power(4))), 12)
    return b1 == b2 == 0, f"{c1} trees x 2 parameter sets, {b1 + b2} discrepancies", 60


def multiplication():
    d = RD.parse_diophantine("exists x, y, z : x * y = z")
    s = RD.diophantine_to_existential(d)
    cases = [(x, y) for x in range(1, 5) for y in range(1, 5)] + [(5, 3)]
    ok = all(verify_witness(s.formula, P.witness_diophantine(d, {"x": x, "y": y, "z": x * y}))
             for x, y in cases)
    t53 = P.witness_diophantine(d, {"x": 5, "y": 3, "z": 15})
    wrong = not verify_witness(s.formula, dict(t53, z=RD.arith_numeral(14)))
    rng = random.Random(2024)
    p = E.arith_params(2)
    check_m = compile_formula(E.m_class_formula(F.Var("x"), p))
    tried = failed = 0
    while tried < 100:
        u = mutate(E.build_mult_tree(p, rng.randint(1, 3)), rng)
        if E.m_class_member(u, p):
            continue
        tried += 1
        # x = <..., <L, R>> pins the inner witnesses, so one evaluation decides
        if u.left is None or u.right.left is None:
            failed += 1
        elif not check_m({"x": u, **E.m_class_witness(u)}):
            failed += 1
    good = ok and wrong and failed == 100
    return good, f"{len(cases)} products verify {ok}, 5x3=14 rejected {wrong}, {failed}/100 mutants fail", 60


def existential_pipeline():
    s1 = RD.pcp_to_existential(UNIT)
    ok1 = verify_witness(s1.formula, P.witness_existential(UNIT, [1]))
    s2 = RD.pcp_to_existential(CLASSIC)
    ok2 = verify_witness(s2.formula, P.witness_existential(CLASSIC, [2, 1, 1, 3]))
    pure = all(F.classify(s.formula).is_existential for s in (s1, s2))
    return ok1 and ok2 and pure, f"{{(0,0)}} {ok1}, classic {ok2}, existential {pure}", 300


def h10_normalization():
    rng = random.Random(10)
    ts = trees_up_to(3)
    bad = 0
    for _ in range(300):
        m = matrix(rng, 2)
        eqs = RD.h10_normalize_matrix(m)
        for a, b in itertools.product(ts, repeat=2):
            env = {"x": a, "y": b}
            bad += eval_decidable(m, env) != any(eval_decidable(e, env) for e in eqs)
    two = RD.h10_normalize_matrix(F.Neq(F.BOT, F.PairT(F.BOT, F.BOT)))
    second = [eval_decidable(e, {}) for e in two] == [False, True]
    return bad == 0 and second, f"300 matrices, {bad} discrepancies, disequality via second disjunct {second}", 30


def semigroup_codec():
    ab = ["a", "b"]
    letters = [E.letter(1), E.letter(2)]
    codes = set()
    for n in range(3):
        for w in itertools.product(ab, repeat=n):
            t = E.tau(w, ab)
            if t.size <= 12:
                codes.add(t)
    dom = compile_formula(E.tau_domain_formula(F.Var("x"), letters))
    bad = sum(dom({"x": t}) != (t in codes) for t in trees_up_to(12))
    words = [w for n in range(5) for w in itertools.product(ab, repeat=n)]
    conc = compile_formula(E.concat_formula(F.Var("x"), F.Var("y"), F.Var("z")))
    tally = compile_formula(E.tally_formula(F.Var("x"), F.Var("y"), 1, 2))
    for u, v in itertools.product(words, repeat=2):
        env = {"x": E.tau(u, ab), "y": E.tau(v, ab), "z": E.tau(u + v, ab)}
        bad += not conc(env)
        if u + v != v + u:
            bad += conc({**env, "z": E.tau(v + u, ab)})
    for u in words:
        bad += not tally({"x": E.tau(u, ab), "y": E.tau(("a",) * len(u), ab)})
        if "b" in u:
            bad += tally({"x": E.tau(u, ab), "y": E.tau(u, ab)})
    return bad == 0, f"domain over trees <= 12 leaves, concat/tally over {len(words)} words, {bad} discrepancies", 60


def subtree_reduction():
    s = RD.pcp_to_sigma_subtree(UNIT)
    ok = verify_witness(s.formula, P.witness_subtree(UNIT, [1]))
    prm = P.subtree_parameters()
    x, y = bot_power(4), bot_power(5)
    blocks = []
    for name, f, real in (("zero", RD.zero_formula, P.zero_realization), ("one", RD.one_formula, P.one_realization)):
        yy = real(x)
        blocks.append(eval_decidable(f("x", "y"), {"x": x, "y": yy}))
        blocks.append(not eval_decidable(f("x", "y"), {"x": yy, "y": x}))
    z = P.pair_realization(x, y, prm["beta"], prm["gamma"])
    env = {"b": prm["beta"], "g": prm["gamma"], "x": x, "y": y, "z": z}
    blocks.append(eval_decidable(RD.pair_formula("b", "g", "x", "y", "z"), env))
    blocks.append(not eval_decidable(RD.pair_formula("b", "g", "y", "x", "z"), env))
    good = ok and all(blocks)
    return good, f"{{(0,0)}} witness {ok}, blocks {sum(blocks)}/{len(blocks)}", 60


CRITERIA = [
    (1, "definable subterm", definable_subterm),
    (2, "modulo pipeline", modulo_pipeline),
    (3, "PCP sigma(1,0,2) pipeline", pcp_sigma102_pipeline),
    (4, "N-class characterisation", n_class_characterisation),
    (5, "multiplication", multiplication),
    (6, "existential PCP pipeline", existential_pipeline),
    (7, "H10 normalization", h10_normalization),
    (8, "free-semigroup codec", semigroup_codec),
    (9, "subtree-only reduction", subtree_reduction),
]


def run_criterion(fn):
    t0 = time.perf_counter()
    try:
        ok, detail, limit = fn()
    except Exception as e:  # report, then fail
        ok, detail, limit = False, f"{type(e).__name__}: {e}", None
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        ok, detail = False, f"{detail}; took {dt:.1f}s over the {limit}s limit"
    return ok, detail, dt


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    ok, detail, dt = run_criterion(fn)
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {num} ({name}): {detail} [{dt:.2f}s]")
    assert ok, detail


if __name__ == "__main__":
    for num, name, fn in CRITERIA:
        ok, detail, dt = run_criterion(fn)
        print(f"{'PASS' if ok else 'FAIL'} criterion {num} ({name}): {detail} [{dt:.2f}s]")
