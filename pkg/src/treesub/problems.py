"""Source problems, small solvers used as oracles, and witness builders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


class ProblemError(ValueError):
    pass


def _content_lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


# ------------------------------------------------------------------ PCP

@dataclass(frozen=True)
class PCPInstance:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ProblemError("a PCP instance needs at least one pair")
        for a, b in pairs:
            for w in (a, b):
                if not w:
                    raise ProblemError("PCP strings must be nonempty")
                if set(w) - {"0", "1"}:
                    raise ProblemError(f"PCP strings are binary, got {w!r}")

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def tops(self) -> list:
        return [a for a, _ in self.pairs]

    @property
    def bottoms(self) -> list:
        return [b for _, b in self.pairs]

    def words(self, solution: Sequence[int]) -> tuple:
        self._check_indices(solution)
        return (
            "".join(self.pairs[i - 1][0] for i in solution),
            "".join(self.pairs[i - 1][1] for i in solution),
        )

    def is_solution(self, solution: Sequence[int]) -> bool:
        if not solution:
            return False
        a, b = self.words(solution)
        return a == b

    def _check_indices(self, solution):
        for i in solution:
            if not isinstance(i, int) or not 1 <= i <= self.n:
                raise ProblemError(f"index {i!r} out of range 1..{self.n}")

    def require_solution(self, solution: Sequence[int]) -> list:
        sol = list(solution)
        if not self.is_solution(sol):
            raise ProblemError(f"{sol} is not a solution of this instance")
        return sol

    @classmethod
    def parse(cls, text: str) -> "PCPInstance":
        pairs = []
        for line in _content_lines(text):
            parts = line.split()
            if len(parts) != 2:
                raise ProblemError(f"expected 'a b' per line, got {line!r}")
            pairs.append(tuple(parts))
        return cls(tuple(pairs))

    def render(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in self.pairs)


def pcp_solve(inst: PCPInstance, max_len: int) -> Optional[list]:
    """Shortest, then lexicographically least, solution of length <= max_len.

    Breadth-first by length; partial sequences whose two sides already
    disagree are pruned since no extension can repair them."""
    if max_len < 1:
        raise ProblemError("max_len must be >= 1")
    frontier = [((), "", "")]
    for _ in range(max_len):
        nxt = []
        for seq, a, b in frontier:
            for i, (x, y) in enumerate(inst.pairs, 1):
                a2, b2 = a + x, b + y
                k = min(len(a2), len(b2))
                if a2[:k] != b2[:k]:
                    continue
                s2 = seq + (i,)
                if a2 == b2:
                    return list(s2)
                nxt.append((s2, a2, b2))
        frontier = nxt
        if not frontier:
            break
    return None


# ---------------------------------------------------------- modulo problem

@dataclass(frozen=True)
class ModuloInstance:
    M: int
    rules: tuple

    def __post_init__(self):
        rules = tuple((int(a), int(b)) for a, b in self.rules)
        object.__setattr__(self, "rules", rules)
        if self.M <= 1:
            raise ProblemError("M must be > 1")
        if len(rules) != self.M:
            raise ProblemError(f"expected {self.M} rules, got {len(rules)}")
        if any(a < 0 or b < 0 for a, b in rules):
            raise ProblemError("rule coefficients are natural numbers")

    @classmethod
    def parse(cls, text: str) -> "ModuloInstance":
        lines = list(_content_lines(text))
        if not lines:
            raise ProblemError("empty modulo instance")
        try:
            M = int(lines[0])
            rules = []
            for line in lines[1:]:
                a, b = line.split()
                rules.append((int(a), int(b)))
        except ValueError:
            raise ProblemError("malformed modulo instance") from None
        return cls(M, tuple(rules))

    def render(self) -> str:
        return f"{self.M}\n" + "".join(f"{a} {b}\n" for a, b in self.rules)


def modulo_step(inst: ModuloInstance, x: int) -> int:
    z, j = divmod(x, inst.M)
    a, b = inst.rules[j]
    return a * z + b


def modulo_iterate(inst: ModuloInstance, x0: int = 3, max_n: int = 1000) -> Optional[int]:
    """Least ``N <= max_n`` with ``f^N(x0) = 2``."""
    if max_n < 0:
        raise ProblemError("max_n must be >= 0")
    x = x0
    for n in range(max_n + 1):
        if x == 2:
            return n
        x = modulo_step(inst, x)
    return None


def modulo_trajectory(inst: ModuloInstance, n: int, x0: int = 3) -> list:
    out = [x0]
    for _ in range(n):
        out.append(modulo_step(inst, out[-1]))
    return out


def _check_trajectory(inst: ModuloInstance, traj: Sequence[int]) -> list:
    traj = list(traj)
    if not traj or traj[0] != 3 or traj[-1] != 2:
        raise ProblemError("trajectory must start at 3 and end at 2")
    for x, y in zip(traj, traj[1:]):
        if modulo_step(inst, x) != y:
            raise ProblemError(f"trajectory step {x} -> {y} does not follow f")
    return traj


# ------------------------------------------------------------ witnesses
# Builders import the encoders lazily: the compilers import this module.

def witness_sigma102(inst: PCPInstance, solution: Sequence[int]) -> dict:
    from .encodings import ALPHA, encode_set
    from .reductions import _word_tree
    from .trees import node

    sol = inst.require_solution(solution)
    members = []
    for j in range(1, len(sol) + 1):
        a, b = inst.words(sol[:j])
        members.append(node(_word_tree(a), _word_tree(b)))
    return {"T": encode_set(members, ALPHA)}


def witness_modulo101(inst: ModuloInstance, trajectory: Sequence[int]) -> dict:
    from .encodings import ALPHA, NumeralScheme, encode_set, numeral

    traj = _check_trajectory(inst, trajectory)
    return {"T": encode_set([numeral(NumeralScheme.MOD, x) for x in traj], ALPHA)}


def _match(pat, t, env: dict) -> bool:
    """Bind the variables of an LT term so that it evaluates to ``t``."""
    from . import formula as F
    from .trees import LEAF

    if isinstance(pat, F.Var):
        got = env.get(pat.name)
        if got is None:
            env[pat.name] = t
            return True
        return got is t
    if isinstance(pat, F.Bot):
        return t is LEAF
    if isinstance(pat, F.PairT):
        return t.left is not None and _match(pat.l, t.left, env) and _match(pat.r, t.right, env)
    raise ProblemError("substitution terms cannot be matched")


def _member_patterns(ante, alpha) -> list:
    """Terms ``t`` with a literal ``<t, alpha> sub T`` somewhere in ``ante``."""
    from . import formula as F

    out = []
    for g in F.walk(ante):
        if isinstance(g, F.Sub) and isinstance(g.s, F.PairT) and isinstance(g.t, F.Var):
            try:
                if F.term_tree(g.s.r) is alpha:
                    out.append(g.s.l)
            except F.FormulaError:
                pass
    return out


def witness_modulo102(inst: ModuloInstance, trajectory: Sequence[int],
                      max_elements: int = 20000) -> dict:
    """Forward closure of the seed set under every implication conjunct.

    Every antecedent disjunct asserts membership of some term in ``R``, ``S``;
    candidate bindings come from matching those terms against the current
    members and are then confirmed by evaluating the full antecedent."""
    from . import formula as F
    from .encodings import ALPHA, NumeralScheme, canonical_form, encode_set, numeral
    from .evaluator import compile_formula, compile_term
    from .reductions import modulo102_clauses
    from .trees import subterm, subtrees

    traj = _check_trajectory(inst, trajectory)
    members = {numeral(NumeralScheme.PCP, 3)}
    members |= {canonical_form(x, inst.M) for x in traj}
    compiled = []
    for c in modulo102_clauses(inst):
        used = F.free_vars(c.ante) | {v for _, t in c.cases for v in F.term_vars(t)}
        used |= {v for g, _ in c.cases if g is not None for v in F.free_vars(g)}
        cases = [(None if g is None else compile_formula(g), compile_term(t)) for g, t in c.cases]
        pats = _member_patterns(c.ante, ALPHA)
        if not pats:
            raise ProblemError(f"conjunct {c.tag} has no membership antecedent")
        compiled.append((c.tag, compile_formula(c.ante), cases, pats, used & {"R", "S"}))
    while True:
        T = encode_set(members, ALPHA)
        subs = None
        added = set()
        for tag, ante, cases, pats, used in compiled:
            binds = set()
            for pat in pats:
                for m in members:
                    env: dict = {}
                    if _match(pat, m, env):
                        binds.add((env.get("R"), env.get("S")))
            for r0, s0 in binds:
                if (r0 is None and "R" in used) or (s0 is None and "S" in used):
                    subs = subs or subtrees(T)
                rs = [r0] if r0 is not None else (subs if "R" in used else [T])
                ss = [s0] if s0 is not None else (subs if "S" in used else [T])
                for r in rs:
                    for s in ss:
                        env = {"T": T, "R": r, "S": s}
                        if not ante(env):
                            continue
                        for guard, term in cases:
                            if guard is None or guard(env):
                                t = term(env)
                                if t not in members:
                                    if subterm(ALPHA, t):
                                        raise ProblemError(f"conjunct {tag} demands a tree containing alpha")
                                    added.add(t)
                                break
        if not added:
            return {"T": T}
        members |= added
        if len(members) > max_elements:
            raise ProblemError(f"closure exceeded {max_elements} elements")


SUBTREE_DELTA_SIZE = 4


def subtree_parameters() -> dict:
    from .encodings import letter
    from .trees import bot_power

    return {"alpha": letter(3), "beta": letter(4), "gamma": letter(5),
            "delta": bot_power(SUBTREE_DELTA_SIZE)}


def zero_realization(x):
    from .trees import node, subtrees

    u, v = subtrees(x)[:2]
    return node(node(x, u), node(x, v))


def one_realization(x):
    from .trees import node, subtrees

    u, v, w = subtrees(x)[:3]
    return node(node(node(x, u), node(x, v)), node(node(x, u), node(x, w)))


def conc_realization(w: str, x):
    for c in w:
        x = zero_realization(x) if c == "0" else one_realization(x)
    return x


def pair_realization(x, y, beta, gamma):
    from .trees import node

    return node(node(zero_realization(x), beta), node(zero_realization(y), gamma))


def witness_subtree(inst: PCPInstance, solution: Sequence[int]) -> dict:
    from .encodings import encode_set

    sol = inst.require_solution(solution)
    p = subtree_parameters()
    A = B = p["delta"]
    members = []
    for i in sol:
        a, b = inst.pairs[i - 1]
        A, B = conc_realization(a, A), conc_realization(b, B)
        members.append(pair_realization(A, B, p["beta"], p["gamma"]))
    return {**p, "T": encode_set(members, p["alpha"])}


def witness_existential(inst: PCPInstance, solution: Sequence[int]) -> dict:
    from .encodings import build_P2_element, build_P_element, p2_class_witness, p_class_witness
    from .reductions import exist_params

    sol = inst.require_solution(solution)
    out: dict = {}
    for sp, P, U, Up, W, X, S in zip(
        exist_params(inst),
        ("L", "R"), ("U", "V"), ("U_prime", "V_prime"),
        ("W_L", "W_R"), ("X_L", "X_R"), ("S_L", "S_R"),
    ):
        t = build_P_element(sp, sol)
        w = build_P2_element(t, sp)
        inner = p2_class_witness(w, t, sp, prefix=W)
        out.update({P: t, U: t.right, Up: t.left, W: w, X: inner[f"{W}.X"], S: w.left})
        out.update(p_class_witness(t, prefix=P))
        out.update(inner)
    return out


def witness_diophantine(d, values: dict) -> dict:
    """Assignment for the compiled arithmetic sentence from natural-number values."""
    from .encodings import arith_params, build_mult_tree, fraction
    from .reductions import arith_numeral
    from .trees import LEAF

    if not d.holds(values):
        raise ProblemError("values do not satisfy the arithmetic sentence")
    out = {v: arith_numeral(values[v]) for v in d.variables}
    for i, at in enumerate(d.atoms, 1):
        if at.kind != "times":
            continue
        pre = f"times{i}"
        x, y, _ = (values[a] for a in at.args)
        names = [f"{pre}.n", f"{pre}.v", f"{pre}.w", f"{pre}.w.L", f"{pre}.w.R"]
        if x == 0 or y == 0:
            out.update(dict.fromkeys(names, LEAF))
            continue
        p = arith_params(x)
        w = build_mult_tree(p, y)
        vals = [fraction(x, p.fb), w.left, w, w.right.left, w.right.right]
        out.update(zip(names, vals))
    return out
