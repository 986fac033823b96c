"""Compare the compiled tree kernel with the pure-Python fallback.

Micro benchmarks drive each kernel module directly.  The end-to-end rows run
a workload in a child process with and without ``TREESUB_PURE=1`` so the
whole stack (evaluator included) sits on the chosen kernel.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

from treesub import _pytree

try:
    from treesub import _ctree
except ImportError:
    _ctree = None


def all_trees(k, n):
    """Every tree with at most ``n`` leaves, built with kernel ``k``."""
    by_size = {1: [k.LEAF]}
    for m in range(2, n + 1):
        by_size[m] = [k.node(l, r) for i in range(1, m) for l in by_size[i] for r in by_size[m - i]]
    return [t for m in range(1, n + 1) for t in by_size[m]]


def chain(k, n):
    t = k.LEAF
    for _ in range(n - 1):
        t = k.node(t, k.LEAF)
    return t


def micro(k):
    ts = all_trees(k, 6)
    big = all_trees(k, 9)[-400:]
    deep = chain(k, 3000)
    two = k.node(k.LEAF, k.LEAF)

    def build():
        all_trees(k, 10)

    def subterm_pairs():
        sub = k.subterm
        for s in ts:
            for t in ts:
                sub(s, t)

    def substitute_pairs():
        subst = k.substitute
        for t in big:
            for r in ts[:20]:
                subst(t, r, two)

    def deep_chain():
        k.substitute(deep, two, deep)
        k.subterm(chain(k, 1500), deep)

    def subtree_sets():
        for t in big:
            t._set = None
            k.subtree_set(t)

    return {
        "node() over trees <= 10 leaves": build,
        "subterm, 65x65 pairs": subterm_pairs,
        "substitute, 400x20": substitute_pairs,
        "deep chain (3000)": deep_chain,
        "subtree sets, 400 trees": subtree_sets,
    }


E2E = {
    "N-class sweep, trees <= 11 leaves": (
        "from treesub import encodings as E, formula as F\n"
        "from treesub.evaluator import compile_formula\n"
        "from treesub.trees import trees_up_to, bot_power, LEAF\n"
        "p = E.FractionParams(bot_power(2), (LEAF,))\n"
        "f = compile_formula(E.n_class_formula(F.Var('x'), p))\n"
        "assert all(f({'x': t}) == E.n_class_member(t, p) for t in trees_up_to(11))\n"
    ),
    "existential PCP, classic instance": (
        "from treesub import problems as P, reductions as RD\n"
        "from treesub.evaluator import verify_witness\n"
        "i = P.PCPInstance((('1','111'),('10111','10'),('10','0')))\n"
        "assert verify_witness(RD.pcp_to_existential(i).formula, P.witness_existential(i, [2,1,1,3]))\n"
    ),
}


def run_e2e(code, pure, repeat):
    env = dict(os.environ)
    env.pop("TREESUB_PURE", None)
    if pure:
        env["TREESUB_PURE"] = "1"
    timer = (
        "import time\nt0 = time.perf_counter()\n"
        f"exec(compile({code!r}, 'bench', 'exec'))\n"
        "print(time.perf_counter() - t0)\n"
    )
    best = float("inf")
    for _ in range(repeat):
        out = subprocess.run([sys.executable, "-c", timer], env=env, capture_output=True, text=True, check=True)
        best = min(best, float(out.stdout.strip().splitlines()[-1]))
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    a = ap.parse_args(argv)
    if _ctree is None:
        print("compiled kernel not built; install with 'pip install -e . --no-build-isolation'", file=sys.stderr)
        return 1
    rows = []
    py, cy = micro(_pytree), micro(_ctree)
    for name in py:
        tp = min(timeit.repeat(py[name], number=1, repeat=a.repeat))
        tc = min(timeit.repeat(cy[name], number=1, repeat=a.repeat))
        rows.append((name, tp, tc))
    for name, code in E2E.items():
        rows.append((name, run_e2e(code, True, a.repeat), run_e2e(code, False, a.repeat)))
    if a.json:
        print(json.dumps([{"bench": n, "python_s": p, "cython_s": c, "speedup": p / c} for n, p, c in rows], indent=2))
        return 0
    w = max(len(n) for n, _, _ in rows)
    print(f"{'benchmark':<{w}}  {'python':>9}  {'cython':>9}  speedup")
    for n, p, c in rows:
        print(f"{n:<{w}}  {p * 1e3:7.1f}ms  {c * 1e3:7.1f}ms  {p / c:6.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
