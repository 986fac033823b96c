"""Batch command line front end.

Exit codes: 0 true/solved/success, 1 false/no solution, 2 unknown/exhausted,
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import formula as F
from . import problems as P
from . import reductions as RD
from .evaluator import EvaluationError, Verdict, existential_names, search, verify_witness
from .trees import TreeSyntaxError, enumerate_trees, parse_tree, render_tree

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3

REDUCE_KINDS = ("pcp-sigma102", "pcp-subtree", "pcp-exist", "modulo-sigma101", "modulo-sigma102", "h10")
WITNESS_KINDS = REDUCE_KINDS[:-1]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def render_witness(w: dict, order: Sequence[str] = ()) -> str:
    names = [n for n in order if n in w] + sorted(set(w) - set(order))
    return "".join(f"{n} {render_tree(w[n])}\n" for n in names)


def parse_witness(text: str) -> dict:
    out = {}
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, tree = line.partition(" ")
        if not tree:
            raise UsageError(f"witness line {i}: expected 'name tree'")
        if name in out:
            raise UsageError(f"witness line {i}: {name} bound twice")
        try:
            out[name] = parse_tree(tree.strip())
        except TreeSyntaxError as e:
            raise UsageError(f"witness line {i}: {e}") from None
    return out


def _instance(kind: str, text: str):
    return P.PCPInstance.parse(text) if kind.startswith("pcp") else P.ModuloInstance.parse(text)


def compile_instance(kind: str, text: str) -> list:
    if kind == "h10":
        return RD.h10_normalize(F.parse_sentence(text))
    inst = _instance(kind, text)
    fn = {
        "pcp-sigma102": RD.pcp_to_sigma102,
        "pcp-subtree": RD.pcp_to_sigma_subtree,
        "pcp-exist": RD.pcp_to_existential,
        "modulo-sigma101": RD.modulo_to_sigma101,
        "modulo-sigma102": RD.modulo_to_sigma102_LT,
    }[kind]
    return [fn(inst)]


def _parse_ints(s: str) -> list:
    try:
        return [int(x) for x in s.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {s!r}") from None


def build_witness(kind: str, text: str, solution: str) -> dict:
    inst = _instance(kind, text)
    nums = _parse_ints(solution)
    if kind.startswith("pcp"):
        fn = {"pcp-sigma102": P.witness_sigma102, "pcp-subtree": P.witness_subtree,
              "pcp-exist": P.witness_existential}[kind]
        return fn(inst, nums)
    traj = P.modulo_trajectory(inst, nums[0]) if len(nums) == 1 else nums
    if kind == "modulo-sigma101":
        return P.witness_modulo101(inst, traj)
    return P.witness_modulo102(inst, traj)


def _cmd_reduce(a) -> int:
    out = compile_instance(a.kind, _read(a.inp))
    _write(a.out, "\n".join(s.render() for s in out))
    return EXIT_OK


def _cmd_check(a) -> int:
    if a.budget < 1:
        raise UsageError("--budget must be >= 1")
    s = F.parse_sentence(_read(a.formula))
    res = search(s.formula, a.budget)
    text = f"{res.verdict}\n"
    if res.witness:
        text += render_witness(res.witness, existential_names(s.formula))
    sys.stdout.write(text)
    return {Verdict.TRUE: EXIT_OK, Verdict.FALSE: EXIT_FALSE, Verdict.UNKNOWN: EXIT_UNKNOWN}[res.verdict]


def _cmd_solve(a) -> int:
    if a.max < 0 or (a.kind == "pcp" and a.max < 1):
        raise UsageError("--max out of range")
    text = _read(a.inp)
    if a.kind == "pcp":
        sol = P.pcp_solve(P.PCPInstance.parse(text), a.max)
        if sol is None:
            sys.stdout.write("no solution\n")
            return EXIT_FALSE
        sys.stdout.write("solution=" + ",".join(map(str, sol)) + "\n")
        return EXIT_OK
    n = P.modulo_iterate(P.ModuloInstance.parse(text), 3, a.max)
    if n is None:
        sys.stdout.write("no solution\n")
        return EXIT_FALSE
    sys.stdout.write(f"N={n}\n")
    return EXIT_OK


def _cmd_witness(a) -> int:
    w = build_witness(a.kind, _read(a.inp), a.solution)
    order = []
    if a.kind != "h10":
        order = existential_names(compile_instance(a.kind, _read(a.inp))[0].formula)
    _write(a.out, render_witness(w, order))
    return EXIT_OK


def _cmd_verify(a) -> int:
    s = F.parse_sentence(_read(a.formula))
    ok = verify_witness(s.formula, parse_witness(_read(a.witness)))
    sys.stdout.write(f"{'true' if ok else 'false'}\n")
    return EXIT_OK if ok else EXIT_FALSE


def _cmd_enumerate(a) -> int:
    if a.size < 1:
        raise UsageError("--size must be >= 1")
    sys.stdout.write("".join(render_tree(t) + "\n" for t in enumerate_trees(a.size)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treesub", description="Reductions into the theory of finite binary trees.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="compile an instance into a sentence")
    r.add_argument("--kind", required=True, choices=REDUCE_KINDS)
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out")
    r.set_defaults(fn=_cmd_reduce)

    c = sub.add_parser("check", help="budgeted truth search")
    c.add_argument("--formula", required=True)
    c.add_argument("--budget", required=True, type=int)
    c.set_defaults(fn=_cmd_check)

    s = sub.add_parser("solve", help="bounded solver for a source problem")
    s.add_argument("--kind", required=True, choices=("pcp", "modulo"))
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--max", required=True, type=int)
    s.set_defaults(fn=_cmd_solve)

    w = sub.add_parser("witness", help="build a witness assignment from a solution")
    w.add_argument("--kind", required=True, choices=WITNESS_KINDS)
    w.add_argument("--in", dest="inp", required=True)
    w.add_argument("--solution", required=True,
                   help="PCP index list like 2,1,1,3; modulo step count N or a trajectory")
    w.add_argument("--out")
    w.set_defaults(fn=_cmd_witness)

    v = sub.add_parser("verify", help="check a witness file against a sentence")
    v.add_argument("--formula", required=True)
    v.add_argument("--witness", required=True)
    v.set_defaults(fn=_cmd_verify)

    e = sub.add_parser("enumerate", help="list all trees with N leaves")
    e.add_argument("--size", required=True, type=int)
    e.set_defaults(fn=_cmd_enumerate)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
    except (F.FormulaError, TreeSyntaxError, P.ProblemError, RD.ReductionError, EvaluationError) as e:
        print(f"error: {e}", file=sys.stderr)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())
