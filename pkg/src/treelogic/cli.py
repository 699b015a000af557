"""Command-line entry point: check, prove, bisim and explore.

Exit codes: 0 holds / certificate / equivalent, 1 fails / premise failed /
distinguished, 2 unknown, 3 usage or parse error, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import scenarios, stimp
from .kripke import TauBudgetExceeded
from .logic.check import check_bounded, check_finite
from .logic.formula import AG, AU, to_text
from .logic.graph import Limits, StateBudgetExceeded, explore, to_dot
from .logic.syntax import (FormulaSyntaxError, MissingField, eval_expr, parse_formula,
                           parse_predicate, parse_term)
from .rules import DomainIncomplete, PremiseFailed
from .scenarios.base import BadParams, UnknownRule
from .tree import (ZeroArity, bisim_upto_tau, branch, br, Cont, Equivalent, Distinguished, ret,
                   stuck, tau, vis)

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ------------------------------------------------------------- targets

def read_config(path):
    """``key = value`` lines; ``#`` starts a comment; repeated keys accumulate for const."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in ("const", "store"):
            out.setdefault(key, []).append(value)
        else:
            out[key] = value
    return out


def _merge_config(args):
    if not getattr(args, "config", None):
        return
    try:
        conf = read_config(args.config)
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from None
    for key, value in conf.items():
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        current = getattr(args, key)
        if isinstance(value, list):
            setattr(args, key, value + (current or []))
        elif current is None:
            setattr(args, key, value)


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _assignments(items):
    out = {}
    for item in items or []:
        for part in filter(None, (p.strip() for p in item.split(","))):
            name, _, value = part.partition("=")
            if not _ or not name.strip():
                raise UsageError(f"expected name=value, got {part!r}")
            try:
                out[name.strip()] = int(value)
            except ValueError:
                raise UsageError(f"value of {name.strip()} must be an integer") from None
    return out


class Target:
    """A scenario bundle or a StImp program with its start store."""

    def __init__(self, name, tree, world, vocab, goal=None, bundle=None, program=None,
                 store=None, constants=None):
        self.name = name
        self.tree = tree
        self.world = world
        self.vocab = vocab
        self.goal = goal
        self.bundle = bundle
        self.program = program
        self.store = store
        self.constants = constants or {}


def load_target(args):
    _merge_config(args)
    constants = _assignments(args.const)
    if args.target_name.endswith(".imp") or Path(args.target_name).is_file():
        try:
            source = Path(args.target_name).read_text()
        except OSError as e:
            raise UsageError(f"cannot read program: {e}") from None
        program = stimp.parse_stimp(source)
        store = stimp.as_store(_assignments(args.store))
        return Target(args.target_name, stimp.run_tree(program, store), stimp.start_world(store),
                      stimp.vocabulary(constants), program=program, store=store,
                      constants=constants)
    params = {}
    if args.q is not None:
        params["q"] = _int_list(args.q)
    for key in ("target", "n", "bound", "x"):
        value = getattr(args, key)
        if value is not None:
            try:
                params[key] = int(value)
            except ValueError:
                raise UsageError(f"--{key} must be an integer") from None
    if args.heap is not None:
        params["heap"] = args.heap
    b = scenarios.build(args.target_name, **params)
    return Target(b.scenario, b.tree, b.world, b.vocab, b.goal, bundle=b)


def _formula(args, target, sort=None):
    sort = sort or args.sort
    if args.formula is None:
        if target.goal is None:
            raise UsageError("--formula is required for programs")
        return target.goal
    vocab = target.vocab
    if constants := _assignments(args.const):
        vocab = type(vocab)(vocab.observe, {**vocab.constants, **constants}, vocab.value_fields)
    return parse_formula(args.formula, sort, vocab)


def _limits(args):
    return Limits(max_states=args.max_states, tau_budget=args.tau_budget)


def _write_json(path, payload):
    if path:
        text = json.dumps(payload, indent=2, default=repr)
        if path == "-":
            print(text)
        else:
            Path(path).write_text(text + "\n")


# ------------------------------------------------------------ commands

def cmd_check(args):
    target = load_target(args)
    f = _formula(args, target)
    if args.backend == "bounded":
        v = check_bounded(target.tree, target.world, f, args.depth, args.tau_budget)
        truth = None
        g = None
    else:
        g = explore(target.tree, target.world, limits=_limits(args))
        res = check_finite(g, f)
        v, truth = res.verdict, res.truth
    print(f"{target.name}: {to_text(f)}: {v.status}")
    if v.trace and not v.holds:
        for step in v.trace:
            print(f"  {step.world!r}")
        if v.lasso_index is not None:
            print(f"  (loops back to step {v.lasso_index})")
    if args.dot and g is not None:
        Path(args.dot).write_text(to_dot(g, truth))
    payload = v.to_json()
    payload["target"] = target.name
    if g is not None:
        payload["states"] = len(g.states)
    _write_json(args.json, payload)
    return {"holds": EXIT_OK, "fails": EXIT_FAIL}.get(v.status, EXIT_UNKNOWN)


def _store_env(target, m):
    env = dict(target.constants)
    env.update(m)
    return env


def _store_pred(target, text):
    e = parse_predicate(text)

    def R(m):
        try:
            return bool(eval_expr(e, _store_env(target, m)))
        except MissingField:
            return False
    return R


def _store_rank(target, text):
    e = parse_term(text)

    def f(m):
        try:
            return max(0, eval_expr(e, _store_env(target, m)))
        except MissingField as err:
            raise UsageError(f"ranking mentions unknown name {err.args[0]!r}") from None
    return f


def _prove_program(args, target):
    """Peel leading sequence steps, then apply the named loop rule."""
    if args.rule not in ("while-au-l", "while-ag"):
        raise UnknownRule(f"programs support --rule while-au-l or while-ag, not {args.rule!r}")
    if args.invariant is None:
        raise UsageError("programs need --invariant (and --ranking for while-au-l)")
    R = _store_pred(target, args.invariant)
    limits = _limits(args)
    if args.rule == "while-au-l":
        if args.ranking is None:
            raise UsageError("while-au-l needs --ranking")
        f = _store_rank(target, args.ranking)
        goal = _formula(args, target)
        if not isinstance(goal, AU):
            raise UsageError("while-au-l needs an AU/AF goal")
    else:
        goal = _formula(args, target)
        if not isinstance(goal, AG):
            raise UsageError("while-ag needs an AG goal")

    def prove(s, m, w, oracle):
        if isinstance(s, stimp.Seq) and args.rule == "while-au-l":
            return stimp.apply_seq_au_l(s, m, w, goal.left, goal.right, limits,
                                        inner=lambda m2, w2: prove(s.second, m2, w2, False),
                                        oracle=oracle)
        if not isinstance(s, stimp.While):
            raise UsageError("the program must be a while loop, optionally after a sequence")
        if args.rule == "while-au-l":
            return stimp.apply_while_au_l(s, m, w, goal.left, goal.right, R, f, limits,
                                          oracle=oracle)
        return stimp.apply_while_ag(s, m, w, goal.body, R, limits, oracle=oracle)

    return prove(target.program, target.store, target.world, True)


def cmd_prove(args):
    target = load_target(args)
    try:
        if target.program is not None:
            cert = _prove_program(args, target)
        else:
            if args.invariant or args.ranking:
                raise UsageError("inline invariants apply to programs; use --invariant-id for scenarios")
            options = {"limits": _limits(args)}
            if args.invariant_id:
                options["invariant_id"] = args.invariant_id
            if args.ranking_id:
                options["ranking_id"] = args.ranking_id
            cert = target.bundle.prove(args.rule, **options)
    except PremiseFailed as e:
        print(f"{e}", file=sys.stderr)
        _write_json(args.json, {"status": "premise-failed", "premise": e.premise.to_json(),
                                "certificate": e.certificate.to_json()})
        return EXIT_FAIL
    except DomainIncomplete as e:
        print(f"{e}", file=sys.stderr)
        _write_json(args.json, {"status": "domain-incomplete", "state": repr(e.state)})
        return EXIT_FAIL
    _print_certificate(cert)
    _write_json(args.json, {"status": "certified" if cert.ok else "not-certified",
                            "certificate": cert.to_json()})
    return EXIT_OK if cert.ok else EXIT_FAIL


def _print_certificate(cert, indent=""):
    print(f"{indent}{cert.rule}: {cert.goal}")
    for p in cert.premises:
        extra = f" {p.fired}" if p.fired else ""
        print(f"{indent}  [{p.verdict}] {p.description} ({p.instances} instances){extra}")
        for sub in p.subproofs:
            _print_certificate(sub, indent + "    ")
    if cert.oracle:
        print(f"{indent}  direct check: {cert.oracle}")


# ----------------------------------------------------------- tree specs

_SPEC_TOKEN = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_][A-Za-z_0-9]*)|([(),]))")


def _lex_spec(text):
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _SPEC_TOKEN.match(text, pos)
        if not m:
            raise UsageError(f"bad tree spec at {pos}: {text[pos:pos + 10]!r}")
        out.append(int(m.group(1)) if m.group(1) is not None else m.group(2) or m.group(3))
        pos = m.end()
    return out


class Emit:
    """Unit-response event used by tree specs."""

    responses = (None,)

    def __init__(self, name):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Emit) and other.name == self.name

    def __hash__(self):
        return hash(("emit", self.name))

    def __repr__(self):
        return self.name


def _const_tree(t, _):
    return t


def _pick_tree(children, i):
    return children[i]


def parse_tree_spec(text):
    """``ret N | stuck | tau T | emit NAME T | branch N | choice(T, T) | br(T, ...) | (T)``"""
    toks = _lex_spec(text)
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise UsageError(f"tree spec ended early: {text!r}")
        pos += 1
        return toks[pos - 1]

    def expect(tok):
        got = take()
        if got != tok:
            raise UsageError(f"expected {tok!r} in tree spec, found {got!r}")

    def tree():
        t = take()
        if t == "(":
            inner = tree()
            expect(")")
            return inner
        if t == "ret":
            v = take()
            if not isinstance(v, int):
                raise UsageError("ret takes an integer")
            return ret(v)
        if t == "stuck":
            return stuck()
        if t == "tau":
            return tau(tree())
        if t == "emit":
            name = take()
            return vis(Emit(name), Cont(_const_tree, tree()))
        if t == "branch":
            n = take()
            if not isinstance(n, int):
                raise UsageError("branch takes an integer")
            return branch(n)
        if t in ("choice", "br"):
            expect("(")
            kids = [tree()]
            while toks[pos:pos + 1] == [","]:
                take()
                kids.append(tree())
            expect(")")
            if t == "choice" and len(kids) != 2:
                raise UsageError("choice takes two trees")
            return br(len(kids), Cont(_pick_tree, tuple(kids)))
        raise UsageError(f"unexpected {t!r} in tree spec")

    t = tree()
    if pos != len(toks):
        raise UsageError(f"trailing input in tree spec: {toks[pos:]}")
    return t


def cmd_bisim(args):
    a, b = parse_tree_spec(args.left), parse_tree_spec(args.right)
    v = bisim_upto_tau(a, b, args.fuel, args.tau_budget)
    print(repr(v))
    if isinstance(v, Equivalent):
        return EXIT_OK
    if isinstance(v, Distinguished):
        return EXIT_FAIL
    return EXIT_UNKNOWN


def cmd_explore(args):
    target = load_target(args)
    g = explore(target.tree, target.world, limits=_limits(args))
    print(f"{target.name}: {len(g.states)} states, {g.num_edges} edges")
    if args.dot:
        Path(args.dot).write_text(to_dot(g))
    return EXIT_OK


# --------------------------------------------------------------- parser

def _target_flags(p):
    p.add_argument("target_name", metavar="TARGET",
                   help=f"scenario ({', '.join(scenarios.SCENARIOS)}) or a .imp program")
    p.add_argument("--config", help="key = value file supplying any of these flags")
    p.add_argument("--q", help="queue contents, e.g. 1,2,3")
    p.add_argument("--target", help="queue element that must keep coming back")
    p.add_argument("--n", help="number of election processes")
    p.add_argument("--heap", help="secure-mem heap, e.g. 0:L:5,1:H:3,2:L:0")
    p.add_argument("--bound", help="secure-mem index bound")
    p.add_argument("--x", help="value alice writes")
    p.add_argument("--store", action="append", help="initial program store, e.g. c=5,r=0")
    p.add_argument("--const", action="append", help="named constant for formulas, e.g. N=3")
    p.add_argument("--max-states", type=int, default=Limits.max_states)
    p.add_argument("--tau-budget", type=int, default=Limits.tau_budget)


def build_parser():
    parser = _Parser(prog="treelogic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide a formula on a scenario or program")
    _target_flags(p)
    p.add_argument("--formula", help="formula text (default: the scenario goal)")
    p.add_argument("--sort", choices=("L", "R"), default="L", help="prefix (L) or suffix (R)")
    p.add_argument("--backend", choices=("finite", "bounded"), default="finite")
    p.add_argument("--depth", type=int, default=64, help="bounded backend depth")
    p.add_argument("--dot", help="write the explored graph as DOT")
    p.add_argument("--json", help="write the verdict as JSON ('-' for stdout)")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("prove", help="apply a structural rule and print its certificate")
    _target_flags(p)
    p.add_argument("--rule", help="rule name, e.g. iter-ag, iter-au-l, split-au, while-au-l")
    p.add_argument("--invariant-id", help="bundled invariant for scenarios: standard (default), or general for election")
    p.add_argument("--ranking-id", help="bundled ranking function for scenarios: standard (default), or general for election")
    p.add_argument("--invariant", help="store predicate for programs, e.g. 'r + c == v'")
    p.add_argument("--ranking", help="store term for programs, e.g. 'v - r'")
    p.add_argument("--formula", help="goal formula (programs)")
    p.add_argument("--sort", choices=("L", "R"), default="L")
    p.add_argument("--json", help="write the certificate as JSON ('-' for stdout)")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("bisim", help="compare two tree specs up to silent steps")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--fuel", type=int, default=64)
    p.add_argument("--tau-budget", type=int, default=64)
    p.set_defaults(run=cmd_bisim)

    p = sub.add_parser("explore", help="explore the state graph and report its size")
    _target_flags(p)
    p.add_argument("--dot", help="write the graph as DOT")
    p.set_defaults(run=cmd_explore)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits on --help and usage errors; report the code instead
        return e.code
    try:
        return args.run(args)
    except (TauBudgetExceeded, StateBudgetExceeded) as e:
        print(f"budget exhausted: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, FormulaSyntaxError, stimp.StImpSyntaxError, BadParams, UnknownRule,
            scenarios.UnknownScenario, ZeroArity) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
