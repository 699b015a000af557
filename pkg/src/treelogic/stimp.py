"""A small imperative language over a store, denoted into process trees.

Programs read the store with ``Get`` and overwrite it with ``Put``. The
store handler erases reads and logs every written store, so checked
formulas observe the sequence of stores after each assignment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .instrument import Log, UnhandledEvent, instrument, instrumented_step, log
from .kripke import Obs, not_done
from .logic.check import check, check_bounded
from .logic.formula import AG, AU, AX, Done, Pred, done_eq, to_text
from .logic.graph import Limits
from .logic.syntax import Vocabulary
from .rules import (LoopSpace, _discharge, _Rule, apply_bind_au_l_eq, entails,
                    outcomes)
from .tree import Cont, _const, bind, iterate, ret, stuck, then, trigger
from .values import FMap, Inl, Inr

# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Num:
    n: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class BConst:
    value: bool


@dataclass(frozen=True)
class Less:
    left: object
    right: object


@dataclass(frozen=True)
class LessEq:
    left: object
    right: object


@dataclass(frozen=True)
class Equal:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Conj:
    left: object
    right: object


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    exp: object


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


@dataclass(frozen=True)
class If:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class While:
    cond: object
    body: object


def seq(*stmts):
    """Right-nested sequence of statements."""
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


# --------------------------------------------------------------- parser


class StImpSyntaxError(SyntaxError):
    def __init__(self, line, column, expected, found):
        super().__init__(f"line {line}, column {column}: expected {expected}, found {found!r}")
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found


_LEX = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)|(?P<num>\d+)"
                  r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>:=|<=|==|&&|[-+<!;(){}])")
_KEYWORDS = {"skip", "if", "else", "while", "true", "false"}


def _lex(src):
    toks, line, col, pos = [], 1, 1, 0
    while pos < len(src):
        m = _LEX.match(src, pos)
        if not m:
            raise StImpSyntaxError(line, col, "a token", src[pos])
        kind, text = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("num", "id", "op"):
                if kind == "id" and text in _KEYWORDS:
                    kind = "kw"
                toks.append((kind, text, line, col))
            col += len(text)
        pos = m.end()
    toks.append(("eof", "end of input", line, col))
    return toks


class _StImpParser:
    def __init__(self, src):
        self.toks = _lex(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, expected):
        t = self.peek()
        raise StImpSyntaxError(t[2], t[3], expected, t[1])

    def accept(self, text):
        if self.peek()[1] == text and self.peek()[0] in ("op", "kw"):
            return self.take()
        return None

    def expect(self, text):
        if not self.accept(text):
            self.error(repr(text))

    def program(self):
        s = self.stmt()
        if self.peek()[0] != "eof":
            self.error("';' or end of input")
        return s

    def stmt(self):
        first = self.simple()
        if self.accept(";"):
            return Seq(first, self.stmt())
        return first

    def simple(self):
        t = self.peek()
        if self.accept("skip"):
            return Skip()
        if self.accept("if"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            s1 = self.block()
            self.expect("else")
            return If(c, s1, self.block())
        if self.accept("while"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            return While(c, self.block())
        if t[0] == "id":
            self.take()
            self.expect(":=")
            return Assign(t[1], self.aexp())
        self.error("a statement")

    def block(self):
        self.expect("{")
        s = self.stmt()
        self.expect("}")
        return s

    def aexp(self):
        left = self.aatom()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.aatom()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def aatom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Num(int(t[1]))
        if t[0] == "id":
            self.take()
            return Var(t[1])
        self.error("an arithmetic expression")

    def bexp(self):
        left = self.batom()
        while self.accept("&&"):
            left = Conj(left, self.batom())
        return left

    def batom(self):
        if self.accept("true"):
            return BConst(True)
        if self.accept("false"):
            return BConst(False)
        if self.accept("!"):
            return Not(self.batom())
        if self.accept("("):
            b = self.bexp()
            self.expect(")")
            return b
        a = self.aexp()
        t = self.peek()
        ops = {"<": Less, "<=": LessEq, "==": Equal}
        if t[0] == "op" and t[1] in ops:
            self.take()
            return ops[t[1]](a, self.aexp())
        self.error("'<', '<=' or '=='")


def parse_stimp(source):
    return _StImpParser(source).program()


# ------------------------------------------------------------ denotation


@dataclass(frozen=True)
class Get:
    """Read the whole store. Responses are stores, so there is no finite domain."""

    responses = None


@dataclass(frozen=True)
class Put:
    store: FMap
    responses = (None,)


GET = Get()


def _lookup(name, strict, m):
    if name in m:
        return ret(m[name])
    return stuck() if strict else ret(0)


_ARITH = {Add: lambda a, b: a + b, Sub: lambda a, b: max(0, a - b),
          Less: lambda a, b: a < b, LessEq: lambda a, b: a <= b, Equal: lambda a, b: a == b}


def _binop_right(e, strict, x):
    return bind(denote_exp(e.right, strict), Cont(_binop_done, type(e), x))


def _binop_done(kind, x, y):
    return ret(_ARITH[kind](x, y))


def _negate(b):
    return ret(not b)


def _conj_right(right, strict, b):
    return denote_exp(right, strict) if b else ret(False)


def denote_exp(e, strict=False):
    """Arithmetic or boolean expression to a tree returning its value."""
    if isinstance(e, (Num, BConst)):
        return ret(e.n if isinstance(e, Num) else e.value)
    if isinstance(e, Var):
        return bind(trigger(GET), Cont(_lookup, e.name, strict))
    if isinstance(e, (Add, Sub, Less, LessEq, Equal)):
        return bind(denote_exp(e.left, strict), Cont(_binop_right, e, strict))
    if isinstance(e, Not):
        return bind(denote_exp(e.arg, strict), _negate)
    if isinstance(e, Conj):
        return bind(denote_exp(e.left, strict), Cont(_conj_right, e.right, strict))
    raise TypeError(f"not an expression: {e!r}")


def _assign_get(name, v):
    return bind(trigger(GET), Cont(_assign_put, name, v))


def _assign_put(name, v, m):
    return trigger(Put(m.set(name, v)))


def _seq_next(s, strict, _):
    return denote(s, strict)


def _if_pick(s1, s2, strict, b):
    return denote(s1 if b else s2, strict)


def _loop_step(cond, body, strict, _):
    return bind(denote_exp(cond, strict), Cont(_loop_pick, body, strict))


def _loop_pick(body, strict, b):
    if b:
        return bind(denote(body, strict), Cont(_const, Inl(None)))
    return ret(Inr(None))


def loop_step(cond, body, strict=False):
    """One iteration of ``while``: evaluate the condition, run the body or exit."""
    return Cont(_loop_step, cond, body, strict)


def denote(s, strict=False):
    """Statement to a tree over Get/Put events returning unit (None)."""
    if isinstance(s, Skip):
        return ret(None)
    if isinstance(s, Assign):
        return bind(denote_exp(s.exp, strict), Cont(_assign_get, s.var))
    if isinstance(s, Seq):
        return bind(denote(s.first, strict), Cont(_seq_next, s.second, strict))
    if isinstance(s, If):
        return bind(denote_exp(s.cond, strict), Cont(_if_pick, s.then, s.orelse, strict))
    if isinstance(s, While):
        return iterate(loop_step(s.cond, s.body, strict), None)
    raise TypeError(f"not a statement: {s!r}")


def store_handler(e, m):
    """Reads are answered and erased; writes replace the store and log it."""
    if isinstance(e, Get):
        return ret((m, m))
    if isinstance(e, Put):
        return then(log(e.store), ret((None, e.store)))
    raise UnhandledEvent(e)


def as_store(m):
    return m if isinstance(m, FMap) else FMap(m or {})


def start_world(m0):
    """Entailment starts as if the initial store had just been logged."""
    return Obs(Log(as_store(m0)), None)


def run_tree(s, m0, strict=False):
    return instrument(store_handler, denote(s, strict), as_store(m0))


def _store_fields(value):
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], FMap):
        return dict(value[1])
    if isinstance(value, FMap):
        return dict(value)
    return {"value": value}


def vocabulary(constants=None):
    return Vocabulary(observe=lambda m: dict(m), constants=dict(constants or {}),
                      value_fields=_store_fields)


def entails_stimp(s, m0, f, backend="finite", depth=64, limits=None, strict=False):
    """Check a program from store ``m0`` against a formula."""
    t = run_tree(s, m0, strict)
    w = start_world(m0)
    if backend == "finite":
        return check(t, w, f, limits)
    if backend == "bounded":
        return check_bounded(t, w, f, depth, (limits or Limits()).tau_budget)
    raise ValueError(f"unknown backend {backend!r}")


def evaluate(s, m0):
    """Reference big-step interpreter: final store and the trace of written stores."""
    m = dict(as_store(m0))
    trace = []

    def aval(e):
        if isinstance(e, Num):
            return e.n
        if isinstance(e, Var):
            return m.get(e.name, 0)
        if isinstance(e, BConst):
            return e.value
        if isinstance(e, Not):
            return not aval(e.arg)
        if isinstance(e, Conj):
            return aval(e.left) and aval(e.right)
        return _ARITH[type(e)](aval(e.left), aval(e.right))

    def run(st):
        if isinstance(st, Skip):
            return
        if isinstance(st, Assign):
            m[st.var] = aval(st.exp)
            trace.append(FMap(m))
        elif isinstance(st, Seq):
            run(st.first)
            run(st.second)
        elif isinstance(st, If):
            run(st.then if aval(st.cond) else st.orelse)
        elif isinstance(st, While):
            while aval(st.cond):
                run(st.body)

    run(s)
    return FMap(m), trace


# ------------------------------------------------------------ structural rules


def _cond_premise(r, p, cond, m, w, limits, strict):
    """The condition evaluates to a single boolean without changing the store."""
    outs = outcomes(instrument(store_handler, denote_exp(cond, strict), m), w, limits)
    if len(outs) != 1:
        r.fail(p, repr((m, w)))
    (b, m2), w2 = outs[0]
    f = AX(done_eq((b, m), w))
    if not entails(instrument(store_handler, denote_exp(cond, strict), m), w, f, limits):
        r.fail(p, repr((m, w)))
    return b


def _loop_space(cond, body, strict, limits):
    return LoopSpace(instrumented_step(store_handler, loop_step(cond, body, strict)), limits)


def _body_tree(body, m, strict):
    return instrument(store_handler, denote(body, strict), m)


def apply_while_au_l(loop, m0, w, phi, goal_right, R, f, limits=None, strict=False,
                     domain=None, oracle=True):
    """Eventually ``goal_right`` for a while loop, with store invariant R and ranking f."""
    if not isinstance(loop, While):
        raise TypeError("While_S AU_L applies to while statements")
    m0 = as_store(m0)
    goal = AU(phi, goal_right)
    space = _loop_space(loop.cond, loop.body, strict, limits)
    r = _Rule("While_S AU_L", f"while, {m0!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(m0):
        r.fail(p1, repr(m0))

    def keep(i, w1):
        return not_done(w1) and bool(R(i[1]))

    states = space.domain((None, m0), w, keep, domain)
    pc = r.premise("for every R-store: the condition evaluates to some b, AX done=(b, m)")
    pb = r.premise(f"for every R-store with b: body |= {to_text(goal)}, or the body ends in a "
                   "smaller R-store; with not b: skip |= " + to_text(goal_right))
    pb.fired = {"goal": 0, "decrease": 0, "exit": 0}
    for (_, m), w1 in states:
        pc.instances += 1
        b = _cond_premise(r, pc, loop.cond, m, w1, space.limits, strict)
        pb.instances += 1
        if not b:
            if not entails(_body_tree(Skip(), m, strict), w1, goal_right, space.limits):
                r.fail(pb, repr((m, w1)))
            pb.fired["exit"] += 1
            continue
        body = _body_tree(loop.body, m, strict)
        if entails(body, w1, goal, space.limits):
            pb.fired["goal"] += 1
            continue
        rank = f(m)

        def smaller(xs, w2, rank=rank):
            return not_done(w2) and bool(R(xs[1])) and f(xs[1]) < rank

        dec = AU(phi, AX(Done(Pred(smaller, label="done(R m' and f m' < f m)"))))
        if entails(body, w1, dec, space.limits):
            pb.fired["decrease"] += 1
            continue
        r.fail(pb, repr((m, w1)))
    return r.conclude(run_tree(loop, m0, strict), w, goal, space.limits, oracle)


def apply_while_ag(loop, m0, w, phi, R, limits=None, strict=False, domain=None, oracle=True):
    """Invariance of ``phi`` for a while loop whose condition stays true on R-stores."""
    if not isinstance(loop, While):
        raise TypeError("While_S AG applies to while statements")
    m0 = as_store(m0)
    goal = AG(phi)
    space = _loop_space(loop.cond, loop.body, strict, limits)
    r = _Rule("While_S AG", f"while, {m0!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(m0):
        r.fail(p1, repr(m0))

    def keep(i, w1):
        return not_done(w1) and bool(R(i[1]))

    states = space.domain((None, m0), w, keep, domain)
    p2 = r.premise(f"for every R-store: the loop |= {to_text(phi)}")
    pc = r.premise("for every R-store: the condition evaluates to true, AX done=(true, m)")
    step_goal = AX(AU(phi, AX(Done(Pred(lambda xs, w2: not_done(w2) and bool(R(xs[1])),
                                          label="done(R m')")))))
    p3 = r.premise(f"for every R-store: body |= {to_text(step_goal)}")
    for (_, m), w1 in states:
        p2.instances += 1
        if not entails(run_tree(loop, m, strict), w1, phi, space.limits):
            r.fail(p2, repr((m, w1)))
        pc.instances += 1
        if not _cond_premise(r, pc, loop.cond, m, w1, space.limits, strict):
            r.fail(pc, repr((m, w1)))
        p3.instances += 1
        if not entails(_body_tree(loop.body, m, strict), w1, step_goal, space.limits):
            r.fail(p3, repr((m, w1)))
    return r.conclude(run_tree(loop, m0, strict), w, goal, space.limits, oracle)


def apply_if_au_l(stmt, m0, w, phi, goal_right, limits=None, strict=False, inner=None,
                  oracle=True):
    """Evaluate the condition, then prove the goal for the chosen branch."""
    if not isinstance(stmt, If):
        raise TypeError("If_S AU_L applies to if statements")
    m0 = as_store(m0)
    goal = AU(phi, goal_right)
    r = _Rule("If_S AU_L", f"if, {m0!r} |= {to_text(goal)}")
    pc = r.premise("the condition evaluates to some b, AX done=(b, m)")
    pc.instances = 1
    b = _cond_premise(r, pc, stmt.cond, m0, w, limits, strict)
    chosen = stmt.then if b else stmt.orelse
    pb = r.premise(f"the {'then' if b else 'else'} branch |= {to_text(goal)}")
    pb.instances = 1
    _discharge(r, pb, run_tree(chosen, m0, strict), w, goal, limits, inner, (m0, w))
    return r.conclude(run_tree(stmt, m0, strict), w, goal, limits, oracle)


def _continue_with(s, strict, xs):
    return run_tree(s, xs[1], strict)


def apply_seq_au_l(stmt, m0, w, phi, goal_right, limits=None, strict=False, inner=None,
                   oracle=True):
    """Run the first statement to its unique final store, then prove the rest from there.

    ``inner(store, world)`` may discharge the second part with a nested rule.
    """
    if not isinstance(stmt, Seq):
        raise TypeError("Seq_S AU_L applies to sequences")
    m0 = as_store(m0)
    goal = AU(phi, goal_right)
    t = run_tree(stmt.first, m0, strict)
    k = Cont(_continue_with, stmt.second, strict)
    nested = None if inner is None else (lambda xs, w2: inner(xs[1], w2))
    cert = apply_bind_au_l_eq(t, k, w, goal, limits, nested, oracle=False)
    cert.rule = "Seq_S AU_L"
    cert.goal = cert.conclusion = f"seq, {m0!r} |= {to_text(goal)}"
    if oracle:
        cert.oracle = check(run_tree(stmt, m0, strict), w, goal, limits).status
    return cert
