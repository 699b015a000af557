"""Leader election on a unidirectional ring of ``n`` processes.

Each process reads its mailbox and forwards, drops or answers the
message it finds there. Mailboxes hold one message each and are not
cleared by reading. Receiving logs the message read, so consensus on
the highest pid is ``AF obs(elected == n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from ..instrument import UnhandledEvent, instrument, instrumented_step, log
from ..kripke import Obs, Pure, not_done
from ..logic.check import check
from ..logic.formula import Done, Pred, top
from ..logic.syntax import Vocabulary, parse_formula
from ..rules import apply_bind_au_l, apply_split_au, Certificate
from ..tree import Cont, bind, branch, iterate, ret, then, trigger
from ..values import Inl
from .base import STANDARD, BadParams, Bundle, resolve_id


@dataclass(frozen=True)
class Msg:
    kind: str  # "C" proposes a candidate, "E" announces a leader
    pid: int

    def __repr__(self):
        return f"{self.kind}{self.pid}"


def C(p):
    return Msg("C", p)


def E(p):
    return Msg("E", p)


@dataclass(frozen=True)
class Send:
    sender: int
    msg: Msg
    responses = (None,)


@dataclass(frozen=True)
class Recv:
    pid: int
    # responses are messages; only meaningful after instrumentation
    responses = None


def ring_next(n, pid):
    return pid % n + 1


@dataclass(frozen=True)
class NetHandler:
    """Delivers a send to the sender's ring successor (``hops`` positions on)."""

    n: int
    hops: int = 1

    def __call__(self, e, ms):
        if isinstance(e, Send):
            target = e.sender
            for _ in range(self.hops):
                target = ring_next(self.n, target)
            return ret((None, ms[:target - 1] + (e.msg,) + ms[target:]))
        if isinstance(e, Recv):
            m = ms[e.pid - 1]
            return then(log(m), ret((m, ms)))
        raise UnhandledEvent(e)


def _react(pid, m):
    if m.kind == "E":
        return trigger(Send(pid, m))
    if m.pid > pid:
        return trigger(Send(pid, m))
    if m.pid < pid:
        return ret(None)
    return trigger(Send(pid, E(pid)))


def proc(pid):
    return bind(trigger(Recv(pid)), Cont(_react, pid))


def _round(n, pid):
    return then(proc(pid), ret(Inl(ring_next(n, pid))))


def scheduler(n):
    return Cont(_round, n)


def _start(n, body, idx):
    return iterate(body, idx + 1)


def program(n):
    """Pick the first scheduled pid nondeterministically, then run the ring forever."""
    return bind(branch(n), Cont(_start, n, scheduler(n)))


def initial_mailboxes(n):
    """Every process holds its predecessor's candidacy."""
    return tuple(C(n if p == 1 else p - 1) for p in range(1, n + 1))


def _fields(m):
    return {"elected": m.pid} if m.kind == "E" else {"candidate": m.pid}


VOCAB = Vocabulary(observe=_fields)


# ------------------------------------------------- invariants and rankings

def _front(n, ms):
    """``j`` such that mailboxes 1..j hold C_n and the rest are initial, else None."""
    init = initial_mailboxes(n)
    for j in range(n, 0, -1):
        if all(m == C(n) for m in ms[:j]) and ms[j:] == init[j:]:
            return j
    return None


def general_invariant(n):
    def R(i, w):
        pid, ms = i
        if not not_done(w):
            return False
        j = _front(n, ms)
        if j is None or j == n:
            return False
        return j == 1 or pid == j
    return R


def general_split(n):
    def R_I(i, w):
        pid, ms = i
        return not_done(w) and pid == n and ms == (C(n),) * n
    return R_I


def general_ranking(n):
    def f(i, w):
        pid, ms = i
        j = _front(n, ms)
        if j is None:
            return 10 * n
        if j == 1:
            return n - 1 if pid == 1 else (n - pid + 1) + (n - 1)
        return n - j
    return f


def table_invariant():
    """The hand-written three-process invariant, one case per reachable world shape."""
    init = initial_mailboxes(3)

    def R(i, w):
        pid, ms = i
        if w is Pure:
            return ms == init
        if isinstance(w, Obs) and getattr(w.event, "observation", None) is not None:
            m = w.event.observation
            if m.kind != "C":
                return False
            if (pid, m.pid) == (2, 3):
                return ms == (C(3), C(3), C(2))
            if (pid, m.pid) in ((3, 1), (1, 2)):
                return ms == init
        return False
    return R


def table_ranking():
    init = initial_mailboxes(3)
    table = {(2, (C(3), C(3), C(2))): 1, (1, init): 2, (3, init): 3, (2, init): 4}

    def f(i, w):
        return table.get(i, 10)
    return f


INVARIANTS = {STANDARD: lambda n: table_invariant() if n == 3 else general_invariant(n),
              "general": general_invariant}
RANKINGS = {STANDARD: lambda n: table_ranking() if n == 3 else general_ranking(n),
            "general": general_ranking}


def build(hops=1, **params):
    n = int(params.get("n", 3))
    if n < 2:
        raise BadParams("election needs n >= 2")
    h = NetHandler(n, hops)
    ms0 = initial_mailboxes(n)
    body = scheduler(n)
    goal = parse_formula(f"AF obs(elected == {n})", vocab=VOCAB)
    return Bundle(
        scenario={1: "election", 0: "election-self"}.get(hops, "election-skip"),
        params={"n": n},
        tree=instrument(h, program(n), ms0),
        world=Pure,
        vocab=VOCAB,
        formulas={"goal": goal},
        provers={"split-au": _prove_split, "check": _prove_by_check},
        rule_inputs={"handler": h, "step": instrumented_step(h, body), "mailboxes": ms0},
        # a delivery offset coprime to n still forms one ring, so election still succeeds
        expected=None if gcd(hops, n) == 1 else "fails",
    )


def _start_instrumented(step, xs):
    idx, ms = xs
    return iterate(step, (idx + 1, ms))


def _prove_split(b, limits=None, invariant_id=STANDARD, ranking_id=STANDARD, **_):
    """Case on the first scheduled pid, then split each loop at full candidate propagation."""
    n = b.params["n"]
    ri = b.rule_inputs
    step = ri["step"]
    try:
        R = INVARIANTS[resolve_id(invariant_id)](n)
        f = RANKINGS[resolve_id(ranking_id)](n)
    except KeyError as e:
        raise BadParams(f"unknown invariant or ranking {e.args[0]!r}") from None
    R_I = general_split(n)
    first = instrument(ri["handler"], branch(n), ri["mailboxes"])

    def after_branch(xs, w):
        idx, ms = xs
        return apply_split_au(step, (idx + 1, ms), w, top, b.goal.right, R, R_I, f,
                              limits=limits, oracle=False)

    scheduled = Done(Pred(lambda xs, w: not_done(w), label="done(some first pid)"))
    return apply_bind_au_l(first, Cont(_start_instrumented, step), b.world, b.goal,
                           scheduled, limits=limits, inner=after_branch)


def _prove_by_check(b, limits=None, **_):
    v = check(b.tree, b.world, b.goal, limits)
    cert = Certificate("check", f"tree, {b.world!r} |= {b.goal}")
    if v.holds:
        cert.conclusion = cert.goal
    cert.oracle = v.status
    return cert
