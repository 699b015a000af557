"""Structural proof rules for bind and loops, discharged by model checking.

Each ``apply_*`` function checks the premises of one rule, enumerating
the universally quantified loop states over the loop heads reachable
from the starting point, and returns a Certificate. A failing premise
raises PremiseFailed carrying the partial certificate; a caller-supplied
domain that misses a reachable invariant state raises DomainIncomplete.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .kripke import is_done, resumed_world
from .logic.check import HOLDS, FAILS, check
from .logic.formula import AG, AN, AU, AX, Done, Pred, done_eq, to_text
from .logic.graph import Limits, explore
from .tree import bind, iterate, ret
from .values import Inl, Inr


class PremiseFailed(Exception):
    def __init__(self, certificate, premise):
        super().__init__(f"{certificate.rule}: premise failed: {premise.description}"
                         + (f" at {premise.witness}" if premise.witness else ""))
        self.certificate = certificate
        self.premise = premise


class DomainIncomplete(Exception):
    def __init__(self, state):
        super().__init__(f"reachable invariant state missing from domain: {state!r}")
        self.state = state


@dataclass
class Premise:
    description: str
    verdict: str = HOLDS
    instances: int = 0
    witness: str | None = None
    fired: dict = field(default_factory=dict)
    subproofs: list = field(default_factory=list)

    def to_json(self):
        out = {"description": self.description, "verdict": self.verdict,
               "instances": self.instances}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.fired:
            out["disjuncts"] = dict(self.fired)
        if self.subproofs:
            out["subproofs"] = [c.to_json() for c in self.subproofs]
        return out


@dataclass
class Certificate:
    rule: str
    goal: str
    premises: list = field(default_factory=list)
    conclusion: str | None = None
    oracle: str | None = None

    @property
    def ok(self):
        return self.conclusion is not None

    def to_json(self):
        out = {"rule": self.rule, "goal": self.goal,
               "premises": [p.to_json() for p in self.premises],
               "conclusion": self.conclusion}
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out


def _describe(x):
    return repr(x)


class _Rule:
    """Premise bookkeeping shared by every rule application."""

    def __init__(self, rule, goal):
        self.cert = Certificate(rule, goal)

    def premise(self, description):
        p = Premise(description)
        self.cert.premises.append(p)
        return p

    def fail(self, p, witness=None, verdict=FAILS):
        p.verdict = verdict
        p.witness = witness
        raise PremiseFailed(self.cert, p)

    def conclude(self, oracle_tree=None, w=None, goal=None, limits=None, oracle=True):
        self.cert.conclusion = self.cert.goal
        if oracle and oracle_tree is not None:
            self.cert.oracle = check(oracle_tree, w, goal, limits).status
        return self.cert


def entails(t, w, f, limits=None):
    return check(t, w, f, limits).holds


def outcomes(t, w, limits=None):
    """Distinct ``(value, resumed world)`` pairs at which ``t`` can finish."""
    g = explore(t, w, limits=limits)
    out = []
    for st in g.states:
        if is_done(st.world):
            out.append((st.world.value, resumed_world(st.world)))
    return list(dict.fromkeys(out))


class LoopSpace:
    """Loop heads ``(i, w)`` of ``iterate(step, i0)`` and cached body outcomes."""

    def __init__(self, step, limits=None):
        self.step = step
        self.limits = limits or Limits()
        self._out = {}

    def outcomes(self, i, w):
        key = (i, w)
        out = self._out.get(key)
        if out is None:
            out = self._out[key] = outcomes(self.step(i), w, self.limits)
        return out

    def next_heads(self, i, w):
        return [(lr.value, w2) for lr, w2 in self.outcomes(i, w) if isinstance(lr, Inl)]

    def closure(self, i0, w, keep):
        """Heads reachable from ``(i0, w)`` by iterating through ``keep`` states only."""
        if not keep(i0, w):
            return []
        seen = {(i0, w): None}
        queue = deque([(i0, w)])
        while queue:
            i, w1 = queue.popleft()
            for h in self.next_heads(i, w1):
                if h not in seen and keep(*h):
                    seen[h] = None
                    queue.append(h)
        return list(seen)

    def domain(self, i0, w, keep, domain=None):
        if domain is None:
            return self.closure(i0, w, keep)
        domain = list(dict.fromkeys(domain))
        members = set(domain)
        if keep(i0, w) and (i0, w) not in members:
            raise DomainIncomplete((i0, w))
        for i, w1 in domain:
            if not keep(i, w1):
                continue
            for h in self.next_heads(i, w1):
                if keep(*h) and h not in members:
                    raise DomainIncomplete(h)
        return [d for d in domain if keep(*d)]


def _next_is(R):
    def post(lr, w):
        return isinstance(lr, Inl) and bool(R(lr.value, w))
    return post


# ---------------------------------------------------------------- bind

def apply_bind_l(t, k, w, goal, limits=None, oracle=True):
    """Prove ``bind(t, k)`` satisfies a prefix goal by proving it of ``t`` alone."""
    r = _Rule("BindL", f"bind(t, k), {w!r} |= {to_text(goal)}")
    p = r.premise(f"t, {w!r} |= {to_text(goal)}")
    p.instances = 1
    if not entails(t, w, goal, limits):
        r.fail(p, _describe(w))
    return r.conclude(bind(t, k), w, goal, limits, oracle)


def apply_bind_au_l(t, k, w, goal, post, limits=None, inner=None, oracle=True):
    """``t`` reaches ``post`` under phi, then every continuation from there meets the goal."""
    if not isinstance(goal, AU):
        raise ValueError("BindAU_L needs an AU goal")
    post_pred = post.pred if isinstance(post, Done) else Pred(post)
    r = _Rule("BindAU_L", f"bind(t, k), {w!r} |= {to_text(goal)}")
    first = AU(goal.left, AX(Done(post_pred)))
    p1 = r.premise(f"t, {w!r} |= {to_text(first)}")
    p1.instances = 1
    if not entails(t, w, first, limits):
        r.fail(p1, _describe(w))
    p2 = r.premise(f"for every (y, w') meeting the postcondition: k y, w' |= {to_text(goal)}")
    for y, w2 in outcomes(t, w, limits):
        if not post_pred(y, w2):
            continue
        p2.instances += 1
        _discharge(r, p2, k(y), w2, goal, limits, inner, (y, w2))
    return r.conclude(bind(t, k), w, goal, limits, oracle)


def apply_bind_au_l_eq(t, k, w, goal, limits=None, inner=None, oracle=True):
    """BindAU_L with the unique final value and world of ``t`` as postcondition."""
    outs = outcomes(t, w, limits)
    if len(outs) != 1:
        r = _Rule("BindAU_L=", f"bind(t, k), {w!r} |= {to_text(goal)}")
        p = r.premise("t has exactly one final (value, world)")
        p.instances = len(outs)
        r.fail(p, repr(outs))
    y, w2 = outs[0]
    cert = apply_bind_au_l(t, k, w, goal, done_eq(y, w2), limits, inner, oracle)
    cert.rule = "BindAU_L="
    return cert


def _discharge(r, p, tree, w, goal, limits, inner, at):
    """Check one instance of a premise directly or through a nested rule."""
    if inner is not None:
        try:
            sub = inner(*at) if isinstance(at, tuple) else inner(at)
        except PremiseFailed as e:
            p.subproofs.append(e.certificate)
            r.fail(p, _describe(at))
        p.subproofs.append(sub)
        return
    if not entails(tree, w, goal, limits):
        r.fail(p, _describe(at))


# --------------------------------------------------------------- loops

def apply_iter_ag(step, i0, w, phi, R, domain=None, limits=None, inner=None, oracle=True):
    """Invariance: AG phi for a loop whose body keeps R and always takes a step."""
    goal = AG(phi)
    space = LoopSpace(step, limits)
    r = _Rule("IterAG", f"iter(step, {i0!r}), {w!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(i0, w):
        r.fail(p1, _describe((i0, w)))
    states = space.domain(i0, w, R, domain)
    p2 = r.premise(f"for every R-state: iter(step, i), w |= {to_text(phi)}")
    p3_formula = AX(AU(phi, AX(Done(Pred(_next_is(R), label="done(inl i' and R i' w')")))))
    p3 = r.premise(f"for every R-state: step(i), w |= {to_text(p3_formula)}")
    for i, w1 in states:
        p2.instances += 1
        _discharge(r, p2, iterate(step, i), w1, phi, space.limits, inner, (i, w1))
        p3.instances += 1
        if not entails(step(i), w1, p3_formula, space.limits):
            r.fail(p3, _describe((i, w1)))
    return r.conclude(iterate(step, i0), w, goal, space.limits, oracle)


def apply_iter_au_l(step, i0, w, phi, goal_right, R, f, domain=None, limits=None, oracle=True):
    """Liveness: eventually ``goal_right`` (under phi), with an N-valued ranking ``f``."""
    goal = AU(phi, goal_right)
    space = LoopSpace(step, limits)
    r = _Rule("IterAU_L", f"iter(step, {i0!r}), {w!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(i0, w):
        r.fail(p1, _describe((i0, w)))
    states = space.domain(i0, w, R, domain)
    p2 = r.premise(f"for every R-state: step(i), w |= {to_text(goal)}, "
                   "or the body ends in a smaller R-state")
    p2.fired = {"goal": 0, "decrease": 0}
    for i, w1 in states:
        p2.instances += 1
        body = step(i)
        if entails(body, w1, goal, space.limits):
            p2.fired["goal"] += 1
            continue
        rank = f(i, w1)
        dec = AU(phi, AX(Done(Pred(_decreases(R, f, rank), label="done(inl i' and R i' w' and f i' w' < f i w)"))))
        if entails(body, w1, dec, space.limits):
            p2.fired["decrease"] += 1
            continue
        r.fail(p2, _describe((i, w1)))
    return r.conclude(iterate(step, i0), w, goal, space.limits, oracle)


def _decreases(R, f, bound):
    def post(lr, w):
        return isinstance(lr, Inl) and bool(R(lr.value, w)) and f(lr.value, w) < bound
    return post


def apply_iter_au_r(step, i0, w, phi, psi, R, f, domain=None, limits=None, oracle=True):
    """Termination: the loop finishes with ``psi`` (under phi), ranked by ``f``."""
    goal = AU(phi, psi)
    if goal.sort != "R":
        raise ValueError("IterAU_R needs a suffix postcondition")
    space = LoopSpace(step, limits)
    r = _Rule("IterAU_R", f"iter(step, {i0!r}), {w!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(i0, w):
        r.fail(p1, _describe((i0, w)))
    states = space.domain(i0, w, R, domain)
    exit_ok = AN(phi, psi)
    p2 = r.premise(f"for every R-state: the body continues in a smaller R-state "
                   f"or returns r with Ret r, w' |= {to_text(exit_ok)}")
    for i, w1 in states:
        p2.instances += 1
        rank = f(i, w1)

        def post(lr, w2, rank=rank):
            if isinstance(lr, Inl):
                return bool(R(lr.value, w2)) and f(lr.value, w2) < rank
            if isinstance(lr, Inr):
                return entails(ret(lr.value), w2, exit_ok, space.limits)
            return False

        f_body = AU(phi, AX(Done(Pred(post, label="done(continue smaller or exit well)"))))
        if not entails(step(i), w1, f_body, space.limits):
            r.fail(p2, _describe((i, w1)))
    return r.conclude(iterate(step, i0), w, goal, space.limits, oracle)


def apply_split_au(step, i0, w, phi, goal_right, R, R_I, f, domain=None, limits=None,
                   inner=None, oracle=True):
    """Liveness split at an intermediate relation ``R_I``."""
    goal = AU(phi, goal_right)
    space = LoopSpace(step, limits)
    r = _Rule("SplitAU_L", f"iter(step, {i0!r}), {w!r} |= {to_text(goal)}")
    p1 = r.premise("R holds initially")
    p1.instances = 1
    if not R(i0, w):
        r.fail(p1, _describe((i0, w)))

    def keep(i, w1):
        return bool(R(i, w1)) or bool(R_I(i, w1))

    states = space.domain(i0, w, keep, domain)
    pa = r.premise(f"for every R_I-state: iter(step, i), w |= {to_text(goal)}")
    pb = r.premise("for every R-state: the body reaches an R_I-state or a smaller R-state")
    pb.fired = {"intermediate": 0, "decrease": 0}
    into_split = AU(phi, AX(Done(Pred(_next_is(R_I), label="done(inl i' and R_I i' w')"))))
    for i, w1 in states:
        if R_I(i, w1):
            pa.instances += 1
            _discharge(r, pa, iterate(step, i), w1, goal, space.limits, inner, (i, w1))
        if R(i, w1):
            pb.instances += 1
            body = step(i)
            if entails(body, w1, into_split, space.limits):
                pb.fired["intermediate"] += 1
                continue
            rank = f(i, w1)
            dec = AU(phi, AX(Done(Pred(_decreases(R, f, rank), label="done(inl i' and R i' w' and f i' w' < f i w)"))))
            if entails(body, w1, dec, space.limits):
                pb.fired["decrease"] += 1
                continue
            r.fail(pb, _describe((i, w1)))
    return r.conclude(iterate(step, i0), w, goal, space.limits, oracle)
