"""Random trees, continuations, graphs and formulas for property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from treelogic.instrument import Log
from treelogic.kripke import Finish, Obs, Pure, Val
from treelogic.logic.formula import (AG, AN, AU, EG, EN, EU, And, Done, Now, Or, Pred, TOP,
                                     TOP_DONE)
from treelogic.logic.graph import KripkeGraph
from treelogic.tree import STUCK, Br, Cont, Ret, Tau, Vis, bind, br, iterate, ret, stuck, tau, vis
from treelogic.values import Inl, Inr


@dataclass(frozen=True)
class Beep:
    """Unit-response event."""
    name: str
    responses = (None,)


@dataclass(frozen=True)
class Ask:
    """Event with two possible answers."""
    name: str
    responses = (0, 1)


def _child(children, x):
    return children[0 if x is None else x]


def _pick(children, i):
    return children[i]


def random_tree(rng, depth=6, arity=3, values=8, p_leaf=0.25):
    """A finite tree of depth at most ``depth`` over Beep/Ask events."""
    if depth == 0 or rng.random() < p_leaf:
        return stuck() if rng.random() < 0.1 else ret(rng.randrange(values))
    kind = rng.choice(("tau", "beep", "ask", "br", "br"))
    sub = lambda: random_tree(rng, depth - 1, arity, values, p_leaf)
    if kind == "tau":
        return tau(sub())
    if kind == "beep":
        return vis(Beep(rng.choice("ab")), Cont(_child, (sub(),)))
    if kind == "ask":
        return vis(Ask(rng.choice("ab")), Cont(_child, (sub(), sub())))
    n = rng.randint(1, arity)
    return br(n, Cont(_pick, tuple(sub() for _ in range(n))))


def _table(trees, x):
    return trees[x % len(trees)]


def random_cont(rng, depth=3, arity=3, values=8):
    """A continuation ``int -> tree`` given as a lookup table over the value domain."""
    return Cont(_table, tuple(random_tree(rng, depth, arity, values) for _ in range(values)))


def perturb(rng, t, p=0.3, extra=3):
    """Insert and remove silent steps throughout ``t`` without changing its behaviour."""
    n = t.node
    if isinstance(n, Tau) and rng.random() < 0.5:
        return perturb(rng, n.child, p, extra)
    if isinstance(n, Ret) or n is STUCK:
        out = t
    elif isinstance(n, Tau):
        out = tau(perturb(rng, n.child, p, extra))
    elif isinstance(n, Br):
        out = br(n.arity, Cont(_pick, tuple(perturb(rng, n.child(i), p, extra)
                                            for i in range(n.arity))))
    elif isinstance(n, Vis):
        kids = tuple(perturb(rng, n.child(v), p, extra) for v in n.event.responses)
        out = vis(n.event, Cont(_by_response, n.event.responses, kids))
    else:
        raise TypeError(n)
    if rng.random() < p:
        for _ in range(rng.randint(1, extra)):
            out = tau(out)
    return out


def _by_response(domain, kids, x):
    return kids[domain.index(x)]


# ------------------------------------------------------------- graphs

def _observation(k):
    return Obs(Log(k), None)


def random_world(rng, atoms=3):
    r = rng.random()
    if r < 0.15:
        return Pure
    if r < 0.75:
        return _observation(rng.randrange(atoms))
    if r < 0.88:
        return Val(rng.randrange(atoms))
    return Finish(Log(rng.randrange(atoms)), None, rng.randrange(atoms))


def random_graph(rng, max_states=50, atoms=3):
    """A graph whose done states have no successors, like explored graphs."""
    n = rng.randint(1, max_states)
    worlds = [random_world(rng, atoms) for _ in range(n)]
    worlds[0] = Pure if rng.random() < 0.5 else _observation(0)
    succ = []
    for w in worlds:
        if isinstance(w, (Val, Finish)) or rng.random() < 0.08:
            succ.append([])
        else:
            succ.append([rng.randrange(n) for _ in range(rng.randint(1, 3))])
    return KripkeGraph.from_worlds(worlds, succ)


def obs_is(k):
    return Now(Pred(lambda w, k=k: isinstance(w, Obs) and w.event == Log(k), f"obs(value == {k})"))


def obs_in(ks):
    ks = frozenset(ks)
    return Now(Pred(lambda w: isinstance(w, Obs) and w.event.observation in ks,
                    f"obs(value in {sorted(ks)})"))


def done_is(k):
    return Done(Pred(lambda x, w, k=k: x == k, f"val(value == {k})"))


PREFIX_ATOMS = [Now(TOP), obs_is(0), obs_is(1), obs_is(2), obs_in({0, 1}), obs_in({1, 2}),
                Now(Pred(lambda w: w is Pure, "pure"))]
SUFFIX_ATOMS = [Done(TOP_DONE), done_is(0), done_is(1), done_is(2)]


def random_prefix(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(PREFIX_ATOMS)
    op = rng.choice(("AN", "EN", "AU", "EU", "AG", "EG", "and", "or"))
    a = random_prefix(rng, depth - 1)
    if op in ("AG", "EG"):
        return (AG if op == "AG" else EG)(a)
    b = random_prefix(rng, depth - 1)
    return {"AN": AN, "EN": EN, "AU": AU, "EU": EU, "and": And, "or": Or}[op](a, b)


def random_suffix(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(SUFFIX_ATOMS)
    op = rng.choice(("AN", "EN", "AU", "EU", "and", "or"))
    if op in ("and", "or"):
        return (And if op == "and" else Or)(random_suffix(rng, depth - 1),
                                            random_suffix(rng, depth - 1))
    return {"AN": AN, "EN": EN, "AU": AU, "EU": EU}[op](random_prefix(rng, depth - 1),
                                                        random_suffix(rng, depth - 1))


def random_formula(rng, depth=3):
    return random_prefix(rng, depth) if rng.random() < 0.6 else random_suffix(rng, depth)


def rng_for(seed):
    return random.Random(seed)


# ------------------------------------------------------ log-only trees

def _log_child(children, _):
    return children[0]


def random_log_tree(rng, depth=6, arity=3, values=3, p_leaf=0.2):
    """A finite tree whose only events are Log observations the formulas can see."""
    if depth == 0 or rng.random() < p_leaf:
        return stuck() if rng.random() < 0.1 else ret(rng.randrange(values))
    kind = rng.choice(("tau", "log", "log", "br"))
    sub = lambda: random_log_tree(rng, depth - 1, arity, values, p_leaf)
    if kind == "tau":
        return tau(sub())
    if kind == "log":
        return vis(Log(rng.randrange(values)), Cont(_log_child, (sub(),)))
    n = rng.randint(1, arity)
    return br(n, Cont(_pick, tuple(sub() for _ in range(n))))


def _loop_body(bodies, i):
    return bodies[i]


def _tag_exit(states, x):
    # values below ``states`` continue the loop, the rest leave it
    return ret(Inl(x) if x < states else Inr(x))


def random_loop(rng, states=3, depth=3):
    """A loop over ``states`` iterator values whose bodies are random log trees.

    Each body starts with a log event so the loop never diverges silently.
    Returns the bodies so a perturbed copy of the same loop can be built.
    """
    return tuple(vis(Log(i), Cont(_log_child, (bind(random_log_tree(rng, depth, values=states + 1),
                                                    Cont(_tag_exit, states)),)))
                 for i in range(states))


def loop_tree(bodies, i0=0):
    return iterate(Cont(_loop_body, bodies), i0)
