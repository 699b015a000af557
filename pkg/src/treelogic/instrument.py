"""Interpreting events with a stateful handler that leaves log events behind."""

from __future__ import annotations

from dataclasses import dataclass

from .tree import (STUCK, Br, Cont, Ret, Tau, Tree, Vis, _compound, bind, key_of, ret,
                   tau, trigger)
from .values import Inl, Inr


class UnhandledEvent(LookupError):
    def __init__(self, event):
        super().__init__(f"handler does not interpret {event!r}")
        self.event = event


@dataclass(frozen=True)
class Log:
    """Unit-response event carrying a ghost observation."""

    observation: object
    responses = (None,)

    def __repr__(self):
        return f"Log({self.observation!r})"


def log(w):
    return trigger(Log(w))


def _resume(h, k, xs):
    x, s = xs
    return tau(instrument(h, k(x), s))


def _instr_child(h, k, s, i):
    return instrument(h, k(i), s)


def instrument(h, t, s):
    """Interpret every event of ``t`` with handler ``h`` starting from state ``s``.

    ``h(event, state)`` returns a finite tree over Log events yielding
    ``(response, new_state)``; it raises UnhandledEvent for foreign events.
    The result returns ``(value, final_state)``.
    """

    def force():
        n = t.node
        if isinstance(n, Ret):
            return Ret((n.value, s))
        if n is STUCK:
            return STUCK
        if isinstance(n, Tau):
            return Tau(instrument(h, n.child, s))
        if isinstance(n, Br):
            return Br(n.arity, Cont(_instr_child, h, n.k, s))
        if isinstance(n, Vis):
            return bind(h(n.event, s), Cont(_resume, h, n.k)).node
        raise TypeError(f"unexpected node {n!r}")

    return Tree(force, key=_compound("instr", key_of(h), t.key, key_of(s)))


def _reshape(xs):
    lr, s = xs
    if isinstance(lr, Inl):
        return ret(Inl((lr.value, s)))
    return ret(Inr((lr.value, s)))


def _instrumented_body(h, step, is_):
    i, s = is_
    return bind(instrument(h, step(i), s), _reshape)


def instrumented_step(h, step):
    """Loop body over (iterator, state) pairs equivalent to instrumenting the loop.

    ``iterate(instrumented_step(h, step), (i, s))`` behaves like
    ``instrument(h, iterate(step, i), s)`` up to Tau, but exposes the
    handler state to invariants and ranking functions.
    """
    return Cont(_instrumented_body, h, step)
