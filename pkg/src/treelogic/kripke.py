"""Worlds and the one-step transition relation over (tree, world) pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .tree import (DEFAULT_TAU_BUDGET, STUCK, Br, Ret, Tree, Vis, bind, responses,
                   stuck, strip_taus)


class TauBudgetExceeded(RuntimeError):
    """More consecutive Taus than allowed: the tree may diverge silently."""

    def __init__(self, budget):
        super().__init__(f"more than {budget} consecutive silent steps (possible silent divergence)")
        self.budget = budget


class _PureWorld:
    __slots__ = ()

    def __repr__(self):
        return "Pure"

    def __reduce__(self):
        return (_pure, ())


def _pure():
    return Pure


Pure = _PureWorld()


@dataclass(frozen=True)
class Obs:
    event: object
    response: object = None

    def __repr__(self):
        return f"Obs({self.event!r}, {self.response!r})"


@dataclass(frozen=True)
class Val:
    value: object

    def __repr__(self):
        return f"Val({self.value!r})"


@dataclass(frozen=True)
class Finish:
    event: object
    response: object
    value: object

    def __repr__(self):
        return f"Finish({self.event!r}, {self.response!r}, {self.value!r})"


def not_done(w):
    return w is Pure or isinstance(w, Obs)


def is_done(w):
    return isinstance(w, (Val, Finish))


def resumed_world(w):
    """The world a continuation starts from after a done world.

    Val x resumes in Pure; Finish e v x resumes in Obs e v.
    """
    if isinstance(w, Val):
        return Pure
    if isinstance(w, Finish):
        return Obs(w.event, w.response)
    raise ValueError(f"{w!r} is not a done world")


def done_value(w):
    if not is_done(w):
        raise ValueError(f"{w!r} is not a done world")
    return w.value


def done_with(pred, w):
    """Postcondition ``pred(value, resumed_world)`` on a done world."""
    if not is_done(w):
        return False
    return bool(pred(w.value, resumed_world(w)))


def world_kind(w):
    if w is Pure:
        return "Pure"
    return type(w).__name__


class Successor(NamedTuple):
    tree: Tree
    world: object


def successors(t, w, tau_budget=DEFAULT_TAU_BUDGET):
    """All one-step successors of ``t`` in world ``w``, in deterministic order."""
    if not not_done(w):
        return []
    n, _ = strip_taus(t, tau_budget)
    if n is None:
        raise TauBudgetExceeded(tau_budget)
    if n is STUCK:
        return []
    if isinstance(n, Ret):
        if w is Pure:
            return [Successor(stuck(), Val(n.value))]
        return [Successor(stuck(), Finish(w.event, w.response, n.value))]
    if isinstance(n, Br):
        return [Successor(n.child(i), w) for i in range(n.arity)]
    if isinstance(n, Vis):
        return [Successor(n.child(v), Obs(n.event, v)) for v in responses(n.event)]
    raise TypeError(f"unexpected node {n!r}")


def can_step(t, w, tau_budget=DEFAULT_TAU_BUDGET):
    return bool(successors(t, w, tau_budget))


def bind_successors(t, k, w, tau_budget=DEFAULT_TAU_BUDGET):
    """Successors of ``bind(t, k)`` assembled from the three bind-transition rules.

    Used as an independent reference for ``successors(bind(t, k), w)``.
    """
    out = []
    for t2, w2 in successors(t, w, tau_budget):
        if not_done(w2):
            out.append(Successor(bind(t2, k), w2))
        else:
            out.extend(successors(k(w2.value), w, tau_budget))
    return out
