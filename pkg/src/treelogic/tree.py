"""Lazily unfolding process trees and their combinators.

A tree is a deferred node: Ret, Tau, Vis, Br or the distinguished STUCK
node. Children are produced on demand and memoized, so infinite trees
(loops) are cheap to build.

Every tree carries a structural ``key``. Two trees built the same way
from the same values get equal keys, which is what lets the explorer
recognise that a loop came back to a state it has already seen. The key
is ``None`` when some ingredient (for example a list value) is not
hashable; such trees can still be run, just not explored as graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .values import Inl, Inr

DEFAULT_FUEL = 64
DEFAULT_TAU_BUDGET = 64


class ZeroArity(ValueError):
    """A branch over zero alternatives was requested."""


class UnenumerableEvent(TypeError):
    """An event does not declare a finite response domain."""

    def __init__(self, event):
        super().__init__(f"event {event!r} has no finite response domain")
        self.event = event


def responses(event):
    """Finite, ordered list of the responses an event may receive."""
    dom = getattr(event, "responses", None)
    if dom is None:
        raise UnenumerableEvent(event)
    return tuple(dom)


# ---------------------------------------------------------------- keys

def key_of(obj):
    """Structural key of a tree, continuation or plain value (or None)."""
    if isinstance(obj, (Tree, Cont)):
        return obj.key
    try:
        hash(obj)
    except TypeError:
        return None
    # tagged so that None is a value, and 1 and True stay apart
    return ("=", type(obj).__name__, obj)


def _compound(*parts):
    return None if any(p is None for p in parts) else parts


class Cont:
    """A continuation ``x -> fn(*args, x)`` with structural equality.

    Plain lambdas only compare by identity, so a loop that rebuilds its
    continuation each iteration would never revisit a state. Wrapping the
    closure data in ``Cont`` keeps keys stable across iterations.
    """

    __slots__ = ("fn", "args", "key")

    def __init__(self, fn, *args):
        self.fn = fn
        self.args = args
        self.key = _compound("cont", key_of(fn), *(key_of(a) for a in args))

    def __call__(self, x):
        return self.fn(*self.args, x)

    def __eq__(self, other):
        return isinstance(other, Cont) and self.key is not None and self.key == other.key

    def __hash__(self):
        return hash(self.key) if self.key is not None else id(self)

    def __repr__(self):
        name = getattr(self.fn, "__qualname__", repr(self.fn))
        return f"Cont({name}{''.join(', ' + repr(a) for a in self.args)})"


# --------------------------------------------------------------- nodes

class Ret:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"Ret({self.value!r})"


class Tau:
    __slots__ = ("child",)

    def __init__(self, child):
        self.child = child

    def __repr__(self):
        return "Tau(...)"


class _Branching:
    __slots__ = ("k", "_memo")

    def __init__(self, k):
        self.k = k
        self._memo = {}

    def child(self, arg):
        """Subtree for a response or branch index, forced at most once."""
        try:
            return self._memo[arg]
        except KeyError:
            pass
        except TypeError:
            return self.k(arg)
        t = self.k(arg)
        return self._memo.setdefault(arg, t)


class Vis(_Branching):
    __slots__ = ("event",)

    def __init__(self, event, k):
        super().__init__(k)
        self.event = event

    def __repr__(self):
        return f"Vis({self.event!r}, ...)"


class Br(_Branching):
    __slots__ = ("arity",)

    def __init__(self, arity, k):
        super().__init__(k)
        self.arity = arity

    def __repr__(self):
        return f"Br({self.arity}, ...)"


class _StuckNode:
    __slots__ = ()

    def __repr__(self):
        return "Stuck"


STUCK = _StuckNode()


class Tree:
    """A deferred tree node. ``node`` forces (and caches) the head."""

    __slots__ = ("_force", "_node", "key")

    def __init__(self, force, key=None, node=None):
        self._force = force
        self._node = node
        self.key = key

    @property
    def node(self):
        n = self._node
        if n is None:
            n = self._force()
            # idempotent fill: a racing thread computes an equivalent node
            self._node = n
            self._force = None
        return n

    def __repr__(self):
        if self._node is None:
            return "Tree(<deferred>)"
        return f"Tree({self._node!r})"


# -------------------------------------------------------- constructors

def ret(x):
    return Tree(None, key=_compound("ret", key_of(x)), node=Ret(x))


_STUCK_TREE = Tree(None, key=("stuck",), node=STUCK)


def stuck():
    return _STUCK_TREE


def tau(t):
    return Tree(None, key=_compound("tau", t.key), node=Tau(t))


def vis(event, k):
    return Tree(lambda: Vis(event, k), key=_compound("vis", key_of(event), key_of(k)))


def br(n, k):
    if n == 0:
        return stuck()
    return Tree(lambda: Br(n, k), key=_compound("br", n, key_of(k)))


def trigger(event):
    return vis(event, ret)


def branch(n):
    if n < 1:
        raise ZeroArity("branch needs at least one alternative")
    return br(n, ret)


def _pick(left, right, i):
    return left if i == 0 else right


def choice(left, right):
    """Binary nondeterministic choice between two trees."""
    return br(2, Cont(_pick, left, right))


def _bind_k(inner, k, x):
    return bind(inner(x), k)


def bind(t, k):
    """Sequence ``t`` with continuation ``k`` applied to its return value."""

    def force():
        n = t.node
        if isinstance(n, Ret):
            return k(n.value).node
        if n is STUCK:
            return STUCK
        if isinstance(n, Tau):
            return Tau(bind(n.child, k))
        if isinstance(n, Vis):
            return Vis(n.event, Cont(_bind_k, n.k, k))
        return Br(n.arity, Cont(_bind_k, n.k, k))

    return Tree(force, key=_compound("bind", t.key, key_of(k)))


def _iter_k(step, lr):
    if isinstance(lr, Inl):
        return tau(iterate(step, lr.value))
    if isinstance(lr, Inr):
        return ret(lr.value)
    raise TypeError(f"loop body must return inl/inr, got {lr!r}")


def iterate(step, i):
    """Run ``step`` from ``i`` until it returns ``inr``; each repeat is Tau-guarded."""
    return Tree(lambda: bind(step(i), Cont(_iter_k, step)).node,
                key=_compound("iter", key_of(step), key_of(i)))


def _const(value, _):
    return ret(value)


def then(t, u):
    """``t ;; u``: run t, discard its value, continue with u."""
    return bind(t, Cont(_then_k, u))


def _then_k(u, _):
    return u


def fmap(t, fn):
    return bind(t, Cont(_fmap_k, fn))


def _fmap_k(fn, x):
    return ret(fn(x))


def strip_taus(t, budget):
    """Head node after skipping up to ``budget`` Taus, or None if exhausted."""
    for _ in range(budget + 1):
        n = t.node
        if not isinstance(n, Tau):
            return n, t
        t = n.child
    return None, t


# -------------------------------------------------------- equivalence

@dataclass(frozen=True)
class Equivalent:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class Distinguished:
    witness: tuple = field(default=())

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str = "fuel exhausted"

    def __bool__(self):
        return False


def _describe(n):
    if n is STUCK:
        return "stuck"
    if isinstance(n, Ret):
        return f"ret {n.value!r}"
    if isinstance(n, Vis):
        return f"vis {n.event!r}"
    return f"br {n.arity}"


def bisim_upto_tau(t, u, fuel=DEFAULT_FUEL, tau_budget=DEFAULT_TAU_BUDGET):
    """Bounded up-to-tau bisimulation check.

    Leading Taus are stripped on both sides, then heads are compared and
    children explored up to ``fuel`` levels. Pairs of keyed trees already
    under comparison are assumed related, which closes cycles.
    """
    if fuel < 0 or tau_budget < 0:
        raise ValueError("fuel and tau_budget must be non-negative")
    seen = set()

    def go(a, b, fuel, path):
        pair = (a.key, b.key) if a.key is not None and b.key is not None else None
        if pair is not None and pair in seen:
            return Equivalent()
        na, a = strip_taus(a, tau_budget)
        nb, b = strip_taus(b, tau_budget)
        if na is None or nb is None:
            return Unknown("tau budget exhausted")
        if na is STUCK or nb is STUCK:
            if na is nb:
                return Equivalent()
            return Distinguished(path + (f"{_describe(na)} vs {_describe(nb)}",))
        if type(na) is not type(nb):
            return Distinguished(path + (f"{_describe(na)} vs {_describe(nb)}",))
        if isinstance(na, Ret):
            if na.value == nb.value:
                return Equivalent()
            return Distinguished(path + (f"{_describe(na)} vs {_describe(nb)}",))
        if isinstance(na, Vis):
            if na.event != nb.event:
                return Distinguished(path + (f"{_describe(na)} vs {_describe(nb)}",))
            labels = [(v, f"vis {na.event!r} -> {v!r}") for v in responses(na.event)]
        else:
            if na.arity != nb.arity:
                return Distinguished(path + (f"{_describe(na)} vs {_describe(nb)}",))
            labels = [(i, f"br {na.arity} -> {i}") for i in range(na.arity)]
        if fuel == 0:
            return Unknown()
        if pair is not None:
            seen.add(pair)
        unknown = None
        for arg, label in labels:
            r = go(na.child(arg), nb.child(arg), fuel - 1, path + (label,))
            if isinstance(r, Distinguished):
                return r
            if isinstance(r, Unknown):
                unknown = r
        return unknown if unknown is not None else Equivalent()

    return go(t, u, fuel, ())
