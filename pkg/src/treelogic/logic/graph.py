"""Finite exploration of the (tree, world) transition system."""

from __future__ import annotations

import hashlib
import types
from collections import deque
from dataclasses import dataclass

from ..kripke import is_done, not_done, successors, world_kind
from ..tree import DEFAULT_TAU_BUDGET, Cont, Tree

DEFAULT_MAX_STATES = 50_000


class StateBudgetExceeded(RuntimeError):
    def __init__(self, limit):
        super().__init__(f"exploration exceeded {limit} states")
        self.limit = limit


class UnkeyedState(TypeError):
    """A reachable tree has no structural key and no fingerprint was supplied."""


@dataclass(frozen=True)
class Limits:
    max_states: int = DEFAULT_MAX_STATES
    tau_budget: int = DEFAULT_TAU_BUDGET


@dataclass
class State:
    fingerprint: object
    tree: Tree | None
    world: object

    @property
    def done(self):
        return is_done(self.world)


def default_fingerprint(tree, world):
    if tree.key is None:
        raise UnkeyedState("tree has no structural key; pass a fingerprint function")
    return (tree.key, world)


class KripkeGraph:
    """Explored states with deduplicated successor lists. State 0 is the root."""

    def __init__(self, states, succ, root=0):
        self.states = states
        self.succ = succ
        self.root = root
        self._pred = None

    @classmethod
    def from_worlds(cls, worlds, succ, root=0):
        """Graph without trees, for testing the checker on synthetic structures."""
        states = [State(i, None, w) for i, w in enumerate(worlds)]
        return cls(states, [list(dict.fromkeys(s)) for s in succ], root)

    def __len__(self):
        return len(self.states)

    @property
    def num_edges(self):
        return sum(len(s) for s in self.succ)

    @property
    def pred(self):
        if self._pred is None:
            pred = [[] for _ in self.states]
            for s, ts in enumerate(self.succ):
                for t in ts:
                    pred[t].append(s)
            self._pred = pred
        return self._pred

    def index(self, fingerprint):
        for i, st in enumerate(self.states):
            if st.fingerprint == fingerprint:
                return i
        raise KeyError(fingerprint)

    def shortest_distances(self):
        """BFS distances from the root (unreachable states are absent)."""
        dist = {self.root: 0}
        queue = deque([self.root])
        while queue:
            s = queue.popleft()
            for t in self.succ[s]:
                if t not in dist:
                    dist[t] = dist[s] + 1
                    queue.append(t)
        return dist


def explore(t, w0, fingerprint=None, limits=None, *, max_states=None, tau_budget=None):
    """Breadth-first exploration from ``(t, w0)`` deduplicating by fingerprint."""
    limits = limits or Limits()
    max_states = max_states if max_states is not None else limits.max_states
    tau_budget = tau_budget if tau_budget is not None else limits.tau_budget
    fp = fingerprint or default_fingerprint
    index = {}
    states, succ = [], []

    def intern(tree, world):
        key = fp(tree, world)
        i = index.get(key)
        if i is None:
            if len(states) >= max_states:
                raise StateBudgetExceeded(max_states)
            i = index[key] = len(states)
            states.append(State(key, tree, world))
            succ.append(None)
            queue.append(i)
        return i

    queue = deque()
    intern(t, w0)
    while queue:
        i = queue.popleft()
        st = states[i]
        out = [intern(t2, w2) for t2, w2 in successors(st.tree, st.world, tau_budget)]
        succ[i] = list(dict.fromkeys(out))
    return KripkeGraph(states, succ, 0)


# ------------------------------------------------------------ rendering

def _stable(obj):
    """Process-independent text for a fingerprint (no memory addresses)."""
    if isinstance(obj, tuple):
        return "(" + ",".join(_stable(o) for o in obj) + ")"
    if isinstance(obj, (types.FunctionType, types.BuiltinFunctionType, type)):
        return f"{obj.__module__}.{obj.__qualname__}"
    if isinstance(obj, types.MethodType):
        return f"{_stable(obj.__self__)}.{obj.__func__.__qualname__}"
    if isinstance(obj, Cont):
        return _stable(obj.key)
    return repr(obj)


def fingerprint_digest(fp):
    return hashlib.sha1(_stable(fp).encode()).hexdigest()[:16]


def to_dot(g, truth=None, name="kripke"):
    """Graphviz rendering; ``truth`` (per-state booleans) colours the nodes."""
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for i, st in enumerate(g.states):
        label = f"s{i}: {world_kind(st.world)}"
        if st.world is not None and world_kind(st.world) != "Pure":
            label += f"\\n{st.world!r}".replace('"', "'")
        attrs = [f'label="{label}"']
        if truth is not None:
            attrs.append(f'color="{"darkgreen" if truth[i] else "red"}"')
            attrs[0] = attrs[0][:-1] + f'\\n[{"T" if truth[i] else "F"}]"'
        if i == g.root:
            attrs.append("penwidth=2")
        if not not_done(st.world) or not g.succ[i]:
            attrs.append("style=dashed")
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    for i, ts in enumerate(g.succ):
        for t in ts:
            lines.append(f"  s{i} -> s{t};")
    lines.append("}")
    return "\n".join(lines) + "\n"
