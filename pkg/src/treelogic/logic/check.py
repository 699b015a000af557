"""Formula checking: exact fixpoints on explored graphs and a bounded fallback."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..kripke import done_with, not_done, successors
from ..tree import DEFAULT_TAU_BUDGET
from .formula import AG, AN, AU, EG, EN, EU, And, Done, Now, Or, Formula, to_text
from .graph import KripkeGraph, explore, fingerprint_digest

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


@dataclass(frozen=True)
class TraceStep:
    fingerprint: object
    world: object
    tree: object = field(default=None, compare=False)
    state: int | None = None


@dataclass
class Verdict:
    status: str
    formula: str = ""
    trace: tuple = ()
    lasso_index: int | None = None
    depth: int | None = None

    @property
    def holds(self):
        return self.status == HOLDS

    @property
    def fails(self):
        return self.status == FAILS

    @property
    def unknown(self):
        return self.status == UNKNOWN

    def to_json(self):
        out = {
            "verdict": self.status,
            "formula": self.formula,
            "trace": [{"state": s.state, "fingerprint": fingerprint_digest(s.fingerprint),
                       "world": repr(s.world)} for s in self.trace],
        }
        if self.lasso_index is not None:
            out["lasso_index"] = self.lasso_index
        if self.depth is not None:
            out["depth"] = self.depth
        return out


# ------------------------------------------------------------ finite

class FiniteCheck:
    """Truth assignments of every subformula on one explored graph."""

    def __init__(self, graph: KripkeGraph):
        self.g = graph
        self._truth = {}
        self._rank = {}

    def truth(self, f):
        t = self._truth.get(f)
        if t is None:
            t = self._truth[f] = self._eval(f)
        return t

    def _eval(self, f):
        g = self.g
        n = len(g.states)
        if isinstance(f, Now):
            return [not_done(st.world) and bool(f.pred(st.world)) for st in g.states]
        if isinstance(f, Done):
            return [done_with(f.pred, st.world) for st in g.states]
        if isinstance(f, And):
            a, b = self.truth(f.left), self.truth(f.right)
            return [x and y for x, y in zip(a, b)]
        if isinstance(f, Or):
            a, b = self.truth(f.left), self.truth(f.right)
            return [x or y for x, y in zip(a, b)]
        if isinstance(f, AN):
            p, q = self.truth(f.left), self.truth(f.right)
            return [p[s] and bool(g.succ[s]) and all(q[t] for t in g.succ[s]) for s in range(n)]
        if isinstance(f, EN):
            p, q = self.truth(f.left), self.truth(f.right)
            return [p[s] and any(q[t] for t in g.succ[s]) for s in range(n)]
        if isinstance(f, AU):
            return self._au(self.truth(f.left), self.truth(f.right))
        if isinstance(f, EU):
            return self._eu(self.truth(f.left), self.truth(f.right))
        if isinstance(f, AG):
            x, rank = self._ag(self.truth(f.body))
            self._rank[f] = rank
            return x
        if isinstance(f, EG):
            return self._eg(self.truth(f.body))
        raise TypeError(f"cannot check {f!r}")

    # least fixpoint of X = q \/ (p /\ can_step /\ all succ in X)
    def _au(self, p, q):
        g = self.g
        x = list(q)
        missing = [len(ts) for ts in g.succ]
        queue = deque(s for s in range(len(x)) if x[s])
        while queue:
            t = queue.popleft()
            for s in g.pred[t]:
                if not x[s] and p[s]:
                    missing[s] -= 1
                    if missing[s] == 0:
                        x[s] = True
                        queue.append(s)
        return x

    # least fixpoint of X = q \/ (p /\ some succ in X)
    def _eu(self, p, q):
        g = self.g
        x = list(q)
        queue = deque(s for s in range(len(x)) if x[s])
        while queue:
            t = queue.popleft()
            for s in g.pred[t]:
                if not x[s] and p[s]:
                    x[s] = True
                    queue.append(s)
        return x

    # greatest fixpoint of X = p /\ can_step /\ all succ in X, via its complement;
    # rank = distance to a state where p or can_step fails
    def _ag(self, p):
        g = self.g
        rank = [None] * len(p)
        queue = deque()
        for s in range(len(p)):
            if not (p[s] and g.succ[s]):
                rank[s] = 0
                queue.append(s)
        while queue:
            t = queue.popleft()
            for s in g.pred[t]:
                if rank[s] is None:
                    rank[s] = rank[t] + 1
                    queue.append(s)
        return [r is None for r in rank], rank

    # greatest fixpoint of X = p /\ some succ in X
    def _eg(self, p):
        g = self.g
        x = [p[s] and bool(g.succ[s]) for s in range(len(p))]
        live = [sum(1 for t in g.succ[s] if x[t]) for s in range(len(p))]
        queue = deque(s for s in range(len(p)) if x[s] and live[s] == 0)
        while queue:
            s = queue.popleft()
            if not x[s]:
                continue
            x[s] = False
            for u in g.pred[s]:
                if x[u]:
                    live[u] -= 1
                    if live[u] == 0:
                        queue.append(u)
        return x

    # -------------------------------------------------- counterexamples

    def refute(self, f, s):
        """A path from ``s`` explaining why ``f`` is false there.

        Returns (state ids, lasso index or None).
        """
        g = self.g
        if isinstance(f, (Now, Done)):
            return [s], None
        if isinstance(f, And):
            sub = f.left if not self.truth(f.left)[s] else f.right
            return self.refute(sub, s)
        if isinstance(f, Or):
            return self.refute(f.left, s)
        if isinstance(f, (EN, EU, EG)):
            left = f.body if isinstance(f, EG) else f.left
            if not self.truth(left)[s]:
                return self.refute(left, s)
            return [s], None
        if isinstance(f, AN):
            if not self.truth(f.left)[s]:
                return self.refute(f.left, s)
            if not g.succ[s]:
                return [s], None
            q = self.truth(f.right)
            t = next(t for t in g.succ[s] if not q[t])
            return _prepend(s, self.refute(f.right, t))
        if isinstance(f, AU):
            return self._refute_au(f, s)
        if isinstance(f, AG):
            self.truth(f)
            rank = self._rank[f]
            path = [s]
            while rank[path[-1]] > 0:
                cur = path[-1]
                path.append(next(t for t in g.succ[cur] if rank[t] == rank[cur] - 1))
            end = path[-1]
            if not self.truth(f.body)[end]:
                tail, lasso = self.refute(f.body, end)
                return path[:-1] + tail, _shift(lasso, len(path) - 1)
            return path, None
        raise TypeError(f"cannot refute {f!r}")

    def _refute_au(self, f, s):
        g = self.g
        x, p = self.truth(f), self.truth(f.left)
        path, seen = [], {}
        cur = s
        while True:
            seen[cur] = len(path)
            path.append(cur)
            if not p[cur]:
                tail, lasso = self.refute(f.left, cur)
                return path[:-1] + tail, _shift(lasso, len(path) - 1)
            if not g.succ[cur]:
                return path, None
            bad = [t for t in g.succ[cur] if not x[t]]
            fresh = [t for t in bad if t not in seen]
            if not fresh:
                return path + [bad[0]], seen[bad[0]]
            cur = fresh[0]


def _shift(lasso, k):
    return None if lasso is None else lasso + k


def _prepend(s, res):
    path, lasso = res
    return [s] + path, _shift(lasso, 1)


def check_finite(g: KripkeGraph, f: Formula):
    """Per-state truth of ``f`` and the verdict at the root."""
    fc = FiniteCheck(g)
    truth = fc.truth(f)
    return FiniteResult(truth, _graph_verdict(fc, f, g.root))


@dataclass
class FiniteResult:
    truth: list
    verdict: Verdict

    @property
    def holds(self):
        return self.verdict.holds


def _graph_verdict(fc, f, s):
    g = fc.g
    if fc.truth(f)[s]:
        return Verdict(HOLDS, to_text(f))
    path, lasso = fc.refute(f, s)
    trace = tuple(TraceStep(g.states[i].fingerprint, g.states[i].world, g.states[i].tree, i)
                  for i in path)
    return Verdict(FAILS, to_text(f), trace, lasso)


def check(t, w, f, limits=None, fingerprint=None):
    """Explore from ``(t, w)`` and decide ``f`` exactly at the root."""
    g = explore(t, w, fingerprint, limits)
    return check_finite(g, f).verdict


# ----------------------------------------------------------- bounded

def _kand(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def _kor(a, b):
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _kall(vals):
    out = True
    for v in vals:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _kany(vals):
    out = False
    for v in vals:
        if v is True:
            return True
        if v is None:
            out = None
    return out


class BoundedCheck:
    """Three-valued evaluation where every temporal step spends one unit of depth."""

    def __init__(self, tau_budget=DEFAULT_TAU_BUDGET):
        self.tau_budget = tau_budget
        self._memo = {}
        self._succ = {}

    def successors(self, t, w):
        key = (t.key, w) if t.key is not None else None
        if key is None:
            return successors(t, w, self.tau_budget)
        out = self._succ.get(key)
        if out is None:
            out = self._succ[key] = successors(t, w, self.tau_budget)
        return out

    def eval(self, f, t, w, d):
        key = (f, t.key, w, d) if t.key is not None else None
        if key is not None and key in self._memo:
            return self._memo[key]
        r = self._eval(f, t, w, d)
        if key is not None:
            self._memo[key] = r
        return r

    def _eval(self, f, t, w, d):
        if isinstance(f, Now):
            return not_done(w) and bool(f.pred(w))
        if isinstance(f, Done):
            return done_with(f.pred, w)
        if isinstance(f, And):
            a = self.eval(f.left, t, w, d)
            return False if a is False else _kand(a, self.eval(f.right, t, w, d))
        if isinstance(f, Or):
            a = self.eval(f.left, t, w, d)
            return True if a is True else _kor(a, self.eval(f.right, t, w, d))
        if isinstance(f, (AN, EN, AG, EG)):
            left = f.body if isinstance(f, (AG, EG)) else f.left
            nxt = f if isinstance(f, (AG, EG)) else f.right
            universal = isinstance(f, (AN, AG))
            return self._next(universal, left, nxt, t, w, d)
        if isinstance(f, (AU, EU)):
            q = self.eval(f.right, t, w, d)
            if q is True:
                return True
            return _kor(q, self._next(isinstance(f, AU), f.left, f, t, w, d))
        raise TypeError(f"cannot check {f!r}")

    def _next(self, universal, left, nxt, t, w, d):
        p = self.eval(left, t, w, d)
        if p is False:
            return False
        succ = self.successors(t, w)
        if not succ:
            return False
        if d == 0:
            return None
        vals = (self.eval(nxt, t2, w2, d - 1) for t2, w2 in succ)
        return _kand(p, _kall(vals) if universal else _kany(vals))

    def refute(self, f, t, w, d):
        """Path of (tree, world) pairs explaining a False evaluation."""
        if isinstance(f, (Now, Done)):
            return [(t, w)]
        if isinstance(f, And):
            sub = f.left if self.eval(f.left, t, w, d) is False else f.right
            return self.refute(sub, t, w, d)
        if isinstance(f, Or):
            return self.refute(f.left, t, w, d)
        left = f.body if isinstance(f, (AG, EG)) else f.left
        if self.eval(left, t, w, d) is False:
            return self.refute(left, t, w, d)
        succ = self.successors(t, w)
        if not succ or isinstance(f, (EN, EU, EG)):
            return [(t, w)]
        nxt = f.right if isinstance(f, AN) else f
        for t2, w2 in succ:
            if self.eval(nxt, t2, w2, d - 1) is False:
                return [(t, w)] + self.refute(nxt, t2, w2, d - 1)
        raise AssertionError("no refuting successor")


def check_bounded(t, w, f, depth, tau_budget=DEFAULT_TAU_BUDGET):
    """Sound three-valued verdict exploring at most ``depth`` transitions."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    bc = BoundedCheck(tau_budget)
    r = bc.eval(f, t, w, depth)
    text = to_text(f)
    if r is True:
        return Verdict(HOLDS, text, depth=depth)
    if r is None:
        return Verdict(UNKNOWN, text, depth=depth)
    path = bc.refute(f, t, w, depth)
    trace = tuple(TraceStep((tt.key, ww), ww, tt) for tt, ww in path)
    return Verdict(FAILS, text, trace, depth=depth)
