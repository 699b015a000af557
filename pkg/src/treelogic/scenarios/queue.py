"""Round-robin scheduling over a queue of thread ids.

The program loops forever popping the head and pushing it back. Popping
logs the popped element, so a fair schedule is ``AG AF obs(head == x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..instrument import UnhandledEvent, instrument, instrumented_step, log
from ..kripke import Pure, not_done
from ..logic.formula import top
from ..logic.syntax import Vocabulary, parse_formula
from ..rules import apply_iter_ag, apply_iter_au_l
from ..tree import Cont, bind, iterate, ret, stuck, then, trigger
from ..values import Inl
from .base import STANDARD, BadParams, Bundle, resolve_id


@dataclass(frozen=True)
class Push:
    item: int
    responses = (None,)


@dataclass(frozen=True)
class Pop:
    # responses are queue elements; only meaningful after instrumentation
    responses = None


POP = Pop()


def queue_handler(e, q):
    if isinstance(e, Push):
        return ret((None, q + (e.item,)))
    if isinstance(e, Pop):
        if not q:
            return stuck()
        return then(log(q[0]), ret((q[0], q[1:])))
    raise UnhandledEvent(e)


def _push_back(h):
    return then(trigger(Push(h)), ret(Inl(None)))


def _drop(h):
    return ret(Inl(None))


def _rr_body(push_back, _):
    return bind(trigger(POP), _push_back if push_back else _drop)


def rr_body(push_back=True):
    return Cont(_rr_body, push_back)


VOCAB = Vocabulary(observe=lambda h: {"head": h})


def _queue(params):
    q = params.get("q", (1, 2, 3))
    try:
        q = tuple(int(x) for x in q)
    except (TypeError, ValueError):
        raise BadParams(f"queue must be a list of naturals, got {q!r}") from None
    if any(x < 0 for x in q):
        raise BadParams("queue elements must be naturals")
    target = params.get("target")
    if target is None:
        if not q:
            raise BadParams("empty queue and no target")
        target = q[-1]
    target = int(target)
    if target not in q:
        q = q + (target,)
    return q, target


def build(push_back=True, **params):
    q, target = _queue(params)
    body = rr_body(push_back)
    step = instrumented_step(queue_handler, body)

    def R(i, w):
        return not_done(w) and target in i[1]

    def f(i, w):
        return i[1].index(target)

    goal = parse_formula(f"AG AF obs(head == {target})", vocab=VOCAB)
    eventually = parse_formula(f"obs(head == {target})", vocab=VOCAB)
    return Bundle(
        scenario="rr" if push_back else "rr-no-push",
        params={"q": q, "target": target},
        tree=instrument(queue_handler, iterate(body, None), q),
        world=Pure,
        vocab=VOCAB,
        formulas={"goal": goal, "eventually": eventually},
        provers={"iter-ag": _prove_iter_ag, "iter-au-l": _prove_iter_au_l},
        rule_inputs={"step": step, "i0": (None, q), "R": R, "f": f},
        expected=None if push_back else "fails",
    )


def _prove_iter_au_l(b, limits=None, invariant_id=STANDARD, ranking_id=STANDARD, **_):
    _known_ids(invariant_id, ranking_id)
    ri = b.rule_inputs
    return apply_iter_au_l(ri["step"], ri["i0"], b.world, top, b.formulas["eventually"],
                           ri["R"], ri["f"], limits=limits)


def _prove_iter_ag(b, limits=None, invariant_id=STANDARD, ranking_id=STANDARD, **_):
    _known_ids(invariant_id, ranking_id)
    ri = b.rule_inputs

    def inner(i, w):
        return apply_iter_au_l(ri["step"], i, w, top, b.formulas["eventually"], ri["R"], ri["f"],
                               limits=limits, oracle=False)

    return apply_iter_ag(ri["step"], ri["i0"], b.world, b.goal.body, ri["R"], limits=limits,
                         inner=inner)


def _known_ids(invariant_id, ranking_id):
    for kind, given in (("invariant", invariant_id), ("ranking", ranking_id)):
        if resolve_id(given) != STANDARD:
            raise BadParams(f"unknown {kind} {given!r}; this scenario bundles only {STANDARD!r}")
