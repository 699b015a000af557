"""Two processes sharing a security-labelled heap under a nondeterministic scheduler.

alice (high) writes odd cells, bob (low) reads even cells. Every read of
a present cell logs ``(cell label, instruction label)``; confidentiality
is ``AG obs(lm <= li)``. The loop counter wraps at ``bound`` so the state
space is finite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum

from ..instrument import Log, UnhandledEvent, instrument, instrumented_step, log
from ..kripke import Obs
from ..logic.syntax import Vocabulary, parse_formula
from ..rules import apply_iter_ag
from ..tree import Cont, choice, iterate, ret, then, trigger
from ..values import FMap, Inl
from .base import STANDARD, BadParams, Bundle, resolve_id


class Label(IntEnum):
    L = 0
    H = 1

    def __repr__(self):
        return self.name


L, H = Label.L, Label.H


@dataclass(frozen=True)
class Read:
    label: Label
    addr: int
    # responses are heap values; only meaningful after instrumentation
    responses = None


@dataclass(frozen=True)
class Write:
    label: Label
    addr: int
    value: int
    responses = (None,)


def heap_handler(e, m):
    if isinstance(e, Read):
        cell = m.get(e.addr)
        if cell is None:
            return ret((0, m))
        lm, v = cell
        return then(log((lm, e.label)), ret((v, m)))
    if isinstance(e, Write):
        # the written cell takes the writer's label
        return ret((None, m.set(e.addr, (e.label, e.value))))
    raise UnhandledEvent(e)


def alice(x, i, leak=False):
    if leak:
        return trigger(Write(H, i if i % 2 == 0 else i + 1, x))
    return trigger(Write(H, i + 1 if i % 2 == 0 else i, x))


def bob(i):
    return trigger(Read(L, i if i % 2 == 0 else i + 1))


def _round(x, bound, leak, i):
    return then(choice(alice(x, i, leak), bob(i)), ret(Inl((i + 1) % bound)))


def scheduler(x, bound, leak=False):
    return Cont(_round, x, bound, leak)


def noleak(m, top):
    """Every even cell up to ``top`` holds a low-labelled value."""
    return all(i in m and m[i][0] == L for i in range(0, top + 1, 2))


def random_heap(rng, top=8, values=4):
    """A heap with low even cells and random odd cells."""
    cells = {}
    for i in range(top + 1):
        if i % 2 == 0:
            cells[i] = (L, rng.randrange(values))
        elif rng.random() < 0.6:
            cells[i] = (rng.choice([L, H]), rng.randrange(values))
    return FMap(cells)


def default_heap(top=8):
    return random_heap(random.Random(0), top)


def parse_heap(text):
    """``addr:label:value`` items separated by commas, e.g. ``0:L:5,1:H:3``."""
    cells = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            a, lab, v = item.split(":")
            cells[int(a)] = (Label[lab.strip().upper()], int(v))
        except (ValueError, KeyError):
            raise BadParams(f"bad heap cell {item!r}; expected addr:L|H:value") from None
    return FMap(cells)


VOCAB = Vocabulary(observe=lambda o: {"lm": int(o[0]), "li": int(o[1])},
                   constants={"L": int(L), "H": int(H)})


def build(leak=False, **params):
    bound = int(params.get("bound", 8))
    x = int(params.get("x", 7))
    if bound < 1:
        raise BadParams("bound must be positive")
    top = bound if bound % 2 == 0 else bound + 1
    heap = params.get("heap")
    if heap is None:
        heap = default_heap(top)
    elif isinstance(heap, str):
        heap = parse_heap(heap)
    else:
        heap = FMap(heap)
    world = Obs(Log((L, L)), None)
    body = scheduler(x, bound, leak)
    step = instrumented_step(heap_handler, body)

    def R(i, w):
        if not isinstance(w, Obs) or not isinstance(w.event, Log):
            return False
        lm, li = w.event.observation
        return lm <= li and noleak(i[1], top)

    goal = parse_formula("AG obs(lm <= li)", vocab=VOCAB)
    return Bundle(
        scenario="secure-mem-leak" if leak else "secure-mem",
        params={"bound": bound, "x": x, "heap": heap},
        tree=instrument(heap_handler, iterate(body, 0), heap),
        world=world,
        vocab=VOCAB,
        formulas={"goal": goal},
        provers={"iter-ag": _prove_iter_ag},
        rule_inputs={"step": step, "i0": (0, heap), "R": R},
        expected="fails" if leak else None,
    )


def _prove_iter_ag(b, limits=None, invariant_id=STANDARD, ranking_id=STANDARD, **_):
    _known_ids(invariant_id, ranking_id)
    ri = b.rule_inputs
    return apply_iter_ag(ri["step"], ri["i0"], b.world, b.goal.body, ri["R"], limits=limits)


def _known_ids(invariant_id, ranking_id):
    for kind, given in (("invariant", invariant_id), ("ranking", ranking_id)):
        if resolve_id(given) != STANDARD:
            raise BadParams(f"unknown {kind} {given!r}; this scenario bundles only {STANDARD!r}")
