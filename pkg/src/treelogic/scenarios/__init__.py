"""Registry of bundled scenarios and their known-violating mutations."""

from __future__ import annotations

from ..logic.formula import AG, top
from ..logic.syntax import Vocabulary
from ..kripke import Pure
from ..tree import iterate, ret
from ..values import Inl
from . import election, queue, securemem
from .base import BadParams, Bundle, UnknownMutation, UnknownRule


def _spin(i):
    return ret(Inl(i))


def _diverge(**params):
    """A loop that never leaves its silent steps."""
    return Bundle(scenario="diverge", params={}, tree=iterate(_spin, 0), world=Pure,
                  vocab=Vocabulary(), formulas={"goal": AG(top)})


SCENARIOS = {
    "rr": lambda **p: queue.build(push_back=True, **p),
    "rr-no-push": lambda **p: queue.build(push_back=False, **p),
    "secure-mem": lambda **p: securemem.build(leak=False, **p),
    "secure-mem-leak": lambda **p: securemem.build(leak=True, **p),
    "election": lambda **p: election.build(hops=1, **p),
    "election-skip": lambda **p: election.build(hops=2, **p),
    "election-self": lambda **p: election.build(hops=0, **p),
    "diverge": _diverge,
}

MUTATIONS = {
    ("rr", "no-push"): "rr-no-push",
    ("secure-mem", "leak"): "secure-mem-leak",
    ("election", "skip"): "election-skip",
    ("election", "self-send"): "election-self",
}


class UnknownScenario(KeyError):
    pass


def build(scenario_id, **params):
    try:
        make = SCENARIOS[scenario_id]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {scenario_id!r}; "
                              f"choose from {', '.join(SCENARIOS)}") from None
    return make(**params)


def mutate(scenario_id, mutation_id, **params):
    try:
        target = MUTATIONS[(scenario_id, mutation_id)]
    except KeyError:
        known = ", ".join(f"{s}/{m}" for s, m in MUTATIONS)
        raise UnknownMutation(f"no mutation {mutation_id!r} for {scenario_id!r}; known: {known}") from None
    return build(target, **params)


__all__ = ["BadParams", "Bundle", "UnknownMutation", "UnknownRule", "UnknownScenario",
           "SCENARIOS", "MUTATIONS", "build", "mutate", "election", "queue", "securemem"]
