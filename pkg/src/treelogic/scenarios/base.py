"""Scenario bundles: a tree to check, where to start, and how to prove it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..logic.syntax import Vocabulary
from ..tree import Tree


class BadParams(ValueError):
    pass


class UnknownMutation(KeyError):
    pass


class UnknownRule(KeyError):
    pass


# the hand-written invariant and ranking each scenario ships with
STANDARD = "standard"
_ID_ALIASES = {"paper": STANDARD}


def resolve_id(given):
    """Canonical name of a bundled invariant or ranking id."""
    return _ID_ALIASES.get(given, given)


@dataclass
class Bundle:
    """Everything needed to check or prove one scenario instance.

    ``provers`` maps a rule name to a function ``(bundle, **options) ->
    Certificate`` reproducing the hand proof with the bundled invariant
    and ranking function.
    """

    scenario: str
    params: dict
    tree: Tree
    world: object
    vocab: Vocabulary
    formulas: dict
    fingerprint: Callable | None = None
    provers: dict = field(default_factory=dict)
    rule_inputs: dict = field(default_factory=dict)
    expected: str | None = None

    @property
    def goal(self):
        return self.formulas["goal"]

    def prove(self, rule=None, **options):
        if not self.provers:
            raise UnknownRule(f"{self.scenario} has no bundled proofs")
        rule = rule or next(iter(self.provers))
        try:
            prover = self.provers[rule]
        except KeyError:
            raise UnknownRule(f"{self.scenario}: unknown rule {rule!r}; "
                              f"choose from {', '.join(self.provers)}") from None
        return prover(self, **options)
