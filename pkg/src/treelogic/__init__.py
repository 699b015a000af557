"""Process trees with event instrumentation, a temporal-logic checker over
their Kripke semantics, and structural proof rules discharged by checking."""

from .instrument import Log, UnhandledEvent, instrument, instrumented_step, log
from .kripke import (Finish, Obs, Pure, Successor, TauBudgetExceeded, Val, can_step,
                     done_with, is_done, not_done, successors)
from .rules import (Certificate, DomainIncomplete, Premise, PremiseFailed, apply_bind_au_l,
                    apply_bind_au_l_eq, apply_bind_l, apply_iter_ag, apply_iter_au_l,
                    apply_iter_au_r, apply_split_au)
from .tree import (STUCK, Cont, Distinguished, Equivalent, Tree, Unknown, ZeroArity, bind,
                   bisim_upto_tau, br, branch, choice, fmap, iterate, ret, stuck, tau, then,
                   trigger, vis)
from .values import FMap, Inl, Inr

__version__ = "0.1.0"

__all__ = [
    "Log",
    "UnhandledEvent",
    "instrument",
    "instrumented_step",
    "log",
    "Finish",
    "Obs",
    "Pure",
    "Successor",
    "TauBudgetExceeded",
    "Val",
    "can_step",
    "done_with",
    "is_done",
    "not_done",
    "successors",
    "Certificate",
    "DomainIncomplete",
    "Premise",
    "PremiseFailed",
    "apply_bind_au_l",
    "apply_bind_au_l_eq",
    "apply_bind_l",
    "apply_iter_ag",
    "apply_iter_au_l",
    "apply_iter_au_r",
    "apply_split_au",
    "STUCK",
    "Cont",
    "Distinguished",
    "Equivalent",
    "Tree",
    "Unknown",
    "ZeroArity",
    "bind",
    "bisim_upto_tau",
    "br",
    "branch",
    "choice",
    "fmap",
    "iterate",
    "ret",
    "stuck",
    "tau",
    "then",
    "trigger",
    "vis",
    "FMap",
    "Inl",
    "Inr",
]
